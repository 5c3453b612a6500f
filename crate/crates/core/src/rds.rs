//! Reveal structure: a deletable set `B` and a dynamic set `P` of disks;
//! reports every `p` that loses its last intersecting disk of `B`.
//!
//! Each `p` is assigned to a uniformly random intersecting `b`. Only the
//! deletion of that `b` costs work for `p`, and with random assignment the
//! expected number of such deletions is a harmonic number.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::geometry::{disks_intersect, Site, SiteId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RdsError {
    #[error("site {0} is already stored")]
    DuplicateSite(SiteId),
    #[error("site {0} is not stored")]
    UnknownSite(SiteId),
}

/// Uniform sampling among stored disks that intersect a query disk.
pub trait IntersectionSampler {
    fn insert(&mut self, b: Site) -> Result<(), RdsError>;
    fn delete(&mut self, id: SiteId) -> Result<Site, RdsError>;
    /// Intersecting stored disks in increasing id order.
    fn intersecting(&self, q: &Site) -> Vec<SiteId>;
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn sample(&self, q: &Site, rng: &mut dyn RngCore) -> Option<SiteId> {
        let c = self.intersecting(q);
        (!c.is_empty()).then(|| c[rng.gen_range(0..c.len())])
    }
}

/// Reference sampler scanning every stored disk.
#[derive(Debug, Clone, Default)]
pub struct ScanSampler {
    sites: BTreeMap<SiteId, Site>,
}

impl ScanSampler {
    pub fn new() -> Self {
        Self::default()
    }
}

impl IntersectionSampler for ScanSampler {
    fn insert(&mut self, b: Site) -> Result<(), RdsError> {
        if self.sites.contains_key(&b.id) {
            return Err(RdsError::DuplicateSite(b.id));
        }
        self.sites.insert(b.id, b);
        Ok(())
    }

    fn delete(&mut self, id: SiteId) -> Result<Site, RdsError> {
        self.sites.remove(&id).ok_or(RdsError::UnknownSite(id))
    }

    fn intersecting(&self, q: &Site) -> Vec<SiteId> {
        self.sites.values().filter(|b| disks_intersect(q, b)).map(|b| b.id).collect()
    }

    fn len(&self) -> usize {
        self.sites.len()
    }
}

/// Sampler bucketing centers in a uniform grid; only buckets within reach of
/// the query are examined.
#[derive(Debug, Clone)]
pub struct GridSampler {
    cell: f64,
    buckets: FxHashMap<(i64, i64), Vec<Site>>,
    bucket_of: FxHashMap<SiteId, (i64, i64)>,
    max_radius: f64,
}

impl GridSampler {
    pub fn new(cell: f64) -> Self {
        assert!(cell > 0.0 && cell.is_finite(), "bucket size must be positive");
        Self { cell, buckets: FxHashMap::default(), bucket_of: FxHashMap::default(), max_radius: 0.0 }
    }

    fn key(&self, x: f64, y: f64) -> (i64, i64) {
        ((x / self.cell).floor() as i64, (y / self.cell).floor() as i64)
    }
}

impl IntersectionSampler for GridSampler {
    fn insert(&mut self, b: Site) -> Result<(), RdsError> {
        if self.bucket_of.contains_key(&b.id) {
            return Err(RdsError::DuplicateSite(b.id));
        }
        let k = self.key(b.center.x, b.center.y);
        self.buckets.entry(k).or_default().push(b);
        self.bucket_of.insert(b.id, k);
        self.max_radius = self.max_radius.max(b.radius);
        Ok(())
    }

    fn delete(&mut self, id: SiteId) -> Result<Site, RdsError> {
        let k = self.bucket_of.remove(&id).ok_or(RdsError::UnknownSite(id))?;
        let bucket = self.buckets.get_mut(&k).expect("bucket");
        let i = bucket.iter().position(|s| s.id == id).expect("member");
        let s = bucket.swap_remove(i);
        if bucket.is_empty() {
            self.buckets.remove(&k);
        }
        Ok(s)
    }

    fn intersecting(&self, q: &Site) -> Vec<SiteId> {
        let reach = q.radius + self.max_radius;
        let (x0, y0) = self.key(q.center.x - reach, q.center.y - reach);
        let (x1, y1) = self.key(q.center.x + reach, q.center.y + reach);
        let span = (x1 - x0 + 1) as u128 * (y1 - y0 + 1) as u128;
        let mut out = Vec::new();
        let mut take = |bucket: &Vec<Site>| out.extend(bucket.iter().filter(|b| disks_intersect(q, b)).map(|b| b.id));
        if span > self.buckets.len() as u128 {
            self.buckets.values().for_each(&mut take);
        } else {
            for x in x0..=x1 {
                for y in y0..=y1 {
                    if let Some(b) = self.buckets.get(&(x, y)) {
                        take(b);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn len(&self) -> usize {
        self.bucket_of.len()
    }
}

#[derive(Debug, Clone)]
pub struct RevealStructure<S> {
    sampler: S,
    p_sites: FxHashMap<SiteId, Site>,
    assigned: FxHashMap<SiteId, SiteId>,
    assignees: FxHashMap<SiteId, BTreeSet<SiteId>>,
    rng: ChaCha8Rng,
    reassignments: u64,
}

impl<S: IntersectionSampler> RevealStructure<S> {
    /// Loads `b_sites` into `sampler` and assigns every site of `p_sites`;
    /// returns the structure and the sites of `p_sites` that meet no `b`.
    pub fn build(
        mut sampler: S,
        b_sites: impl IntoIterator<Item = Site>,
        p_sites: impl IntoIterator<Item = Site>,
        seed: u64,
    ) -> Result<(Self, Vec<SiteId>), RdsError> {
        for b in b_sites {
            sampler.insert(b)?;
        }
        let mut rds = Self {
            sampler,
            p_sites: FxHashMap::default(),
            assigned: FxHashMap::default(),
            assignees: FxHashMap::default(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            reassignments: 0,
        };
        let mut revealed = Vec::new();
        for p in p_sites {
            if let Some(id) = rds.insert_p(p)? {
                revealed.push(id);
            }
        }
        Ok((rds, revealed))
    }

    pub fn b_len(&self) -> usize {
        self.sampler.len()
    }

    pub fn p_len(&self) -> usize {
        self.p_sites.len()
    }

    pub fn contains_p(&self, id: SiteId) -> bool {
        self.p_sites.contains_key(&id)
    }

    pub fn assignment(&self, p: SiteId) -> Option<SiteId> {
        self.assigned.get(&p).copied()
    }

    /// Resamples caused by deletions of assigned disks, cumulative.
    pub fn reassignments(&self) -> u64 {
        self.reassignments
    }

    fn assign(&mut self, p: &Site) -> bool {
        match self.sampler.sample(p, &mut self.rng) {
            Some(b) => {
                self.assigned.insert(p.id, b);
                self.assignees.entry(b).or_default().insert(p.id);
                true
            }
            None => false,
        }
    }

    /// Adds `p`; returns its id if it meets no `b` and is thus revealed at
    /// once (it is not stored in that case).
    pub fn insert_p(&mut self, p: Site) -> Result<Option<SiteId>, RdsError> {
        if self.p_sites.contains_key(&p.id) {
            return Err(RdsError::DuplicateSite(p.id));
        }
        if self.assign(&p) {
            self.p_sites.insert(p.id, p);
            Ok(None)
        } else {
            Ok(Some(p.id))
        }
    }

    pub fn delete_p(&mut self, id: SiteId) -> Result<(), RdsError> {
        self.p_sites.remove(&id).ok_or(RdsError::UnknownSite(id))?;
        let b = self.assigned.remove(&id).expect("stored p is assigned");
        let set = self.assignees.get_mut(&b).expect("inverse entry");
        set.remove(&id);
        if set.is_empty() {
            self.assignees.remove(&b);
        }
        Ok(())
    }

    /// Removes `b`; returns the sites of `P` it leaves without any
    /// intersecting disk, in increasing id order.
    pub fn delete_b(&mut self, id: SiteId) -> Result<Vec<SiteId>, RdsError> {
        self.sampler.delete(id)?;
        let mut revealed = Vec::new();
        for p in self.assignees.remove(&id).unwrap_or_default() {
            self.reassignments += 1;
            let ps = self.p_sites[&p];
            if !self.assign(&ps) {
                self.assigned.remove(&p);
                self.p_sites.remove(&p);
                revealed.push(p);
            }
        }
        Ok(revealed)
    }

    /// Checks that every stored `p` is assigned to a stored intersecting `b`.
    pub fn audit(&self, b_sites: &FxHashMap<SiteId, Site>) -> Result<(), String> {
        for (p, ps) in &self.p_sites {
            let b = self.assigned.get(p).ok_or_else(|| format!("p {p} unassigned"))?;
            let bs = b_sites.get(b).ok_or_else(|| format!("p {p} assigned to dead b {b}"))?;
            if !disks_intersect(ps, bs) || !self.assignees.get(b).is_some_and(|s| s.contains(p)) {
                return Err(format!("assignment {p} -> {b} is invalid"));
            }
        }
        if self.assigned.len() != self.p_sites.len() {
            return Err("assignment map out of sync".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        let b = [Site::at(1, 0.0, 0.0, 1.0), Site::at(2, 3.0, 0.0, 1.0)];
        let p = [Site::at(10, 1.2, 0.0, 0.4)];
        let (mut r, rev) = RevealStructure::build(ScanSampler::new(), b, p, 1).unwrap();
        assert!(rev.is_empty());
        assert_eq!(r.assignment(SiteId(10)), Some(SiteId(1)));
        assert_eq!(r.delete_b(SiteId(2)).unwrap(), vec![]);
        assert_eq!(r.delete_b(SiteId(1)).unwrap(), vec![SiteId(10)]);
        assert_eq!(r.p_len(), 0);
        assert_eq!(r.delete_b(SiteId(1)), Err(RdsError::UnknownSite(SiteId(1))));
    }

    #[test]
    fn isolated_p_is_revealed_immediately() {
        let (mut r, rev) =
            RevealStructure::build(GridSampler::new(2.0), [Site::at(1, 0.0, 0.0, 1.0)], [Site::at(2, 9.0, 0.0, 1.0)], 1)
                .unwrap();
        assert_eq!(rev, vec![SiteId(2)]);
        assert_eq!(r.insert_p(Site::at(3, 1.0, 0.0, 1.0)).unwrap(), None);
        assert_eq!(r.insert_p(Site::at(3, 1.0, 0.0, 1.0)), Err(RdsError::DuplicateSite(SiteId(3))));
        r.delete_p(SiteId(3)).unwrap();
        assert_eq!(r.delete_p(SiteId(3)), Err(RdsError::UnknownSite(SiteId(3))));
        assert_eq!(r.delete_b(SiteId(1)).unwrap(), vec![]);
    }
}
