//! Additively weighted nearest neighbor: report the stored point minimizing
//! `|location q| + weight`.
//!
//! Storing a disk with weight `-radius` turns the query into a detection
//! test: some stored disk meets the disk `(q, r)` iff the minimum score is at
//! most `r`.

use std::collections::BTreeMap;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::geometry::{Point, Site, SiteId};
use crate::util::ordered_key;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AwnnError {
    #[error("point for owner {0} is already stored")]
    DuplicateOwner(SiteId),
    #[error("no point for owner {0}")]
    UnknownOwner(SiteId),
    #[error("structure is frozen")]
    Frozen,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedPoint {
    pub owner: SiteId,
    pub location: Point,
    pub weight: f64,
}

impl WeightedPoint {
    /// The weighted point representing a disk.
    pub fn from_site(s: &Site) -> Self {
        Self { owner: s.id, location: s.center, weight: -s.radius }
    }

    pub fn score(&self, q: Point) -> f64 {
        self.location.dist(q) + self.weight
    }
}

/// Best score with its owner; ties go to the smallest owner.
pub type Nearest = (SiteId, f64);

fn better(cand: Nearest, best: Option<Nearest>) -> bool {
    match best {
        None => true,
        Some((o, s)) => cand.1 < s || (cand.1 == s && cand.0 < o),
    }
}

pub trait WeightedNearest {
    fn insert(&mut self, p: WeightedPoint) -> Result<(), AwnnError>;
    fn delete(&mut self, owner: SiteId) -> Result<WeightedPoint, AwnnError>;
    fn query(&self, q: Point) -> Option<Nearest>;
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Reference implementation scanning every point.
#[derive(Debug, Clone, Default)]
pub struct ScanAwnn {
    points: FxHashMap<SiteId, WeightedPoint>,
}

impl ScanAwnn {
    pub fn new() -> Self {
        Self::default()
    }
}

impl WeightedNearest for ScanAwnn {
    fn insert(&mut self, p: WeightedPoint) -> Result<(), AwnnError> {
        if self.points.contains_key(&p.owner) {
            return Err(AwnnError::DuplicateOwner(p.owner));
        }
        self.points.insert(p.owner, p);
        Ok(())
    }

    fn delete(&mut self, owner: SiteId) -> Result<WeightedPoint, AwnnError> {
        self.points.remove(&owner).ok_or(AwnnError::UnknownOwner(owner))
    }

    fn query(&self, q: Point) -> Option<Nearest> {
        let mut best = None;
        for p in self.points.values() {
            let cand = (p.owner, p.score(q));
            if better(cand, best) {
                best = Some(cand);
            }
        }
        best
    }

    fn len(&self) -> usize {
        self.points.len()
    }
}

/// Points bucketed in a uniform grid, searched ring by ring around the
/// query until the ring's lower bound exceeds the best score. Falls back to
/// a full scan once the rings would cover more cells than are occupied.
#[derive(Debug, Clone)]
pub struct GridAwnn {
    cell: f64,
    buckets: FxHashMap<(i64, i64), Vec<WeightedPoint>>,
    bucket_of: FxHashMap<SiteId, (i64, i64)>,
    weights: BTreeMap<i64, usize>,
    bounds: Option<(i64, i64, i64, i64)>,
    frozen: bool,
}

impl GridAwnn {
    pub fn new(cell: f64) -> Self {
        assert!(cell > 0.0 && cell.is_finite(), "bucket size must be positive");
        Self {
            cell,
            buckets: FxHashMap::default(),
            bucket_of: FxHashMap::default(),
            weights: BTreeMap::new(),
            bounds: None,
            frozen: false,
        }
    }

    /// Builds a structure that rejects further updates.
    pub fn frozen(cell: f64, points: impl IntoIterator<Item = WeightedPoint>) -> Result<Self, AwnnError> {
        let mut s = Self::new(cell);
        for p in points {
            s.insert(p)?;
        }
        s.frozen = true;
        Ok(s)
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    fn key(&self, p: Point) -> (i64, i64) {
        ((p.x / self.cell).floor() as i64, (p.y / self.cell).floor() as i64)
    }

    fn min_weight(&self) -> f64 {
        let k = *self.weights.keys().next().expect("non-empty");
        crate::util::from_ordered_key(k)
    }

    fn scan_bucket(&self, key: (i64, i64), q: Point, best: &mut Option<Nearest>) {
        if let Some(b) = self.buckets.get(&key) {
            for p in b {
                let cand = (p.owner, p.score(q));
                if better(cand, *best) {
                    *best = Some(cand);
                }
            }
        }
    }
}

impl WeightedNearest for GridAwnn {
    fn insert(&mut self, p: WeightedPoint) -> Result<(), AwnnError> {
        if self.frozen {
            return Err(AwnnError::Frozen);
        }
        if self.bucket_of.contains_key(&p.owner) {
            return Err(AwnnError::DuplicateOwner(p.owner));
        }
        let k = self.key(p.location);
        self.buckets.entry(k).or_default().push(p);
        self.bucket_of.insert(p.owner, k);
        *self.weights.entry(ordered_key(p.weight)).or_default() += 1;
        self.bounds = Some(match self.bounds {
            None => (k.0, k.0, k.1, k.1),
            Some((x0, x1, y0, y1)) => (x0.min(k.0), x1.max(k.0), y0.min(k.1), y1.max(k.1)),
        });
        Ok(())
    }

    fn delete(&mut self, owner: SiteId) -> Result<WeightedPoint, AwnnError> {
        if self.frozen {
            return Err(AwnnError::Frozen);
        }
        let k = self.bucket_of.remove(&owner).ok_or(AwnnError::UnknownOwner(owner))?;
        let bucket = self.buckets.get_mut(&k).expect("bucket");
        let i = bucket.iter().position(|p| p.owner == owner).expect("member");
        let p = bucket.swap_remove(i);
        if bucket.is_empty() {
            self.buckets.remove(&k);
        }
        let wk = ordered_key(p.weight);
        let c = self.weights.get_mut(&wk).expect("weight");
        *c -= 1;
        if *c == 0 {
            self.weights.remove(&wk);
        }
        if self.bucket_of.is_empty() {
            self.bounds = None;
        }
        Ok(p)
    }

    fn query(&self, q: Point) -> Option<Nearest> {
        let (x0, x1, y0, y1) = self.bounds?;
        if self.bucket_of.is_empty() {
            return None;
        }
        let w_min = self.min_weight();
        let (cx, cy) = self.key(q);
        // Rings beyond this radius hold no bucket.
        let max_ring = [cx - x0, x1 - cx, cy - y0, y1 - cy].into_iter().max().unwrap_or(0).max(0);
        let mut best = None;
        for k in 0..=max_ring {
            if k >= 1 {
                let lb = (k - 1) as f64 * self.cell + w_min;
                if best.is_some_and(|(_, s)| lb > s) {
                    return best;
                }
            }
            let ring_cells = if k == 0 { 1 } else { 8 * k as usize };
            if ring_cells > 2 * self.buckets.len() {
                let mut all = None;
                for &key in self.buckets.keys() {
                    self.scan_bucket(key, q, &mut all);
                }
                return all;
            }
            if k == 0 {
                self.scan_bucket((cx, cy), q, &mut best);
                continue;
            }
            for d in -k..=k {
                self.scan_bucket((cx + d, cy - k), q, &mut best);
                self.scan_bucket((cx + d, cy + k), q, &mut best);
            }
            for d in (-k + 1)..k {
                self.scan_bucket((cx - k, cy + d), q, &mut best);
                self.scan_bucket((cx + k, cy + d), q, &mut best);
            }
        }
        best
    }

    fn len(&self) -> usize {
        self.bucket_of.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wp(owner: u64, x: f64, y: f64, w: f64) -> WeightedPoint {
        WeightedPoint { owner: SiteId(owner), location: Point::new(x, y), weight: w }
    }

    #[test]
    fn weight_beats_distance() {
        for s in [&mut ScanAwnn::new() as &mut dyn WeightedNearest, &mut GridAwnn::new(4.0)] {
            s.insert(wp(1, 0.0, 0.0, -1.0)).unwrap();
            s.insert(wp(2, 10.0, 0.0, -9.0)).unwrap();
            // 0 - 1 beats 10 - 9.
            assert_eq!(s.query(Point::new(0.0, 0.0)), Some((SiteId(1), -1.0)));
            s.delete(SiteId(1)).unwrap();
            assert_eq!(s.query(Point::new(0.0, 0.0)), Some((SiteId(2), 1.0)));
            assert!(s.delete(SiteId(1)).is_err());
            assert!(s.insert(wp(2, 0.0, 0.0, 0.0)).is_err());
            s.insert(wp(1, 0.0, 0.0, -1.0)).unwrap();
            assert!(s.insert(wp(1, 0.0, 0.0, 0.0)).is_err());
        }
    }

    #[test]
    fn empty_query_is_none() {
        assert_eq!(GridAwnn::new(1.0).query(Point::new(0.0, 0.0)), None);
        assert_eq!(ScanAwnn::new().query(Point::new(0.0, 0.0)), None);
    }

    #[test]
    fn frozen_rejects_updates() {
        let mut s = GridAwnn::frozen(1.0, [wp(1, 0.0, 0.0, -1.0)]).unwrap();
        assert_eq!(s.insert(wp(2, 0.0, 0.0, -1.0)), Err(AwnnError::Frozen));
        assert_eq!(s.delete(SiteId(1)), Err(AwnnError::Frozen));
        assert_eq!(s.query(Point::new(3.0, 4.0)), Some((SiteId(1), 4.0)));
    }
}
