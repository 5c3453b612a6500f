//! Maximal bichromatic matching between two site sets `P` and `B`, where an
//! edge joins intersecting sites of different sides.
//!
//! Unmatched sites of each side live in a store that, given a site of the
//! other side, proposes the one unmatched candidate most likely to meet it:
//! if that candidate misses, every unmatched site of the store misses.
//! Two stores are provided: [`EnvelopeStore`] for congruent disks split by a
//! line and [`AwnnStore`] for arbitrary radii.

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::awnn::{GridAwnn, WeightedNearest, WeightedPoint};
use crate::envelope::{ArcCurve, LowerEnvelope};
use crate::geometry::{disks_intersect, Point, Site, SiteId};
use crate::grid::CellId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatchingError {
    #[error("site {0} is already in the matching")]
    DuplicateSite(SiteId),
    #[error("site {0} is not in the matching")]
    UnknownSite(SiteId),
    #[error("site {id} is on side {actual:?}, not {requested:?}")]
    WrongSide { id: SiteId, requested: Side, actual: Side },
    #[error("site {0} is missing from the registry")]
    MissingGeometry(SiteId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    P,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::P => Side::B,
            Side::B => Side::P,
        }
    }
}

/// How an update changed the emptiness of the matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchingDelta {
    Unchanged,
    BecameNonEmpty,
    BecameEmpty,
}

/// Source of site geometry by id.
pub trait SiteRegistry {
    fn site(&self, id: SiteId) -> Option<&Site>;
}

impl<S: std::hash::BuildHasher> SiteRegistry for std::collections::HashMap<SiteId, Site, S> {
    fn site(&self, id: SiteId) -> Option<&Site> {
        self.get(&id)
    }
}

pub trait UnmatchedStore {
    fn add(&mut self, site: &Site);
    fn remove(&mut self, id: SiteId);
    /// The stored site to test against `query`; if it does not intersect
    /// `query`, no stored site does.
    fn candidate(&self, query: &Site) -> Option<SiteId>;
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Coordinates relative to a line separating two grid cells: `u` runs along
/// the line, `v` is the signed distance towards the `P` cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparatingFrame {
    vertical: bool,
    offset: f64,
    sign: f64,
}

impl SeparatingFrame {
    /// Frame for distinct same-level cells; `None` if they coincide.
    pub fn between(p_cell: CellId, b_cell: CellId) -> Option<Self> {
        debug_assert_eq!(p_cell.level, b_cell.level);
        let side = p_cell.side();
        if p_cell.ix != b_cell.ix {
            Some(Self {
                vertical: true,
                offset: p_cell.ix.max(b_cell.ix) as f64 * side,
                sign: if p_cell.ix > b_cell.ix { 1.0 } else { -1.0 },
            })
        } else if p_cell.iy != b_cell.iy {
            Some(Self {
                vertical: false,
                offset: p_cell.iy.max(b_cell.iy) as f64 * side,
                sign: if p_cell.iy > b_cell.iy { 1.0 } else { -1.0 },
            })
        } else {
            None
        }
    }

    pub fn map(&self, p: Point) -> (f64, f64) {
        if self.vertical {
            (p.y, (p.x - self.offset) * self.sign)
        } else {
            (p.x, (p.y - self.offset) * self.sign)
        }
    }
}

/// Unmatched store for congruent disks of radius `R/2` on one side of a
/// separating line. Each site contributes the lower arc of its radius-`R`
/// circle (mirrored for the `B` side); a query site lies in some disk of
/// radius `R` around a stored site iff it lies on or above the envelope.
#[derive(Debug, Clone)]
pub struct EnvelopeStore<E> {
    frame: SeparatingFrame,
    mirror: bool,
    radius: f64,
    env: E,
}

impl<E: LowerEnvelope> EnvelopeStore<E> {
    /// `side` is the side whose unmatched sites this store holds; `env` must
    /// be empty and use radius `2 * unit_radius`.
    pub fn new(frame: SeparatingFrame, side: Side, unit_radius: f64, env: E) -> Self {
        Self { frame, mirror: side == Side::B, radius: 2.0 * unit_radius, env }
    }
}

impl<E: LowerEnvelope> UnmatchedStore for EnvelopeStore<E> {
    fn add(&mut self, site: &Site) {
        let (u, v) = self.frame.map(site.center);
        let cy = if self.mirror { -v } else { v };
        self.env.insert(ArcCurve::new(site.id, u, cy, self.radius)).expect("unique owner");
    }

    fn remove(&mut self, id: SiteId) {
        self.env.delete(id).expect("stored owner");
    }

    fn candidate(&self, query: &Site) -> Option<SiteId> {
        let (u, _) = self.frame.map(query.center);
        self.env.ray_shoot(u).map(|(owner, _)| owner)
    }

    fn len(&self) -> usize {
        self.env.len()
    }
}

/// Unmatched store for arbitrary radii: weighted nearest neighbor with
/// weights `-r`.
#[derive(Debug, Clone)]
pub struct AwnnStore {
    awnn: GridAwnn,
}

impl AwnnStore {
    pub fn new(bucket: f64) -> Self {
        Self { awnn: GridAwnn::new(bucket) }
    }
}

impl UnmatchedStore for AwnnStore {
    fn add(&mut self, site: &Site) {
        self.awnn.insert(WeightedPoint::from_site(site)).expect("unique owner");
    }

    fn remove(&mut self, id: SiteId) {
        self.awnn.delete(id).expect("stored owner");
    }

    fn candidate(&self, query: &Site) -> Option<SiteId> {
        self.awnn.query(query.center).map(|(owner, _)| owner)
    }

    fn len(&self) -> usize {
        self.awnn.len()
    }
}

/// Plain copy of a matching's membership and pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchingSnapshot {
    pub p: Vec<SiteId>,
    pub b: Vec<SiteId>,
    pub pairs: Vec<(SiteId, SiteId)>,
}

#[derive(Debug, Clone)]
pub struct Matching<S> {
    unmatched_p: S,
    unmatched_b: S,
    side_of: FxHashMap<SiteId, Side>,
    mate: FxHashMap<SiteId, SiteId>,
    p_count: usize,
}

impl<S: UnmatchedStore> Matching<S> {
    pub fn new(unmatched_p: S, unmatched_b: S) -> Self {
        Self { unmatched_p, unmatched_b, side_of: FxHashMap::default(), mate: FxHashMap::default(), p_count: 0 }
    }

    fn store(&mut self, side: Side) -> &mut S {
        match side {
            Side::P => &mut self.unmatched_p,
            Side::B => &mut self.unmatched_b,
        }
    }

    /// Number of matched pairs.
    pub fn len(&self) -> usize {
        self.mate.len() / 2
    }

    /// True when no pair is matched.
    pub fn is_empty(&self) -> bool {
        self.mate.is_empty()
    }

    pub fn site_count(&self) -> usize {
        self.side_of.len()
    }

    /// Number of sites on one side.
    pub fn side_len(&self, side: Side) -> usize {
        match side {
            Side::P => self.p_count,
            Side::B => self.side_of.len() - self.p_count,
        }
    }

    pub fn contains(&self, id: SiteId) -> bool {
        self.side_of.contains_key(&id)
    }

    pub fn side_of(&self, id: SiteId) -> Option<Side> {
        self.side_of.get(&id).copied()
    }

    pub fn mate(&self, id: SiteId) -> Option<SiteId> {
        self.mate.get(&id).copied()
    }

    /// Matched pairs as (P site, B site).
    pub fn pairs(&self) -> impl Iterator<Item = (SiteId, SiteId)> + '_ {
        self.mate.iter().filter(|(a, _)| self.side_of[a] == Side::P).map(|(&a, &b)| (a, b))
    }

    pub fn members(&self, side: Side) -> impl Iterator<Item = SiteId> + '_ {
        self.side_of.iter().filter(move |(_, &s)| s == side).map(|(&id, _)| id)
    }

    pub fn snapshot(&self) -> MatchingSnapshot {
        let mut snap = MatchingSnapshot {
            p: self.members(Side::P).collect(),
            b: self.members(Side::B).collect(),
            pairs: self.pairs().collect(),
        };
        snap.p.sort();
        snap.b.sort();
        snap.pairs.sort();
        snap
    }

    fn delta(was_empty: bool, now_empty: bool) -> MatchingDelta {
        match (was_empty, now_empty) {
            (true, false) => MatchingDelta::BecameNonEmpty,
            (false, true) => MatchingDelta::BecameEmpty,
            _ => MatchingDelta::Unchanged,
        }
    }

    /// Matches `site` with an unmatched intersecting site of the other side
    /// if one exists, otherwise parks it as unmatched.
    fn place(&mut self, side: Side, site: &Site, registry: &impl SiteRegistry) -> Result<(), MatchingError> {
        let other = side.other();
        if let Some(c) = self.store(other).candidate(site) {
            let cs = registry.site(c).ok_or(MatchingError::MissingGeometry(c))?;
            if disks_intersect(site, cs) {
                self.store(other).remove(c);
                self.mate.insert(site.id, c);
                self.mate.insert(c, site.id);
                return Ok(());
            }
        }
        self.store(side).add(site);
        Ok(())
    }

    pub fn insert(&mut self, side: Side, site: &Site, registry: &impl SiteRegistry) -> Result<MatchingDelta, MatchingError> {
        if self.side_of.contains_key(&site.id) {
            return Err(MatchingError::DuplicateSite(site.id));
        }
        let was_empty = self.is_empty();
        self.side_of.insert(site.id, side);
        if side == Side::P {
            self.p_count += 1;
        }
        self.place(side, site, registry)?;
        Ok(Self::delta(was_empty, self.is_empty()))
    }

    /// Removes `id`; a matched partner is re-placed, which takes one store
    /// query since the partner was maximal against everything else before.
    pub fn delete(&mut self, side: Side, id: SiteId, registry: &impl SiteRegistry) -> Result<MatchingDelta, MatchingError> {
        let actual = *self.side_of.get(&id).ok_or(MatchingError::UnknownSite(id))?;
        if actual != side {
            return Err(MatchingError::WrongSide { id, requested: side, actual });
        }
        let was_empty = self.is_empty();
        self.side_of.remove(&id);
        if side == Side::P {
            self.p_count -= 1;
        }
        match self.mate.remove(&id) {
            Some(orphan) => {
                self.mate.remove(&orphan);
                let os = *registry.site(orphan).ok_or(MatchingError::MissingGeometry(orphan))?;
                self.place(side.other(), &os, registry)?;
            }
            None => self.store(side).remove(id),
        }
        Ok(Self::delta(was_empty, self.is_empty()))
    }

    /// Checks that matched pairs intersect and that no two unmatched sites of
    /// different sides intersect.
    pub fn audit(&self, registry: &impl SiteRegistry) -> Result<(), String> {
        let geom = |id: SiteId| registry.site(id).ok_or_else(|| format!("site {id} missing from registry"));
        for (p, b) in self.pairs() {
            if !disks_intersect(geom(p)?, geom(b)?) {
                return Err(format!("matched pair ({p}, {b}) does not intersect"));
            }
        }
        let free = |side: Side| -> Vec<SiteId> { self.members(side).filter(|id| !self.mate.contains_key(id)).collect() };
        let (fp, fb) = (free(Side::P), free(Side::B));
        if fp.len() != self.unmatched_p.len() || fb.len() != self.unmatched_b.len() {
            return Err("unmatched stores out of sync with membership".into());
        }
        for &p in &fp {
            let ps = geom(p)?;
            for &b in &fb {
                if disks_intersect(ps, geom(b)?) {
                    return Err(format!("unmatched sites {p} and {b} intersect"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::EnvelopeTree;
    use crate::grid::cell_of;

    type Reg = std::collections::HashMap<SiteId, Site>;

    fn reg(sites: &[Site]) -> Reg {
        sites.iter().map(|s| (s.id, *s)).collect()
    }

    #[test]
    fn unit_insert_matches_across_line() {
        let p = Site::at(1, 1.0, 2.0, 1.0);
        let b = Site::at(2, 1.0, 0.5, 1.0);
        let (pc, bc) = (cell_of(p.center, 1), cell_of(b.center, 1));
        let frame = SeparatingFrame::between(pc, bc).unwrap();
        let mut m = Matching::new(
            EnvelopeStore::new(frame, Side::P, 1.0, EnvelopeTree::new(2.0)),
            EnvelopeStore::new(frame, Side::B, 1.0, EnvelopeTree::new(2.0)),
        );
        let r = reg(&[p, b]);
        assert_eq!(m.insert(Side::P, &p, &r).unwrap(), MatchingDelta::Unchanged);
        assert_eq!(m.insert(Side::B, &b, &r).unwrap(), MatchingDelta::BecameNonEmpty);
        assert_eq!(m.mate(SiteId(1)), Some(SiteId(2)));
        assert_eq!(m.delete(Side::P, SiteId(1), &r).unwrap(), MatchingDelta::BecameEmpty);
        m.audit(&r).unwrap();
    }

    #[test]
    fn unit_example_below_the_axis() {
        let p = Site::at(1, 0.0, 1.0, 1.0);
        let b = Site::at(2, 0.0, -0.5, 1.0);
        let frame = SeparatingFrame::between(cell_of(p.center, 1), cell_of(b.center, 1)).unwrap();
        assert_eq!(frame.map(b.center).1, -0.5);
        let mut m = Matching::new(
            EnvelopeStore::new(frame, Side::P, 1.0, EnvelopeTree::new(2.0)),
            EnvelopeStore::new(frame, Side::B, 1.0, EnvelopeTree::new(2.0)),
        );
        let r = reg(&[p, b]);
        m.insert(Side::P, &p, &r).unwrap();
        assert_eq!(m.insert(Side::B, &b, &r).unwrap(), MatchingDelta::BecameNonEmpty);
    }

    #[test]
    fn orphan_is_rematched() {
        let sites = [Site::at(1, 0.0, 0.0, 1.0), Site::at(2, 1.5, 0.0, 1.0), Site::at(3, 3.0, 0.0, 1.0)];
        let r = reg(&sites);
        let mut m = Matching::new(AwnnStore::new(2.0), AwnnStore::new(2.0));
        m.insert(Side::P, &sites[0], &r).unwrap();
        m.insert(Side::B, &sites[1], &r).unwrap();
        m.insert(Side::P, &sites[2], &r).unwrap();
        assert_eq!(m.len(), 1);
        let first = m.mate(SiteId(2)).unwrap();
        assert_eq!(m.delete(Side::P, first, &r).unwrap(), MatchingDelta::Unchanged);
        assert_eq!(m.len(), 1);
        m.audit(&r).unwrap();
    }

    #[test]
    fn errors() {
        let s = Site::at(1, 0.0, 0.0, 1.0);
        let r = reg(&[s]);
        let mut m = Matching::new(AwnnStore::new(2.0), AwnnStore::new(2.0));
        m.insert(Side::P, &s, &r).unwrap();
        assert_eq!(m.insert(Side::B, &s, &r), Err(MatchingError::DuplicateSite(SiteId(1))));
        assert!(matches!(m.delete(Side::B, SiteId(1), &r), Err(MatchingError::WrongSide { .. })));
        assert_eq!(m.delete(Side::P, SiteId(9), &r), Err(MatchingError::UnknownSite(SiteId(9))));
    }
}
