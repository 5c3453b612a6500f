//! Semi-dynamic connectivity over region proxy graphs.
//!
//! The proxy graph has a vertex per site and per region, and joins a site to
//! a region when the site is in `S1` or `S2` of the region. Two sites are
//! connected in the disk graph iff their vertices are connected in it.
//!
//! [`IncrementalConnectivity`] supports insertions of disks with radii in
//! `[1, psi]` over a union-find. [`DecrementalConnectivity`] is built once
//! and supports deletions, for bounded radii (cell anchors) or arbitrary
//! radii (canonical-path anchors); each region keeps a reveal structure
//! that reports the `S2` sites losing their last intersecting `S1` site.

use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};

use rustc_hash::{FxHashMap, FxHashSet, FxHasher};

use crate::awnn::{GridAwnn, WeightedNearest, WeightedPoint};
use crate::dynconn::{DynamicConnectivity, EdgeHandle, UnionFind, VertexId};
use crate::geometry::{disks_intersect, Site, SiteId};
use crate::grid::{cell_of, level_of_radius, neighborhood};
use crate::oracle::{components, oracle_regions, AnchorSystem, RegionSets};
use crate::quadforest::{build_compressed, CompressedQuadtree, QuadForest};
use crate::rds::{GridSampler, RevealStructure};
use crate::regions::{
    regions_of, s1_regions_bounded, s1_regions_general, s2_anchors_bounded, s2_anchors_general, Anchor,
    AnchorFrame, ConeCounts, RegionId, S1_WINDOW,
};
use crate::structure::{DiskConnectivity, StructureError, StructureStats};

/// Sum of set sizes and the largest number of `S1` sets holding one site.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MembershipTotals {
    pub regions: usize,
    pub s1: usize,
    pub s2: usize,
    pub max_s1_per_site: usize,
}

fn totals(sets: &RegionSets) -> MembershipTotals {
    let mut per_site: FxHashMap<SiteId, usize> = FxHashMap::default();
    for set in sets.s1.values() {
        for id in set {
            *per_site.entry(*id).or_default() += 1;
        }
    }
    MembershipTotals {
        regions: sets.s1.keys().chain(sets.s2.keys()).collect::<FxHashSet<_>>().len(),
        s1: sets.s1.values().map(BTreeSet::len).sum(),
        s2: sets.s2.values().map(BTreeSet::len).sum(),
        max_s1_per_site: per_site.values().copied().max().unwrap_or(0),
    }
}

fn compare_sets(label: &str, got: &RegionSets, want: &RegionSets) -> Result<(), String> {
    for (name, g, w) in [("S1", &got.s1, &want.s1), ("S2", &got.s2, &want.s2)] {
        for (region, set) in w {
            if g.get(region) != Some(set) {
                return Err(format!("{label}: {name} of {region:?} is {:?}, expected {set:?}", g.get(region)));
            }
        }
        if let Some(extra) = g.keys().find(|r| !w.contains_key(r)) {
            return Err(format!("{label}: {name} of {extra:?} should be empty"));
        }
    }
    Ok(())
}

/// Checks site connectivity against the brute-force components.
fn check_components(
    sites: &FxHashMap<SiteId, Site>,
    mut connected: impl FnMut(SiteId, SiteId) -> bool,
) -> Result<(), String> {
    let live: Vec<Site> = sites.values().copied().collect();
    let labels = components(&live);
    let mut leaders: FxHashMap<usize, SiteId> = FxHashMap::default();
    for s in &live {
        let leader = *leaders.entry(labels[&s.id]).or_insert(s.id);
        if !connected(s.id, leader) {
            return Err(format!("sites {} and {leader} should be connected", s.id));
        }
    }
    let leaders: Vec<SiteId> = leaders.into_values().collect();
    for (i, a) in leaders.iter().enumerate() {
        for b in &leaders[i + 1..] {
            if connected(*a, *b) {
                return Err(format!("sites {a} and {b} should not be connected"));
            }
        }
    }
    Ok(())
}

/// Bucket size for the per-region nearest-neighbor and sampling grids.
fn bucket(frame: &AnchorFrame) -> f64 {
    frame.largest.diameter()
}

#[derive(Debug)]
struct IncRegion {
    vertex: u32,
    s1: GridAwnn,
    s2_bar: GridAwnn,
    s1_ids: BTreeSet<SiteId>,
    s2_ids: BTreeSet<SiteId>,
}

/// Insert-only connectivity for radii in `[1, psi]`.
#[derive(Debug)]
pub struct IncrementalConnectivity {
    psi: f64,
    cones: ConeCounts,
    forest: QuadForest,
    sites: FxHashMap<SiteId, Site>,
    vertex: FxHashMap<SiteId, u32>,
    regions: FxHashMap<RegionId, IncRegion>,
    uf: UnionFind,
    edges: usize,
    touched: u64,
}

impl IncrementalConnectivity {
    pub fn new(psi: f64) -> Result<Self, StructureError> {
        Self::with_cones(psi, ConeCounts::default())
    }

    pub fn with_cones(psi: f64, cones: ConeCounts) -> Result<Self, StructureError> {
        Ok(Self {
            psi,
            cones,
            forest: QuadForest::for_radius_bound(psi, S1_WINDOW)?,
            sites: FxHashMap::default(),
            vertex: FxHashMap::default(),
            regions: FxHashMap::default(),
            uf: UnionFind::new(),
            edges: 0,
            touched: 0,
        })
    }

    pub fn forest(&self) -> &QuadForest {
        &self.forest
    }

    /// The non-empty `S1` and `S2` sets.
    pub fn region_sets(&self) -> RegionSets {
        let mut out = RegionSets::default();
        for (id, r) in &self.regions {
            if !r.s1_ids.is_empty() {
                out.s1.insert(*id, r.s1_ids.clone());
            }
            if !r.s2_ids.is_empty() {
                out.s2.insert(*id, r.s2_ids.clone());
            }
        }
        out
    }

    pub fn membership_totals(&self) -> MembershipTotals {
        totals(&self.region_sets())
    }

    fn region(&mut self, id: RegionId) -> &mut IncRegion {
        let Self { regions, uf, .. } = self;
        regions.entry(id).or_insert_with(|| {
            let Anchor::Cell(c) = id.anchor else { unreachable!("cell anchors only") };
            let b = bucket(&AnchorFrame::cell(c));
            IncRegion {
                vertex: uf.make(),
                s1: GridAwnn::new(b),
                s2_bar: GridAwnn::new(b),
                s1_ids: BTreeSet::new(),
                s2_ids: BTreeSet::new(),
            }
        })
    }

    fn join(&mut self, site: SiteId, region_vertex: u32) {
        let v = self.vertex[&site];
        self.uf.union(v, region_vertex);
        self.edges += 1;
    }
}

impl DiskConnectivity for IncrementalConnectivity {
    fn insert(&mut self, site: Site) -> Result<(), StructureError> {
        if !(1.0..=self.psi).contains(&site.radius) {
            return Err(StructureError::RadiusOutOfRange { id: site.id, radius: site.radius, min: 1.0, max: self.psi });
        }
        if self.sites.contains_key(&site.id) {
            return Err(StructureError::DuplicateSite(site.id));
        }
        self.forest.insert_site(&site)?;
        // Outer regions one level down admit radius exactly 2|σ|; their
        // cells must exist before any later site could create them.
        let level = level_of_radius(site.radius)?;
        if level > 0 && site.radius == (level as f64).exp2() {
            let mut created = Vec::new();
            for c in neighborhood(cell_of(site.center, level - 1), S1_WINDOW)? {
                self.forest.ensure_cell(c, &mut created);
            }
        }
        self.sites.insert(site.id, site);
        let v = self.uf.make();
        self.vertex.insert(site.id, v);

        for id in s1_regions_bounded(&self.forest, self.cones, &site)? {
            self.touched += 1;
            let region = self.region(id);
            region.s1.insert(WeightedPoint::from_site(&site))?;
            region.s1_ids.insert(site.id);
            let rv = region.vertex;
            self.join(site.id, rv);
            let bound = self.regions[&id].s2_bar.len();
            let mut drained = 0;
            loop {
                let region = self.regions.get_mut(&id).expect("region");
                let Some((u, _)) = region.s2_bar.query(site.center) else { break };
                if !disks_intersect(&site, &self.sites[&u]) {
                    break;
                }
                region.s2_bar.delete(u)?;
                region.s2_ids.insert(u);
                drained += 1;
                assert!(drained <= bound, "drain loop exceeded the candidate count");
                self.join(u, rv);
            }
        }

        for anchor in s2_anchors_bounded(&self.forest, &site)? {
            for id in regions_of(&[anchor], self.cones) {
                self.touched += 1;
                let probe = self.region(id).s1.query(site.center);
                let hit = probe.is_some_and(|(t, _)| disks_intersect(&site, &self.sites[&t]));
                let region = self.regions.get_mut(&id).expect("region");
                if hit {
                    region.s2_ids.insert(site.id);
                    let rv = region.vertex;
                    self.join(site.id, rv);
                } else {
                    region.s2_bar.insert(WeightedPoint::from_site(&site))?;
                }
            }
        }
        Ok(())
    }

    fn delete(&mut self, _id: SiteId) -> Result<(), StructureError> {
        Err(StructureError::Unsupported("deletion from the incremental structure"))
    }

    fn connected(&mut self, a: SiteId, b: SiteId) -> Result<bool, StructureError> {
        let va = *self.vertex.get(&a).ok_or(StructureError::UnknownSite(a))?;
        let vb = *self.vertex.get(&b).ok_or(StructureError::UnknownSite(b))?;
        Ok(self.uf.connected(va, vb))
    }

    fn len(&self) -> usize {
        self.sites.len()
    }

    fn stats(&self) -> StructureStats {
        StructureStats {
            sites: self.sites.len(),
            vertices: self.uf.len(),
            edges: self.edges,
            touched: self.touched,
            matched_sites: 0,
            reassignments: 0,
        }
    }

    fn audit(&mut self) -> Result<(), String> {
        self.forest.check_invariants()?;
        let live: Vec<Site> = self.sites.values().copied().collect();
        let cells: Vec<_> = self.forest.nodes().map(|n| n.cell).collect();
        let want = oracle_regions(&live, AnchorSystem::Cells(&cells), self.cones);
        compare_sets("incremental", &self.region_sets(), &want)?;
        for (id, r) in &self.regions {
            let Anchor::Cell(c) = id.anchor else { return Err("non-cell anchor".into()) };
            let eligible = live.iter().filter(|s| c.contains_point(s.center) && s.radius < 2.0 * c.diameter()).count();
            if r.s1.len() != r.s1_ids.len() || r.s2_bar.len() + r.s2_ids.len() != eligible {
                return Err(format!("region {id:?}: candidate sets out of sync"));
            }
        }
        let Self { sites, vertex, uf, .. } = self;
        check_components(sites, |a, b| uf.connected(vertex[&a], vertex[&b]))
    }
}

/// Which anchors the decremental structure uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variant {
    /// Quadtree cells; radii must lie in `[1, psi]`.
    Bounded { psi: f64 },
    /// Canonical paths of a compressed quadtree; any radius at least 1.
    General,
}

#[derive(Debug)]
enum Backing {
    Forest(QuadForest),
    Tree(CompressedQuadtree),
    Empty,
}

#[derive(Debug)]
struct DecRegion {
    s1: BTreeSet<SiteId>,
    s2: BTreeSet<SiteId>,
    rds: RevealStructure<GridSampler>,
}

/// Delete-only connectivity.
#[derive(Debug)]
pub struct DecrementalConnectivity {
    variant: Variant,
    cones: ConeCounts,
    backing: Backing,
    sites: FxHashMap<SiteId, Site>,
    vertex: FxHashMap<SiteId, VertexId>,
    regions: FxHashMap<RegionId, DecRegion>,
    s1_of: FxHashMap<SiteId, Vec<RegionId>>,
    s2_of: FxHashMap<SiteId, BTreeSet<RegionId>>,
    edges: FxHashMap<(SiteId, RegionId), EdgeHandle>,
    hdt: DynamicConnectivity,
    touched: u64,
    last_revealed: Vec<(RegionId, SiteId)>,
}

/// Seed of a region's reveal structure.
fn region_seed(seed: u64, id: &RegionId) -> u64 {
    let mut h = FxHasher::default();
    id.hash(&mut h);
    let mut z = seed ^ h.finish();
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl DecrementalConnectivity {
    pub fn build(sites: &[Site], variant: Variant, seed: u64) -> Result<Self, StructureError> {
        Self::build_with_cones(sites, variant, ConeCounts::default(), seed)
    }

    pub fn build_with_cones(
        sites: &[Site],
        variant: Variant,
        cones: ConeCounts,
        seed: u64,
    ) -> Result<Self, StructureError> {
        let mut registry = FxHashMap::default();
        for s in sites {
            s.check_canonical()?;
            level_of_radius(s.radius)?;
            if let Variant::Bounded { psi } = variant {
                if s.radius > psi {
                    return Err(StructureError::RadiusOutOfRange { id: s.id, radius: s.radius, min: 1.0, max: psi });
                }
            }
            if registry.insert(s.id, *s).is_some() {
                return Err(StructureError::DuplicateSite(s.id));
            }
        }
        let backing = match variant {
            Variant::Bounded { psi } => {
                let mut forest = QuadForest::for_radius_bound(psi, S1_WINDOW)?;
                for s in sites {
                    forest.insert_site(s)?;
                }
                Backing::Forest(forest)
            }
            Variant::General if sites.is_empty() => Backing::Empty,
            Variant::General => Backing::Tree(build_compressed(sites, S1_WINDOW)?),
        };

        let mut s1: FxHashMap<RegionId, Vec<SiteId>> = FxHashMap::default();
        let mut s1_of: FxHashMap<SiteId, Vec<RegionId>> = FxHashMap::default();
        for t in sites {
            let found = match &backing {
                Backing::Forest(f) => s1_regions_bounded(f, cones, t)?,
                Backing::Tree(tr) => s1_regions_general(tr, cones, t)?,
                Backing::Empty => Vec::new(),
            };
            for id in &found {
                s1.entry(*id).or_default().push(t.id);
            }
            s1_of.insert(t.id, found);
        }

        let mut probes: FxHashMap<RegionId, GridAwnn> = FxHashMap::default();
        for (id, members) in &s1 {
            let frame = frame_of(&backing, id.anchor);
            let points = members.iter().map(|t| WeightedPoint::from_site(&registry[t]));
            probes.insert(*id, GridAwnn::frozen(bucket(&frame), points)?);
        }
        let mut s2: FxHashMap<RegionId, Vec<SiteId>> = FxHashMap::default();
        let mut s2_of: FxHashMap<SiteId, BTreeSet<RegionId>> = FxHashMap::default();
        for s in sites {
            let anchors = match &backing {
                Backing::Forest(f) => s2_anchors_bounded(f, s)?,
                Backing::Tree(tr) => s2_anchors_general(tr, s)?,
                Backing::Empty => Vec::new(),
            };
            let mut mine = BTreeSet::new();
            for id in regions_of(&anchors, cones) {
                let Some(probe) = probes.get(&id) else { continue };
                if probe.query(s.center).is_some_and(|(t, _)| disks_intersect(s, &registry[&t])) {
                    s2.entry(id).or_default().push(s.id);
                    mine.insert(id);
                }
            }
            s2_of.insert(s.id, mine);
        }

        let mut hdt = DynamicConnectivity::new();
        let mut vertex = FxHashMap::default();
        for s in sites {
            vertex.insert(s.id, hdt.add_vertex());
        }
        let mut regions = FxHashMap::default();
        let mut edges = FxHashMap::default();
        let ids: BTreeSet<RegionId> = s1.keys().chain(s2.keys()).copied().collect();
        for id in ids {
            let frame = frame_of(&backing, id.anchor);
            let b_ids = s1.remove(&id).unwrap_or_default();
            let mut p_ids = s2.remove(&id).unwrap_or_default();
            let (rds, revealed) = RevealStructure::build(
                GridSampler::new(bucket(&frame)),
                b_ids.iter().map(|t| registry[t]),
                p_ids.iter().map(|p| registry[p]),
                region_seed(seed, &id),
            )?;
            debug_assert!(revealed.is_empty(), "probe and sampler disagree");
            for p in &revealed {
                s2_of.get_mut(p).expect("site").remove(&id);
            }
            p_ids.retain(|p| !revealed.contains(p));
            let rv = hdt.add_vertex();
            for s in b_ids.iter().chain(&p_ids) {
                if let std::collections::hash_map::Entry::Vacant(e) = edges.entry((*s, id)) {
                    e.insert(hdt.insert_edge(vertex[s], rv)?);
                }
            }
            regions.insert(
                id,
                DecRegion { s1: b_ids.into_iter().collect(), s2: p_ids.into_iter().collect(), rds },
            );
        }

        Ok(Self {
            variant,
            cones,
            backing,
            sites: registry,
            vertex,
            regions,
            s1_of,
            s2_of,
            edges,
            hdt,
            touched: 0,
            last_revealed: Vec::new(),
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// `(region, site)` pairs revealed by the last deletion.
    pub fn last_revealed(&self) -> &[(RegionId, SiteId)] {
        &self.last_revealed
    }

    /// Current `S1` and `S2` of one region.
    pub fn region(&self, id: &RegionId) -> Option<(&BTreeSet<SiteId>, &BTreeSet<SiteId>)> {
        self.regions.get(id).map(|r| (&r.s1, &r.s2))
    }

    pub fn site(&self, id: SiteId) -> Option<&Site> {
        self.sites.get(&id)
    }

    /// The non-empty `S1` and `S2` sets.
    pub fn region_sets(&self) -> RegionSets {
        let mut out = RegionSets::default();
        for (id, r) in &self.regions {
            if !r.s1.is_empty() {
                out.s1.insert(*id, r.s1.clone());
            }
            if !r.s2.is_empty() {
                out.s2.insert(*id, r.s2.clone());
            }
        }
        out
    }

    pub fn membership_totals(&self) -> MembershipTotals {
        totals(&self.region_sets())
    }

    fn drop_edge(&mut self, site: SiteId, id: RegionId) -> Result<(), StructureError> {
        if let Some(h) = self.edges.remove(&(site, id)) {
            self.hdt.delete_edge(h)?;
        }
        Ok(())
    }
}

fn frame_of(backing: &Backing, anchor: Anchor) -> AnchorFrame {
    match (anchor, backing) {
        (Anchor::Cell(c), _) => AnchorFrame::cell(c),
        (Anchor::Path(p), Backing::Tree(t)) => AnchorFrame::path(&t.canonical(p)),
        (Anchor::Path(_), _) => unreachable!("path anchors need a compressed tree"),
    }
}

impl DiskConnectivity for DecrementalConnectivity {
    fn insert(&mut self, _site: Site) -> Result<(), StructureError> {
        Err(StructureError::Unsupported("insertion into the decremental structure"))
    }

    fn delete(&mut self, id: SiteId) -> Result<(), StructureError> {
        if !self.sites.contains_key(&id) {
            return Err(StructureError::UnknownSite(id));
        }
        self.last_revealed.clear();
        // Leave every P side first so a region never resamples for the
        // departing site itself.
        for rid in self.s2_of.remove(&id).unwrap_or_default() {
            self.touched += 1;
            let region = self.regions.get_mut(&rid).expect("region");
            region.s2.remove(&id);
            region.rds.delete_p(id)?;
            self.drop_edge(id, rid)?;
        }
        for rid in self.s1_of.remove(&id).unwrap_or_default() {
            self.touched += 1;
            let region = self.regions.get_mut(&rid).expect("region");
            region.s1.remove(&id);
            let revealed = region.rds.delete_b(id)?;
            let mut orphaned = Vec::new();
            for u in revealed {
                region.s2.remove(&u);
                if !region.s1.contains(&u) {
                    orphaned.push(u);
                }
                self.last_revealed.push((rid, u));
            }
            for u in orphaned {
                self.drop_edge(u, rid)?;
            }
            for &(r, u) in self.last_revealed.iter().filter(|(r, _)| *r == rid) {
                self.s2_of.get_mut(&u).expect("site").remove(&r);
            }
            self.drop_edge(id, rid)?;
        }
        self.sites.remove(&id);
        Ok(())
    }

    fn connected(&mut self, a: SiteId, b: SiteId) -> Result<bool, StructureError> {
        for x in [a, b] {
            if !self.sites.contains_key(&x) {
                return Err(StructureError::UnknownSite(x));
            }
        }
        Ok(self.hdt.connected(self.vertex[&a], self.vertex[&b])?)
    }

    fn len(&self) -> usize {
        self.sites.len()
    }

    fn stats(&self) -> StructureStats {
        StructureStats {
            sites: self.sites.len(),
            vertices: self.hdt.vertex_count(),
            edges: self.hdt.edge_count(),
            touched: self.touched,
            matched_sites: 0,
            reassignments: self.regions.values().map(|r| r.rds.reassignments()).sum(),
        }
    }

    fn audit(&mut self) -> Result<(), String> {
        let live: Vec<Site> = self.sites.values().copied().collect();
        let want = match &self.backing {
            Backing::Forest(f) => {
                f.check_invariants()?;
                let cells: Vec<_> = f.nodes().map(|n| n.cell).collect();
                oracle_regions(&live, AnchorSystem::Cells(&cells), self.cones)
            }
            Backing::Tree(t) => oracle_regions(&live, AnchorSystem::Tree(t), self.cones),
            Backing::Empty => RegionSets::default(),
        };
        compare_sets("decremental", &self.region_sets(), &want)?;
        let mut expected_edges = 0;
        for (id, r) in &self.regions {
            if r.rds.b_len() != r.s1.len() || r.rds.p_len() != r.s2.len() {
                return Err(format!("region {id:?}: reveal structure out of sync"));
            }
            if r.s2.iter().any(|p| !r.rds.contains_p(*p)) {
                return Err(format!("region {id:?}: S2 site missing from the reveal structure"));
            }
            let b_sites: FxHashMap<SiteId, Site> = r.s1.iter().map(|t| (*t, self.sites[t])).collect();
            r.rds.audit(&b_sites).map_err(|e| format!("region {id:?}: {e}"))?;
            for s in r.s1.union(&r.s2) {
                expected_edges += 1;
                if !self.edges.contains_key(&(*s, *id)) {
                    return Err(format!("edge ({s}, {id:?}) is missing"));
                }
            }
        }
        if expected_edges != self.edges.len() || self.edges.len() != self.hdt.edge_count() {
            return Err("edge bookkeeping out of sync".into());
        }
        for (s, regions) in &self.s2_of {
            if regions.iter().any(|r| !self.regions[r].s2.contains(s)) {
                return Err(format!("S2 index of {s} is stale"));
            }
        }
        self.hdt.check_invariants()?;
        let Self { sites, vertex, hdt, .. } = self;
        check_components(sites, |a, b| hdt.connected(vertex[&a], vertex[&b]).expect("live vertices"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn incremental_pair() {
        let mut g = IncrementalConnectivity::new(4.0).unwrap();
        g.insert(Site::at(1, 10.0, 10.0, 1.0)).unwrap();
        g.insert(Site::at(2, 12.5, 10.0, 2.0)).unwrap();
        g.insert(Site::at(3, 30.0, 10.0, 1.0)).unwrap();
        assert!(g.connected(SiteId(1), SiteId(2)).unwrap());
        assert!(!g.connected(SiteId(1), SiteId(3)).unwrap());
        assert!(matches!(g.delete(SiteId(1)), Err(StructureError::Unsupported(_))));
        assert!(matches!(g.insert(Site::at(4, 1.0, 1.0, 5.0)), Err(StructureError::RadiusOutOfRange { .. })));
        g.audit().unwrap();
    }

    #[test]
    fn decremental_singleton_and_errors() {
        for variant in [Variant::Bounded { psi: 2.0 }, Variant::General] {
            let mut g = DecrementalConnectivity::build(&[Site::at(1, 5.0, 5.0, 1.0)], variant, 7).unwrap();
            assert_eq!(g.stats().edges, g.membership_totals().regions);
            assert!(g.connected(SiteId(1), SiteId(1)).unwrap());
            assert!(matches!(g.insert(Site::at(2, 0.0, 0.0, 1.0)), Err(StructureError::Unsupported(_))));
            g.audit().unwrap();
            g.delete(SiteId(1)).unwrap();
            assert_eq!(g.delete(SiteId(1)), Err(StructureError::UnknownSite(SiteId(1))));
            g.audit().unwrap();
        }
        let empty = DecrementalConnectivity::build(&[], Variant::General, 1).unwrap();
        assert!(empty.is_empty());
    }
}
