//! Fully dynamic connectivity for disks with radii in `[1, psi]`.
//!
//! Each site is assigned to the grid cell of its own level containing its
//! center, so the sites of one cell form a clique. The proxy graph joins two
//! non-empty cells when some of their sites intersect; a dynamic
//! connectivity structure over it answers queries.
//!
//! For a pair of neighboring cells (the larger one first) the sites of the
//! larger cell are classified against the smaller cell: far (cannot meet any
//! site of it), containing (every possible site of it lies inside), or
//! boundary. Three modes differ in how containing sites are handled:
//!
//! * [`BdgMode::Plain`] keeps them in the pair's matching like boundary
//!   sites.
//! * [`BdgMode::Counting`] counts them per pair instead; the pair has an edge
//!   whenever the count is positive.
//! * [`BdgMode::Representative`] records the disk only at the topmost cells
//!   it fully contains and never visits the cells below. Queries then start
//!   from the largest disk fully containing a cell on the site's root path.

use std::collections::BTreeSet;

use rustc_hash::FxHashMap;

use crate::dynconn::{DynamicConnectivity, EdgeHandle, VertexId};
use crate::geometry::{Site, SiteId};
use crate::grid::{cells_neighboring, level_of_radius, neighborhood, CellId};
use crate::mbm::{AwnnStore, Matching, MatchingSnapshot, Side};
use crate::quadforest::{container_key, QuadForest};
use crate::structure::{DiskConnectivity, StructureError, StructureStats};

/// Same-level window holding every neighboring cell.
const WINDOW: u32 = 13;
/// Window around a higher-level ancestor holding every disk that can fully
/// contain a cell.
const CONTAINER_WINDOW: u32 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BdgMode {
    Plain,
    Counting,
    Representative,
}

/// How a disk relates to the sites a (smaller) cell can hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    /// No site of the cell can meet the disk.
    Far,
    /// Some site of the cell could cross the disk's boundary.
    Boundary,
    /// Every site the cell can hold lies strictly inside the disk.
    Contains,
}

/// Classification against sites with center in `cell` and radius below
/// `2 |cell|`.
pub fn classify(s: &Site, cell: CellId) -> Containment {
    let rect = cell.rect();
    let reach = 2.0 * cell.diameter();
    if rect.dist_to_point(s.center) >= s.radius + reach {
        Containment::Far
    } else if rect.max_corner_dist(s.center) + reach <= s.radius {
        Containment::Contains
    } else {
        Containment::Boundary
    }
}

pub fn fully_contained(cell: CellId, s: &Site) -> bool {
    classify(s, cell) == Containment::Contains
}

/// Pair orientation: higher level first, same level by cell order.
fn orient(a: CellId, b: CellId) -> (CellId, CellId) {
    if a.level > b.level || (a.level == b.level && a < b) {
        (a, b)
    } else {
        (b, a)
    }
}

type PairKey = (CellId, CellId);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Member,
    Counted,
    Skip,
}

#[derive(Debug)]
struct PairState {
    matching: Matching<AwnnStore>,
    counter: u32,
    edge: Option<EdgeHandle>,
}

#[derive(Debug)]
pub struct BoundedDiskConnectivity {
    mode: BdgMode,
    psi: f64,
    forest: QuadForest,
    sites: FxHashMap<SiteId, Site>,
    vertices: FxHashMap<CellId, VertexId>,
    pairs: FxHashMap<PairKey, PairState>,
    hdt: DynamicConnectivity,
    touched: u64,
    last_touched: u64,
}

impl BoundedDiskConnectivity {
    pub fn new(psi: f64, mode: BdgMode) -> Result<Self, StructureError> {
        Ok(Self {
            mode,
            psi,
            forest: QuadForest::for_radius_bound(psi, WINDOW)?,
            sites: FxHashMap::default(),
            vertices: FxHashMap::default(),
            pairs: FxHashMap::default(),
            hdt: DynamicConnectivity::new(),
            touched: 0,
            last_touched: 0,
        })
    }

    pub fn mode(&self) -> BdgMode {
        self.mode
    }

    pub fn forest(&self) -> &QuadForest {
        &self.forest
    }

    /// Cells visited by the most recent update.
    pub fn last_touched(&self) -> u64 {
        self.last_touched
    }

    /// Every live cell-pair matching.
    pub fn matchings(&self) -> Vec<MatchingSnapshot> {
        self.pairs.values().map(|p| p.matching.snapshot()).collect()
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    fn role(&self, u: &Site, key: PairKey) -> Role {
        if key.0.level == key.1.level {
            return Role::Member;
        }
        match (classify(u, key.1), self.mode) {
            (Containment::Far, _) => Role::Skip,
            (Containment::Contains, BdgMode::Counting) => Role::Counted,
            (Containment::Contains, BdgMode::Representative) => Role::Skip,
            _ => Role::Member,
        }
    }

    fn cell_sites(&self, cell: CellId) -> Vec<SiteId> {
        self.forest.get(cell).map(|n| n.sites.iter().copied().collect()).unwrap_or_default()
    }

    fn occupied(&self, cell: CellId) -> bool {
        self.forest.get(cell).is_some_and(|n| !n.sites.is_empty())
    }

    /// Neighboring occupied cells of `sigma` at its level and above.
    fn upper_neighbors(&self, sigma: CellId) -> Vec<CellId> {
        let mut out = Vec::new();
        for level in sigma.level..=self.forest.top_level() {
            let a = sigma.ancestor_at(level);
            for c in neighborhood(a, WINDOW).expect("odd window") {
                if c != sigma && self.occupied(c) && cells_neighboring(&c, &sigma) {
                    out.push(c);
                }
            }
        }
        out
    }

    /// Cells below the level of `sigma` reached from its window, with their
    /// classification against `s`; far cells are omitted. Containing cells
    /// end the descent when `stop_at_contained`; `skip_empty` prunes
    /// subtrees without sites.
    fn lower_cells(&self, s: &Site, sigma: CellId, stop_at_contained: bool, skip_empty: bool) -> Vec<(CellId, Containment)> {
        let mut out = Vec::new();
        let mut stack: Vec<CellId> = Vec::new();
        let push_children = |c: CellId, stack: &mut Vec<CellId>| {
            for child in self.forest.children(c) {
                if !skip_empty || child.subtree_sites > 0 {
                    stack.push(child.cell);
                }
            }
        };
        for w in neighborhood(sigma, WINDOW).expect("odd window") {
            if self.forest.contains(w) {
                push_children(w, &mut stack);
            }
        }
        while let Some(c) = stack.pop() {
            let class = classify(s, c);
            if class == Containment::Far {
                continue;
            }
            out.push((c, class));
            if !(stop_at_contained && class == Containment::Contains) {
                push_children(c, &mut stack);
            }
        }
        out
    }

    fn walk_lower(&self, s: &Site, sigma: CellId) -> Vec<(CellId, Containment)> {
        match self.mode {
            BdgMode::Representative => self.lower_cells(s, sigma, true, false),
            _ => self.lower_cells(s, sigma, false, true),
        }
    }

    /// Existing cells that may hold a disk crossing the boundary of `s`: the
    /// non-far cells of its window and the boundary cells below it.
    pub fn boundary_cells(&self, s: &Site) -> Result<Vec<CellId>, StructureError> {
        let sigma = self.forest.assigned_cell(s)?;
        let mut out: Vec<CellId> = neighborhood(sigma, WINDOW)?
            .into_iter()
            .filter(|&c| self.forest.contains(c) && classify(s, c) != Containment::Far)
            .collect();
        out.extend(
            self.lower_cells(s, sigma, true, false)
                .into_iter()
                .filter(|&(_, k)| k == Containment::Boundary)
                .map(|(c, _)| c),
        );
        Ok(out)
    }

    /// Existing cells fully contained in `s` whose parent is not.
    pub fn topmost_contained_cells(&self, s: &Site) -> Result<Vec<CellId>, StructureError> {
        let sigma = self.forest.assigned_cell(s)?;
        Ok(self
            .lower_cells(s, sigma, true, false)
            .into_iter()
            .filter(|&(_, k)| k == Containment::Contains)
            .map(|(c, _)| c)
            .collect())
    }

    /// The site whose cell stands in for `id` in queries.
    pub fn representative(&self, id: SiteId) -> Result<SiteId, StructureError> {
        let cell = self.forest.cell_of_site(id).ok_or(StructureError::UnknownSite(id))?;
        if self.mode == BdgMode::Representative {
            for c in self.forest.root_path(cell) {
                if let Some(u) = self.forest.get(c).and_then(|n| n.largest_container()) {
                    return Ok(u);
                }
            }
        }
        Ok(id)
    }

    /// Disks fully containing `cell` but not its parent.
    fn containers_of(&self, cell: CellId) -> Vec<SiteId> {
        let mut out = Vec::new();
        for level in (cell.level + 1)..=self.forest.top_level() {
            for w in neighborhood(cell.ancestor_at(level), CONTAINER_WINDOW).expect("odd window") {
                let Some(node) = self.forest.get(w) else { continue };
                for id in &node.sites {
                    let u = &self.sites[id];
                    let topmost = cell.level == self.forest.top_level() || !fully_contained(cell.parent(), u);
                    if topmost && fully_contained(cell, u) {
                        out.push(*id);
                    }
                }
            }
        }
        out
    }

    fn ensure_vertex(&mut self, cell: CellId) -> VertexId {
        if let Some(&v) = self.vertices.get(&cell) {
            return v;
        }
        let v = self.hdt.add_vertex();
        self.vertices.insert(cell, v);
        v
    }

    /// Builds the pair from current cell contents if it has anything to hold.
    fn create_pair(&mut self, key: PairKey) -> Result<(), StructureError> {
        let small = self.cell_sites(key.1);
        if small.is_empty() {
            return Ok(());
        }
        let mut members = Vec::new();
        let mut counter = 0;
        for id in self.cell_sites(key.0) {
            match self.role(&self.sites[&id], key) {
                Role::Member => members.push(id),
                Role::Counted => counter += 1,
                Role::Skip => {}
            }
        }
        if members.is_empty() && counter == 0 {
            return Ok(());
        }
        let mut matching = Matching::new(AwnnStore::new(key.0.diameter()), AwnnStore::new(key.1.diameter()));
        for id in members {
            matching.insert(Side::P, &self.sites[&id], &self.sites)?;
        }
        for id in small {
            matching.insert(Side::B, &self.sites[&id], &self.sites)?;
        }
        self.pairs.insert(key, PairState { matching, counter, edge: None });
        self.sync_pair(key)
    }

    /// Restores the edge invariant of a pair, dropping it once it holds
    /// nothing that can produce an edge.
    fn sync_pair(&mut self, key: PairKey) -> Result<(), StructureError> {
        let Some(pair) = self.pairs.get(&key) else { return Ok(()) };
        let small_empty = pair.matching.side_len(Side::B) == 0;
        let dead = small_empty || (pair.matching.side_len(Side::P) == 0 && pair.counter == 0);
        let want = !dead && (!pair.matching.is_empty() || pair.counter > 0);
        let edge = pair.edge;
        match (want, edge) {
            (true, None) => {
                let (a, b) = (self.vertices[&key.0], self.vertices[&key.1]);
                let h = self.hdt.insert_edge(a, b)?;
                self.pairs.get_mut(&key).expect("pair").edge = Some(h);
            }
            (false, Some(h)) => {
                self.hdt.delete_edge(h)?;
                self.pairs.get_mut(&key).expect("pair").edge = None;
            }
            _ => {}
        }
        if dead {
            self.pairs.remove(&key);
        }
        Ok(())
    }

    /// Adds `s` to an existing pair in the given role, or creates the pair
    /// (which picks `s` up from its cell).
    fn join_pair(&mut self, key: PairKey, s: &Site, side: Side) -> Result<(), StructureError> {
        let role = if side == Side::B { Role::Member } else { self.role(s, key) };
        match self.pairs.get_mut(&key) {
            Some(pair) => {
                match role {
                    Role::Member => {
                        pair.matching.insert(side, s, &self.sites)?;
                    }
                    Role::Counted => pair.counter += 1,
                    Role::Skip => return Ok(()),
                }
                self.sync_pair(key)
            }
            None if role != Role::Skip => self.create_pair(key),
            None => Ok(()),
        }
    }

    fn leave_pair(&mut self, key: PairKey, s: &Site, side: Side) -> Result<(), StructureError> {
        let Some(pair) = self.pairs.get_mut(&key) else { return Ok(()) };
        if pair.matching.contains(s.id) {
            pair.matching.delete(side, s.id, &self.sites)?;
        } else if side == Side::P && self.mode == BdgMode::Counting && classify(s, key.1) == Containment::Contains {
            pair.counter -= 1;
        } else {
            return Ok(());
        }
        self.sync_pair(key)
    }

    fn check_radius(&self, site: &Site) -> Result<(), StructureError> {
        if !(site.radius >= 1.0 && site.radius <= self.psi) {
            return Err(StructureError::RadiusOutOfRange { id: site.id, radius: site.radius, min: 1.0, max: self.psi });
        }
        level_of_radius(site.radius)?;
        Ok(())
    }

    fn audit_pairs(&self) -> Result<(), String> {
        for (&key, pair) in &self.pairs {
            pair.matching.audit(&self.sites).map_err(|e| format!("pair {key:?}: {e}"))?;
            let small = self.cell_sites(key.1);
            let mut members = BTreeSet::new();
            let mut counter = 0;
            for id in self.cell_sites(key.0) {
                match self.role(&self.sites[&id], key) {
                    Role::Member => {
                        members.insert(id);
                    }
                    Role::Counted => counter += 1,
                    Role::Skip => {}
                }
            }
            let p: BTreeSet<SiteId> = pair.matching.members(Side::P).collect();
            let b: BTreeSet<SiteId> = pair.matching.members(Side::B).collect();
            if p != members || b != small.iter().copied().collect() || pair.counter != counter {
                return Err(format!("pair {key:?} holds the wrong sites"));
            }
            let want = !pair.matching.is_empty() || pair.counter > 0;
            if want != pair.edge.is_some() {
                return Err(format!("pair {key:?} edge disagrees with its contents"));
            }
        }
        // Every pair that should exist does.
        let occupied: Vec<CellId> = self.forest.nodes().filter(|n| !n.sites.is_empty()).map(|n| n.cell).collect();
        for &a in &occupied {
            for &b in &occupied {
                if a == b || orient(a, b) != (a, b) || !cells_neighboring(&a, &b) {
                    continue;
                }
                let live = self.cell_sites(a).iter().any(|id| self.role(&self.sites[id], (a, b)) != Role::Skip);
                if live != self.pairs.contains_key(&(a, b)) {
                    return Err(format!("pair ({a:?}, {b:?}) presence is wrong"));
                }
            }
        }
        Ok(())
    }

    fn audit_containers(&self) -> Result<(), String> {
        for node in self.forest.nodes() {
            let c = node.cell;
            let want: BTreeSet<(i64, SiteId)> = self
                .sites
                .values()
                .filter(|u| fully_contained(c, u))
                .filter(|u| c.level == self.forest.top_level() || !fully_contained(c.parent(), u))
                .map(container_key)
                .collect();
            if self.mode == BdgMode::Representative && want != node.containers {
                return Err(format!("containers of {c:?} are wrong"));
            }
            if self.mode != BdgMode::Representative && !node.containers.is_empty() {
                return Err(format!("containers kept at {c:?} outside representative mode"));
            }
        }
        Ok(())
    }
}

impl DiskConnectivity for BoundedDiskConnectivity {
    fn insert(&mut self, site: Site) -> Result<(), StructureError> {
        self.check_radius(&site)?;
        if self.sites.contains_key(&site.id) {
            return Err(StructureError::DuplicateSite(site.id));
        }
        let created = self.forest.insert_site(&site)?;
        let sigma = self.forest.cell_of_site(site.id).expect("just inserted");
        self.sites.insert(site.id, site);
        self.ensure_vertex(sigma);
        let mut touched = created.len() as u64;
        if self.mode == BdgMode::Representative {
            for c in created {
                let ids = self.containers_of(c);
                let keys: Vec<_> = ids.iter().map(|id| container_key(&self.sites[id])).collect();
                self.forest.get_mut(c).expect("created").containers.extend(keys);
            }
        }
        for c in self.upper_neighbors(sigma) {
            touched += 1;
            let key = orient(c, sigma);
            let side = if key.0 == sigma { Side::P } else { Side::B };
            self.join_pair(key, &site, side)?;
        }
        for (c, class) in self.walk_lower(&site, sigma) {
            touched += 1;
            if self.mode == BdgMode::Representative && class == Containment::Contains {
                self.forest.get_mut(c).expect("visited").containers.insert(container_key(&site));
            } else if self.occupied(c) {
                self.join_pair((sigma, c), &site, Side::P)?;
            }
        }
        self.last_touched = touched;
        self.touched += touched;
        Ok(())
    }

    fn delete(&mut self, id: SiteId) -> Result<(), StructureError> {
        let site = *self.sites.get(&id).ok_or(StructureError::UnknownSite(id))?;
        let sigma = self.forest.delete_site(id)?;
        let mut touched = 0;
        for c in self.upper_neighbors(sigma) {
            touched += 1;
            let key = orient(c, sigma);
            let side = if key.0 == sigma { Side::P } else { Side::B };
            self.leave_pair(key, &site, side)?;
        }
        for (c, class) in self.walk_lower(&site, sigma) {
            touched += 1;
            if self.mode == BdgMode::Representative && class == Containment::Contains {
                self.forest.get_mut(c).expect("visited").containers.remove(&container_key(&site));
            } else {
                self.leave_pair((sigma, c), &site, Side::P)?;
            }
        }
        self.sites.remove(&id);
        self.last_touched = touched;
        self.touched += touched;
        Ok(())
    }

    fn connected(&mut self, a: SiteId, b: SiteId) -> Result<bool, StructureError> {
        let (ra, rb) = (self.representative(a)?, self.representative(b)?);
        let ca = self.forest.cell_of_site(ra).expect("live");
        let cb = self.forest.cell_of_site(rb).expect("live");
        if ca == cb {
            return Ok(true);
        }
        Ok(self.hdt.connected(self.vertices[&ca], self.vertices[&cb])?)
    }

    fn len(&self) -> usize {
        self.sites.len()
    }

    fn stats(&self) -> StructureStats {
        StructureStats {
            sites: self.sites.len(),
            vertices: self.vertices.keys().filter(|c| self.occupied(**c)).count(),
            edges: self.hdt.edge_count(),
            touched: self.touched,
            matched_sites: self.pairs.values().map(|p| p.matching.site_count()).sum(),
            reassignments: 0,
        }
    }

    fn audit(&mut self) -> Result<(), String> {
        self.forest.check_invariants()?;
        self.audit_pairs()?;
        self.audit_containers()?;
        self.hdt.check_invariants()
    }
}
