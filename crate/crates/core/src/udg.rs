//! Fully dynamic connectivity for unit disks.
//!
//! Sites live in level-1 grid cells (diameter 2), so each cell's sites form
//! a clique and only cells within a 5x5 block can hold intersecting sites.
//! Every such pair of cells keeps a maximal bichromatic matching; the proxy
//! graph on non-empty cells has an edge exactly when the matching is
//! non-empty, and a dynamic connectivity structure answers queries on it.

use std::collections::BTreeSet;

use rustc_hash::FxHashMap;

use crate::dynconn::{DynamicConnectivity, EdgeHandle, VertexId};
use crate::envelope::EnvelopeTree;
use crate::geometry::{Site, SiteId};
use crate::grid::{cell_of, neighborhood, CellId};
use crate::mbm::{EnvelopeStore, Matching, MatchingSnapshot, SeparatingFrame, Side};
use crate::structure::{DiskConnectivity, StructureError, StructureStats};

const LEVEL: u32 = 1;
const WINDOW: u32 = 5;

type UnitMatching = Matching<EnvelopeStore<EnvelopeTree>>;

#[derive(Debug)]
struct CellState {
    vertex: VertexId,
    sites: BTreeSet<SiteId>,
}

#[derive(Debug)]
struct PairState {
    matching: UnitMatching,
    edge: Option<EdgeHandle>,
}

/// Pair key with the smaller cell first; the first cell is the `P` side.
fn pair_key(a: CellId, b: CellId) -> (CellId, CellId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn side_in(key: (CellId, CellId), cell: CellId) -> Side {
    if key.0 == cell {
        Side::P
    } else {
        Side::B
    }
}

fn new_matching(key: (CellId, CellId)) -> UnitMatching {
    let frame = SeparatingFrame::between(key.0, key.1).expect("distinct cells");
    Matching::new(
        EnvelopeStore::new(frame, Side::P, 1.0, EnvelopeTree::new(2.0)),
        EnvelopeStore::new(frame, Side::B, 1.0, EnvelopeTree::new(2.0)),
    )
}

#[derive(Debug, Default)]
pub struct UnitDiskConnectivity {
    sites: FxHashMap<SiteId, Site>,
    cells: FxHashMap<CellId, CellState>,
    pairs: FxHashMap<(CellId, CellId), PairState>,
    hdt: DynamicConnectivity,
    touched: u64,
}

impl UnitDiskConnectivity {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.values().filter(|c| !c.sites.is_empty()).count()
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// Proxy edges incident to the cell of `id`.
    pub fn degree(&self, id: SiteId) -> Option<usize> {
        let cell = cell_of(self.sites.get(&id)?.center, LEVEL);
        Some(self.degree_of(cell))
    }

    fn degree_of(&self, cell: CellId) -> usize {
        neighborhood(cell, WINDOW)
            .expect("odd window")
            .into_iter()
            .filter(|&c| c != cell)
            .filter(|&c| self.pairs.get(&pair_key(cell, c)).is_some_and(|p| p.edge.is_some()))
            .count()
    }

    pub fn max_degree(&self) -> usize {
        self.cells.iter().filter(|(_, s)| !s.sites.is_empty()).map(|(&c, _)| self.degree_of(c)).max().unwrap_or(0)
    }

    /// Every live cell-pair matching.
    pub fn matchings(&self) -> Vec<MatchingSnapshot> {
        self.pairs.values().map(|p| p.matching.snapshot()).collect()
    }

    fn vertex(&self, cell: CellId) -> VertexId {
        self.cells[&cell].vertex
    }

    fn sync_edge(&mut self, key: (CellId, CellId)) -> Result<(), StructureError> {
        let (a, b) = (self.vertex(key.0), self.vertex(key.1));
        let pair = self.pairs.get_mut(&key).expect("pair");
        match (pair.matching.is_empty(), pair.edge) {
            (false, None) => pair.edge = Some(self.hdt.insert_edge(a, b)?),
            (true, Some(h)) => {
                self.hdt.delete_edge(h)?;
                pair.edge = None;
            }
            _ => {}
        }
        Ok(())
    }
}

impl DiskConnectivity for UnitDiskConnectivity {
    fn insert(&mut self, site: Site) -> Result<(), StructureError> {
        if site.radius != 1.0 {
            return Err(StructureError::RadiusOutOfRange { id: site.id, radius: site.radius, min: 1.0, max: 1.0 });
        }
        site.check_canonical()?;
        if self.sites.contains_key(&site.id) {
            return Err(StructureError::DuplicateSite(site.id));
        }
        let cell = cell_of(site.center, LEVEL);
        self.sites.insert(site.id, site);
        if !self.cells.contains_key(&cell) {
            let vertex = self.hdt.add_vertex();
            self.cells.insert(cell, CellState { vertex, sites: BTreeSet::new() });
        }
        self.cells.get_mut(&cell).expect("cell").sites.insert(site.id);
        for other in neighborhood(cell, WINDOW)? {
            if other == cell {
                continue;
            }
            self.touched += 1;
            let key = pair_key(cell, other);
            if let Some(pair) = self.pairs.get_mut(&key) {
                pair.matching.insert(side_in(key, cell), &site, &self.sites)?;
            } else {
                let Some(os) = self.cells.get(&other).filter(|c| !c.sites.is_empty()) else {
                    continue;
                };
                let mut matching = new_matching(key);
                for (c, members) in [(other, &os.sites), (cell, &self.cells[&cell].sites)] {
                    for id in members {
                        matching.insert(side_in(key, c), &self.sites[id], &self.sites)?;
                    }
                }
                self.pairs.insert(key, PairState { matching, edge: None });
            }
            self.sync_edge(key)?;
        }
        Ok(())
    }

    fn delete(&mut self, id: SiteId) -> Result<(), StructureError> {
        let site = *self.sites.get(&id).ok_or(StructureError::UnknownSite(id))?;
        let cell = cell_of(site.center, LEVEL);
        for other in neighborhood(cell, WINDOW)? {
            if other == cell {
                continue;
            }
            self.touched += 1;
            let key = pair_key(cell, other);
            if let Some(pair) = self.pairs.get_mut(&key) {
                pair.matching.delete(side_in(key, cell), id, &self.sites)?;
                self.sync_edge(key)?;
            }
        }
        self.cells.get_mut(&cell).expect("cell").sites.remove(&id);
        self.sites.remove(&id);
        Ok(())
    }

    fn connected(&mut self, a: SiteId, b: SiteId) -> Result<bool, StructureError> {
        let sa = self.sites.get(&a).ok_or(StructureError::UnknownSite(a))?;
        let sb = self.sites.get(&b).ok_or(StructureError::UnknownSite(b))?;
        let (ca, cb) = (cell_of(sa.center, LEVEL), cell_of(sb.center, LEVEL));
        if ca == cb {
            return Ok(true);
        }
        Ok(self.hdt.connected(self.vertex(ca), self.vertex(cb))?)
    }

    fn len(&self) -> usize {
        self.sites.len()
    }

    fn stats(&self) -> StructureStats {
        StructureStats {
            sites: self.sites.len(),
            vertices: self.cell_count(),
            edges: self.hdt.edge_count(),
            touched: self.touched,
            matched_sites: self.pairs.values().map(|p| p.matching.site_count()).sum(),
            reassignments: 0,
        }
    }

    fn audit(&mut self) -> Result<(), String> {
        for (key, pair) in &self.pairs {
            pair.matching.audit(&self.sites).map_err(|e| format!("pair {key:?}: {e}"))?;
            if pair.matching.is_empty() == pair.edge.is_some() {
                return Err(format!("pair {key:?}: edge presence disagrees with matching"));
            }
            for (c, side) in [(key.0, Side::P), (key.1, Side::B)] {
                let cell = &self.cells[&c].sites;
                if pair.matching.side_len(side) != cell.len() || cell.iter().any(|id| !pair.matching.contains(*id)) {
                    return Err(format!("pair {key:?}: side {side:?} differs from cell {c:?}"));
                }
            }
        }
        for (&c, state) in &self.cells {
            for id in &state.sites {
                if cell_of(self.sites[id].center, LEVEL) != c {
                    return Err(format!("site {id} filed under the wrong cell"));
                }
            }
            if !state.sites.is_empty() {
                for other in neighborhood(c, WINDOW).map_err(|e| e.to_string())? {
                    let filled = self.cells.get(&other).is_some_and(|o| !o.sites.is_empty());
                    if other != c && filled && !self.pairs.contains_key(&pair_key(c, other)) {
                        return Err(format!("missing pair for {c:?} and {other:?}"));
                    }
                }
            }
            let degree = self.degree_of(c);
            if degree > 24 {
                return Err(format!("cell {c:?} has degree {degree}"));
            }
        }
        self.hdt.check_invariants()
    }
}
