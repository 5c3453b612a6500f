use std::collections::{BTreeMap, BTreeSet};

use rustc_hash::FxHashMap;

use super::ForestError;
use crate::geometry::{Site, SiteId};
use crate::grid::{cell_of, level_of_radius, neighborhood, CellId};
use crate::util::ordered_key;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

/// Neighbor slot order: W, E, S, N, SW, NE, SE, NW; slot `i ^ 1` is the
/// opposite of slot `i`.
const NEIGHBOR_OFFSETS: [(i64, i64); 8] = [(-1, 0), (1, 0), (0, -1), (0, 1), (-1, -1), (1, 1), (1, -1), (-1, 1)];

#[derive(Debug, Clone)]
pub struct QuadNode {
    pub cell: CellId,
    pub parent: Option<NodeId>,
    pub children: [Option<NodeId>; 4],
    pub neighbors: [Option<NodeId>; 8],
    /// Sites assigned to this cell.
    pub sites: BTreeSet<SiteId>,
    /// Sites assigned to this cell or any descendant.
    pub subtree_sites: usize,
    /// Disks that fully contain this cell but not its parent, keyed by
    /// radius so the last entry is the largest.
    pub containers: BTreeSet<(i64, SiteId)>,
}

impl QuadNode {
    pub fn largest_container(&self) -> Option<SiteId> {
        self.containers.last().map(|&(_, id)| id)
    }
}

pub(crate) fn container_key(site: &Site) -> (i64, SiteId) {
    (ordered_key(site.radius), site.id)
}

/// Uncompressed quadtrees over the lowest `top_level + 1` grid levels, one
/// per occupied top-level cell. Every inserted site brings its `k x k`
/// same-level neighborhood and all ancestors into the forest. Cells are
/// never removed.
#[derive(Debug, Clone)]
pub struct QuadForest {
    top_level: u32,
    k: u32,
    nodes: Vec<QuadNode>,
    index: FxHashMap<CellId, NodeId>,
    roots: BTreeMap<(i64, i64), NodeId>,
    site_cell: FxHashMap<SiteId, CellId>,
}

impl QuadForest {
    pub fn new(top_level: u32, k: u32) -> Result<Self, ForestError> {
        if k % 2 == 0 {
            return Err(ForestError::Grid(crate::grid::GridError::EvenNeighborhood(k)));
        }
        Ok(Self {
            top_level,
            k,
            nodes: Vec::new(),
            index: FxHashMap::default(),
            roots: BTreeMap::new(),
            site_cell: FxHashMap::default(),
        })
    }

    /// Forest for radii in `[1, psi]`.
    pub fn for_radius_bound(psi: f64, k: u32) -> Result<Self, ForestError> {
        Self::new(level_of_radius(psi)?, k)
    }

    pub fn top_level(&self) -> u32 {
        self.top_level
    }

    pub fn neighborhood_size(&self) -> u32 {
        self.k
    }

    pub fn cell_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn site_count(&self) -> usize {
        self.site_cell.len()
    }

    pub fn roots(&self) -> impl Iterator<Item = &QuadNode> + '_ {
        self.roots.values().map(|&n| &self.nodes[n.0 as usize])
    }

    pub fn nodes(&self) -> impl Iterator<Item = &QuadNode> + '_ {
        self.nodes.iter()
    }

    pub fn node(&self, id: NodeId) -> &QuadNode {
        &self.nodes[id.0 as usize]
    }

    pub fn node_id(&self, cell: CellId) -> Option<NodeId> {
        self.index.get(&cell).copied()
    }

    pub fn get(&self, cell: CellId) -> Option<&QuadNode> {
        self.index.get(&cell).map(|&n| &self.nodes[n.0 as usize])
    }

    pub fn get_mut(&mut self, cell: CellId) -> Option<&mut QuadNode> {
        let n = *self.index.get(&cell)?;
        Some(&mut self.nodes[n.0 as usize])
    }

    pub fn contains(&self, cell: CellId) -> bool {
        self.index.contains_key(&cell)
    }

    pub fn cell_of_site(&self, id: SiteId) -> Option<CellId> {
        self.site_cell.get(&id).copied()
    }

    /// Level-`level_of_radius(r)` cell of a site, validated against the
    /// forest's radius bound.
    pub fn assigned_cell(&self, site: &Site) -> Result<CellId, ForestError> {
        site.check_canonical()?;
        let level = level_of_radius(site.radius)?;
        if level > self.top_level {
            return Err(ForestError::RadiusAboveBound { radius: site.radius, top_level: self.top_level });
        }
        Ok(cell_of(site.center, level))
    }

    /// Creates `cell` and its missing ancestors; returns its node.
    pub fn ensure_cell(&mut self, cell: CellId, created: &mut Vec<CellId>) -> NodeId {
        if let Some(&n) = self.index.get(&cell) {
            return n;
        }
        debug_assert!(cell.level <= self.top_level && cell.ix >= 0 && cell.iy >= 0);
        let parent = (cell.level < self.top_level).then(|| self.ensure_cell(cell.parent(), created));
        let id = NodeId(self.nodes.len() as u32);
        let mut neighbors = [None; 8];
        for (slot, (dx, dy)) in NEIGHBOR_OFFSETS.iter().enumerate() {
            let nc = CellId::new(cell.level, cell.ix + dx, cell.iy + dy);
            if let Some(&nid) = self.index.get(&nc) {
                neighbors[slot] = Some(nid);
                self.nodes[nid.0 as usize].neighbors[slot ^ 1] = Some(id);
            }
        }
        self.nodes.push(QuadNode {
            cell,
            parent,
            children: [None; 4],
            neighbors,
            sites: BTreeSet::new(),
            subtree_sites: 0,
            containers: BTreeSet::new(),
        });
        self.index.insert(cell, id);
        match parent {
            Some(p) => self.nodes[p.0 as usize].children[cell.quadrant_in_parent()] = Some(id),
            None => {
                self.roots.insert((cell.ix, cell.iy), id);
            }
        }
        created.push(cell);
        id
    }

    /// Registers a site and creates its neighborhood; returns the cells
    /// created, ancestors before descendants.
    pub fn insert_site(&mut self, site: &Site) -> Result<Vec<CellId>, ForestError> {
        if self.site_cell.contains_key(&site.id) {
            return Err(ForestError::DuplicateSite(site.id));
        }
        let cell = self.assigned_cell(site)?;
        let mut created = Vec::new();
        for c in neighborhood(cell, self.k)? {
            self.ensure_cell(c, &mut created);
        }
        let mut cur = self.index.get(&cell).copied();
        self.nodes[cur.expect("assigned cell").0 as usize].sites.insert(site.id);
        while let Some(n) = cur {
            self.nodes[n.0 as usize].subtree_sites += 1;
            cur = self.nodes[n.0 as usize].parent;
        }
        self.site_cell.insert(site.id, cell);
        Ok(created)
    }

    pub fn delete_site(&mut self, id: SiteId) -> Result<CellId, ForestError> {
        let cell = self.site_cell.remove(&id).ok_or(ForestError::UnknownSite(id))?;
        let mut cur = self.index.get(&cell).copied();
        self.nodes[cur.expect("assigned cell").0 as usize].sites.remove(&id);
        while let Some(n) = cur {
            self.nodes[n.0 as usize].subtree_sites -= 1;
            cur = self.nodes[n.0 as usize].parent;
        }
        Ok(cell)
    }

    /// Cells from the root down to `cell` (inclusive); empty if absent.
    pub fn root_path(&self, cell: CellId) -> Vec<CellId> {
        let mut path = Vec::new();
        let mut cur = self.index.get(&cell).copied();
        while let Some(n) = cur {
            path.push(self.nodes[n.0 as usize].cell);
            cur = self.nodes[n.0 as usize].parent;
        }
        path.reverse();
        path
    }

    pub fn children(&self, cell: CellId) -> impl Iterator<Item = &QuadNode> + '_ {
        self.get(cell)
            .into_iter()
            .flat_map(|n| n.children.iter().flatten())
            .map(|c| &self.nodes[c.0 as usize])
    }

    /// Structural self-check: links, nesting and subtree counts.
    pub fn check_invariants(&self) -> Result<(), String> {
        for (i, n) in self.nodes.iter().enumerate() {
            let id = NodeId(i as u32);
            if self.index.get(&n.cell) != Some(&id) {
                return Err(format!("{:?} not indexed", n.cell));
            }
            match n.parent {
                Some(p) => {
                    let pn = &self.nodes[p.0 as usize];
                    if pn.cell != n.cell.parent() || pn.children[n.cell.quadrant_in_parent()] != Some(id) {
                        return Err(format!("{:?} has a broken parent link", n.cell));
                    }
                }
                None => {
                    if n.cell.level != self.top_level {
                        return Err(format!("{:?} is a root below the top level", n.cell));
                    }
                }
            }
            let below: usize = n.children.iter().flatten().map(|c| self.nodes[c.0 as usize].subtree_sites).sum();
            if n.subtree_sites != below + n.sites.len() {
                return Err(format!("{:?} subtree count {} != {}", n.cell, n.subtree_sites, below + n.sites.len()));
            }
            for (slot, (dx, dy)) in NEIGHBOR_OFFSETS.iter().enumerate() {
                let expect = self.index.get(&CellId::new(n.cell.level, n.cell.ix + dx, n.cell.iy + dy)).copied();
                if n.neighbors[slot] != expect {
                    return Err(format!("{:?} neighbor slot {slot} stale", n.cell));
                }
            }
        }
        Ok(())
    }
}
