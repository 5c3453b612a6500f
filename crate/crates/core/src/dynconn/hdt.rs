//! Fully dynamic connectivity with polylogarithmic amortized updates.
//!
//! Every edge has a level. Forest `F_i` spans the tree edges of level at
//! least `i`; a tree at level `i` never has more than `n / 2^i` vertices.
//! Deleting a tree edge searches for a replacement from the edge's level
//! downwards, promoting the scanned edges of the smaller side so each edge
//! is charged at most `log n` times.

use rustc_hash::FxHashMap;
use thiserror::Error;

use super::ett::{EttArena, F_LEVEL_EDGE, F_NONTREE};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConnectivityError {
    #[error("unknown vertex {0}")]
    UnknownVertex(u32),
    #[error("edge handle {0} is not live")]
    InvalidEdge(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

/// Identifies one edge instance; parallel edges get distinct handles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeHandle(u32);

#[derive(Debug, Clone)]
struct EdgeRec {
    u: u32,
    v: u32,
    level: usize,
    tree: bool,
    alive: bool,
    /// Arc pairs per forest level for tree edges (index = level).
    arcs: Vec<(u32, u32)>,
    /// Positions in the endpoints' non-tree lists.
    pos_u: u32,
    pos_v: u32,
}

#[derive(Debug, Clone)]
pub struct DynamicConnectivity {
    arena: EttArena,
    /// `vnodes[level][vertex]`.
    vnodes: Vec<Vec<u32>>,
    /// Non-tree edge lists per level, keyed by vertex.
    nontree: Vec<FxHashMap<u32, Vec<u32>>>,
    edges: Vec<EdgeRec>,
    vertex_count: u32,
    capacity: u32,
    live_edges: usize,
}

impl Default for DynamicConnectivity {
    fn default() -> Self {
        Self::new()
    }
}

impl DynamicConnectivity {
    pub fn new() -> Self {
        let mut s = Self {
            arena: EttArena::default(),
            vnodes: Vec::new(),
            nontree: Vec::new(),
            edges: Vec::new(),
            vertex_count: 0,
            capacity: 1,
            live_edges: 0,
        };
        s.push_level();
        s
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count as usize
    }

    pub fn edge_count(&self) -> usize {
        self.live_edges
    }

    pub fn level_count(&self) -> usize {
        self.vnodes.len()
    }

    fn push_level(&mut self) {
        let vs = (0..self.vertex_count).map(|v| self.arena.new_vertex(v)).collect();
        self.vnodes.push(vs);
        self.nontree.push(FxHashMap::default());
    }

    pub fn add_vertex(&mut self) -> VertexId {
        let v = self.vertex_count;
        if v + 1 > self.capacity {
            // Levels run 0..=floor(log2 capacity); doubling adds one empty
            // level and keeps every size bound valid.
            self.capacity *= 2;
            self.push_level();
        }
        self.vertex_count += 1;
        for level in 0..self.vnodes.len() {
            let node = self.arena.new_vertex(v);
            self.vnodes[level].push(node);
        }
        VertexId(v)
    }

    fn check_vertex(&self, v: VertexId) -> Result<u32, ConnectivityError> {
        if v.0 < self.vertex_count {
            Ok(v.0)
        } else {
            Err(ConnectivityError::UnknownVertex(v.0))
        }
    }

    pub fn connected(&mut self, a: VertexId, b: VertexId) -> Result<bool, ConnectivityError> {
        let (a, b) = (self.check_vertex(a)?, self.check_vertex(b)?);
        Ok(self.connected_at(0, a, b))
    }

    fn connected_at(&mut self, level: usize, a: u32, b: u32) -> bool {
        let (na, nb) = (self.vnodes[level][a as usize], self.vnodes[level][b as usize]);
        self.arena.same_tree(na, nb)
    }

    pub fn component_size(&mut self, v: VertexId) -> Result<usize, ConnectivityError> {
        let v = self.check_vertex(v)?;
        Ok(self.arena.tree_size(self.vnodes[0][v as usize]) as usize)
    }

    pub fn insert_edge(&mut self, a: VertexId, b: VertexId) -> Result<EdgeHandle, ConnectivityError> {
        let (u, v) = (self.check_vertex(a)?, self.check_vertex(b)?);
        let id = self.edges.len() as u32;
        self.edges.push(EdgeRec {
            u,
            v,
            level: 0,
            tree: false,
            alive: true,
            arcs: Vec::new(),
            pos_u: 0,
            pos_v: 0,
        });
        self.live_edges += 1;
        if u != v {
            if self.connected_at(0, u, v) {
                self.nontree_add(0, id);
            } else {
                self.edges[id as usize].tree = true;
                self.tree_link(0, id);
            }
        }
        Ok(EdgeHandle(id))
    }

    pub fn delete_edge(&mut self, h: EdgeHandle) -> Result<(), ConnectivityError> {
        let id = h.0;
        match self.edges.get(id as usize) {
            Some(e) if e.alive => {}
            _ => return Err(ConnectivityError::InvalidEdge(id)),
        }
        self.edges[id as usize].alive = false;
        self.live_edges -= 1;
        let (u, v, level, tree) = {
            let e = &self.edges[id as usize];
            (e.u, e.v, e.level, e.tree)
        };
        if u == v {
            return Ok(());
        }
        if !tree {
            self.nontree_remove(level, id);
            return Ok(());
        }
        let arcs = std::mem::take(&mut self.edges[id as usize].arcs);
        for (a1, a2) in arcs {
            self.arena.cut(a1, a2);
        }
        for i in (0..=level).rev() {
            if self.replace(i, u, v) {
                break;
            }
        }
        Ok(())
    }

    fn tree_link(&mut self, level: usize, id: u32) {
        let (u, v) = (self.edges[id as usize].u, self.edges[id as usize].v);
        let a1 = self.arena.new_arc(id);
        let a2 = self.arena.new_arc(id);
        if self.edges[id as usize].level == level {
            self.arena.set_flag(a1, F_LEVEL_EDGE, true);
        }
        let (nu, nv) = (self.vnodes[level][u as usize], self.vnodes[level][v as usize]);
        self.arena.link(nu, nv, a1, a2);
        debug_assert_eq!(self.edges[id as usize].arcs.len(), level);
        self.edges[id as usize].arcs.push((a1, a2));
    }

    fn nontree_add(&mut self, level: usize, id: u32) {
        let (u, v) = (self.edges[id as usize].u, self.edges[id as usize].v);
        for (x, is_u) in [(u, true), (v, false)] {
            let list = self.nontree[level].entry(x).or_default();
            list.push(id);
            let pos = (list.len() - 1) as u32;
            let became_nonempty = list.len() == 1;
            if is_u {
                self.edges[id as usize].pos_u = pos;
            } else {
                self.edges[id as usize].pos_v = pos;
            }
            if became_nonempty {
                let node = self.vnodes[level][x as usize];
                self.arena.set_flag(node, F_NONTREE, true);
            }
        }
    }

    fn nontree_remove(&mut self, level: usize, id: u32) {
        let (u, v) = (self.edges[id as usize].u, self.edges[id as usize].v);
        for (x, is_u) in [(u, true), (v, false)] {
            let pos = if is_u { self.edges[id as usize].pos_u } else { self.edges[id as usize].pos_v };
            let list = self.nontree[level].get_mut(&x).expect("non-tree list");
            debug_assert_eq!(list[pos as usize], id);
            list.swap_remove(pos as usize);
            let moved = list.get(pos as usize).copied();
            let now_empty = list.is_empty();
            if now_empty {
                self.nontree[level].remove(&x);
                let node = self.vnodes[level][x as usize];
                self.arena.set_flag(node, F_NONTREE, false);
            }
            if let Some(m) = moved {
                let e = &mut self.edges[m as usize];
                if e.u == x {
                    e.pos_u = pos;
                } else {
                    e.pos_v = pos;
                }
            }
        }
    }

    /// Looks for a replacement for a deleted tree edge between the trees of
    /// `u` and `v` at `level`.
    fn replace(&mut self, level: usize, u: u32, v: u32) -> bool {
        let nu = self.vnodes[level][u as usize];
        let nv = self.vnodes[level][v as usize];
        let small = if self.arena.tree_size(nu) <= self.arena.tree_size(nv) { u } else { v };
        let small_node = self.vnodes[level][small as usize];

        while let Some(arc) = self.arena.find_flag(small_node, F_LEVEL_EDGE) {
            let id = self.arena.payload(arc);
            self.arena.set_flag(arc, F_LEVEL_EDGE, false);
            self.edges[id as usize].level = level + 1;
            debug_assert!(level + 1 < self.vnodes.len(), "tree level overflow");
            self.tree_link(level + 1, id);
        }

        while let Some(xnode) = self.arena.find_flag(small_node, F_NONTREE) {
            let x = self.arena.payload(xnode);
            while let Some(&f) = self.nontree[level].get(&x).and_then(|l| l.last()) {
                let e = &self.edges[f as usize];
                let y = if e.u == x { e.v } else { e.u };
                self.nontree_remove(level, f);
                if self.connected_at(level, x, y) {
                    self.edges[f as usize].level = level + 1;
                    self.nontree_add(level + 1, f);
                } else {
                    self.edges[f as usize].tree = true;
                    for j in 0..=level {
                        self.tree_link(j, f);
                    }
                    return true;
                }
            }
        }
        false
    }

    /// Verifies the level invariants. Linear in the structure size; meant for
    /// tests and audits.
    pub fn check_invariants(&mut self) -> Result<(), String> {
        let n = self.vertex_count;
        for level in 0..self.vnodes.len() {
            let bound = n >> level;
            for v in 0..n {
                let node = self.vnodes[level][v as usize];
                let size = self.arena.tree_size(node);
                if size > bound.max(1) {
                    return Err(format!("level {level}: tree of {v} has {size} > {bound} vertices"));
                }
                let has = self.nontree[level].get(&v).is_some_and(|l| !l.is_empty());
                if self.arena.has_flag(node, F_NONTREE) != has {
                    return Err(format!("level {level}: stale non-tree flag on {v}"));
                }
            }
        }
        for id in 0..self.edges.len() {
            let e = self.edges[id].clone();
            if !e.alive || e.u == e.v {
                continue;
            }
            if e.tree {
                if e.arcs.len() != e.level + 1 {
                    return Err(format!("edge {id}: {} arc levels for level {}", e.arcs.len(), e.level));
                }
                for j in 0..=e.level {
                    if !self.connected_at(j, e.u, e.v) {
                        return Err(format!("edge {id}: tree edge split at level {j}"));
                    }
                }
            } else {
                if !self.connected_at(e.level, e.u, e.v) {
                    return Err(format!("edge {id}: non-tree edge crosses trees at level {}", e.level));
                }
                for (x, pos) in [(e.u, e.pos_u), (e.v, e.pos_v)] {
                    let ok = self.nontree[e.level].get(&x).and_then(|l| l.get(pos as usize)) == Some(&(id as u32));
                    if !ok {
                        return Err(format!("edge {id}: bad list position at {x}"));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_and_cycle() {
        let mut g = DynamicConnectivity::new();
        let v: Vec<VertexId> = (0..4).map(|_| g.add_vertex()).collect();
        let e01 = g.insert_edge(v[0], v[1]).unwrap();
        let _e12 = g.insert_edge(v[1], v[2]).unwrap();
        let e23 = g.insert_edge(v[2], v[3]).unwrap();
        let e30 = g.insert_edge(v[3], v[0]).unwrap();
        assert!(g.connected(v[0], v[2]).unwrap());
        g.delete_edge(e01).unwrap();
        assert!(g.connected(v[0], v[1]).unwrap());
        g.delete_edge(e23).unwrap();
        assert!(!g.connected(v[0], v[1]).unwrap());
        assert!(g.connected(v[0], v[3]).unwrap());
        g.delete_edge(e30).unwrap();
        assert!(!g.connected(v[0], v[3]).unwrap());
        g.check_invariants().unwrap();
    }

    #[test]
    fn parallel_edges_have_distinct_handles() {
        let mut g = DynamicConnectivity::new();
        let (a, b) = (g.add_vertex(), g.add_vertex());
        let h1 = g.insert_edge(a, b).unwrap();
        let h2 = g.insert_edge(a, b).unwrap();
        assert_ne!(h1, h2);
        g.delete_edge(h1).unwrap();
        assert!(g.connected(a, b).unwrap());
        g.delete_edge(h2).unwrap();
        assert!(!g.connected(a, b).unwrap());
        assert_eq!(g.delete_edge(h2), Err(ConnectivityError::InvalidEdge(1)));
    }

    #[test]
    fn unknown_vertex_is_an_error() {
        let mut g = DynamicConnectivity::new();
        let a = g.add_vertex();
        assert!(g.insert_edge(a, VertexId(7)).is_err());
    }
}
