use std::cmp::Reverse;

use rustc_hash::FxHashMap;

use super::ForestError;
use crate::geometry::{Site, SiteId};
use crate::grid::{cell_of, level_of_radius, neighborhood, CellId};

/// Spreads the low 64 bits of `v` to the even bit positions of a `u128`.
fn spread(v: u64) -> u128 {
    let mut x = v as u128;
    x = (x | (x << 32)) & 0x0000_0000_FFFF_FFFF_0000_0000_FFFF_FFFF;
    x = (x | (x << 16)) & 0x0000_FFFF_0000_FFFF_0000_FFFF_0000_FFFF;
    x = (x | (x << 8)) & 0x00FF_00FF_00FF_00FF_00FF_00FF_00FF_00FF;
    x = (x | (x << 4)) & 0x0F0F_0F0F_0F0F_0F0F_0F0F_0F0F_0F0F_0F0F;
    x = (x | (x << 2)) & 0x3333_3333_3333_3333_3333_3333_3333_3333;
    x = (x | (x << 1)) & 0x5555_5555_5555_5555_5555_5555_5555_5555;
    x
}

/// Level-0 index of the cell's lower-left corner.
fn corner(c: CellId) -> (u64, u64) {
    ((c.ix as u64) << c.level, (c.iy as u64) << c.level)
}

/// Preorder key: Z-order of the corner, larger cells first on ties.
fn preorder_key(c: CellId) -> (u128, Reverse<u32>) {
    let (x, y) = corner(c);
    (spread(x) | (spread(y) << 1), Reverse(c.level))
}

/// Smallest grid cell containing both cells.
fn lowest_common_cell(a: CellId, b: CellId) -> CellId {
    let ((ax, ay), (bx, by)) = (corner(a), corner(b));
    let bits = 64 - ((ax ^ bx) | (ay ^ by)).leading_zeros();
    let level = bits.max(a.level).max(b.level);
    CellId::new(level, (ax >> level) as i64, (ay >> level) as i64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalPathId {
    pub path: u32,
    /// Node of the path's balanced tree, numbered as an implicit heap (root 1).
    pub node: u32,
}

/// The contiguous run of a heavy path below one balanced-tree node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalPath {
    pub id: CanonicalPathId,
    pub smallest: CellId,
    pub largest: CellId,
    /// Half-open index range into the heavy path.
    pub range: (usize, usize),
}

/// A maximal chain of heavy edges, smallest cell first.
#[derive(Debug, Clone)]
pub struct HeavyPath {
    pub cells: Vec<CellId>,
    /// Parent of the largest cell, if any.
    pub parent: Option<CellId>,
}

#[derive(Debug, Clone)]
struct Node {
    cell: CellId,
    parent: Option<u32>,
    children: Vec<u32>,
    sites: Vec<SiteId>,
    size: u32,
}

/// Static compressed quadtree whose nodes include the `k x k` neighborhood
/// of every site's cell, with a heavy-path decomposition.
#[derive(Debug, Clone)]
pub struct CompressedQuadtree {
    nodes: Vec<Node>,
    index: FxHashMap<CellId, u32>,
    site_cell: FxHashMap<SiteId, CellId>,
    paths: Vec<HeavyPath>,
    path_of: Vec<(u32, u32)>,
}

/// Builds the tree over `sites` with `k x k` neighborhoods. The required
/// cells are closed under lowest common cells of Z-order neighbors, which
/// is the smallest node set containing them in which every branching cell is
/// present.
pub fn build_compressed(sites: &[Site], k: u32) -> Result<CompressedQuadtree, ForestError> {
    let mut site_cell = FxHashMap::default();
    let mut required = Vec::new();
    for s in sites {
        s.check_canonical()?;
        let cell = cell_of(s.center, level_of_radius(s.radius)?);
        if site_cell.insert(s.id, cell).is_some() {
            return Err(ForestError::DuplicateSite(s.id));
        }
        required.extend(neighborhood(cell, k)?);
    }
    required.sort_unstable_by_key(|&c| preorder_key(c));
    required.dedup();
    let closure: Vec<CellId> = required.windows(2).map(|w| lowest_common_cell(w[0], w[1])).collect();
    required.extend(closure);
    required.sort_unstable_by_key(|&c| preorder_key(c));
    required.dedup();

    let mut nodes: Vec<Node> = Vec::with_capacity(required.len());
    let mut index = FxHashMap::default();
    let mut stack: Vec<u32> = Vec::new();
    for cell in required {
        while let Some(&top) = stack.last() {
            if nodes[top as usize].cell.contains_cell(&cell) {
                break;
            }
            stack.pop();
        }
        let id = nodes.len() as u32;
        let parent = stack.last().copied();
        if let Some(p) = parent {
            nodes[p as usize].children.push(id);
        }
        debug_assert!(parent.is_some() || id == 0, "closure has a single root");
        nodes.push(Node { cell, parent, children: Vec::new(), sites: Vec::new(), size: 1 });
        index.insert(cell, id);
        stack.push(id);
    }
    for s in sites {
        nodes[index[&site_cell[&s.id]] as usize].sites.push(s.id);
    }
    // Preorder: children follow their parent.
    for i in (1..nodes.len()).rev() {
        let p = nodes[i].parent.expect("non-root") as usize;
        nodes[p].size += nodes[i].size;
    }
    let mut tree = CompressedQuadtree { nodes, index, site_cell, paths: Vec::new(), path_of: Vec::new() };
    tree.decompose();
    Ok(tree)
}

impl CompressedQuadtree {
    fn decompose(&mut self) {
        self.path_of = vec![(u32::MAX, 0); self.nodes.len()];
        for head in 0..self.nodes.len() {
            let is_head = match self.nodes[head].parent {
                None => true,
                Some(p) => self.heavy_child(p as usize) != Some(head as u32),
            };
            if !is_head {
                continue;
            }
            let mut chain = vec![head as u32];
            while let Some(h) = self.heavy_child(*chain.last().expect("non-empty") as usize) {
                chain.push(h);
            }
            chain.reverse();
            let pid = self.paths.len() as u32;
            for (pos, &n) in chain.iter().enumerate() {
                self.path_of[n as usize] = (pid, pos as u32);
            }
            self.paths.push(HeavyPath {
                cells: chain.iter().map(|&n| self.nodes[n as usize].cell).collect(),
                parent: self.nodes[head].parent.map(|p| self.nodes[p as usize].cell),
            });
        }
    }

    /// Child with the largest subtree; the first such in Z-order.
    fn heavy_child(&self, n: usize) -> Option<u32> {
        let mut best: Option<u32> = None;
        for &c in &self.nodes[n].children {
            if best.is_none_or(|b| self.nodes[c as usize].size > self.nodes[b as usize].size) {
                best = Some(c);
            }
        }
        best
    }

    pub fn cell_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> CellId {
        self.nodes[0].cell
    }

    pub fn contains(&self, cell: CellId) -> bool {
        self.index.contains_key(&cell)
    }

    pub fn cells(&self) -> impl Iterator<Item = CellId> + '_ {
        self.nodes.iter().map(|n| n.cell)
    }

    fn node(&self, cell: CellId) -> Result<&Node, ForestError> {
        self.index.get(&cell).map(|&i| &self.nodes[i as usize]).ok_or(ForestError::UnknownCell(cell))
    }

    pub fn parent(&self, cell: CellId) -> Result<Option<CellId>, ForestError> {
        Ok(self.node(cell)?.parent.map(|p| self.nodes[p as usize].cell))
    }

    pub fn children(&self, cell: CellId) -> Result<Vec<CellId>, ForestError> {
        Ok(self.node(cell)?.children.iter().map(|&c| self.nodes[c as usize].cell).collect())
    }

    pub fn sites_in(&self, cell: CellId) -> Result<&[SiteId], ForestError> {
        Ok(&self.node(cell)?.sites)
    }

    pub fn cell_of_site(&self, id: SiteId) -> Option<CellId> {
        self.site_cell.get(&id).copied()
    }

    /// Cells from the root down to `cell` (inclusive).
    pub fn root_path(&self, cell: CellId) -> Result<Vec<CellId>, ForestError> {
        let mut cur = Some(*self.index.get(&cell).ok_or(ForestError::UnknownCell(cell))?);
        let mut out = Vec::new();
        while let Some(n) = cur {
            out.push(self.nodes[n as usize].cell);
            cur = self.nodes[n as usize].parent;
        }
        out.reverse();
        Ok(out)
    }

    pub fn heavy_paths(&self) -> &[HeavyPath] {
        &self.paths
    }

    /// Heavy path index and position of `cell` on it.
    pub fn path_position(&self, cell: CellId) -> Result<(u32, usize), ForestError> {
        let i = *self.index.get(&cell).ok_or(ForestError::UnknownCell(cell))?;
        let (p, pos) = self.path_of[i as usize];
        Ok((p, pos as usize))
    }

    /// Index range covered by a balanced-tree node of a path of length `m`.
    fn node_range(node: u32, m: usize) -> (usize, usize) {
        let (mut lo, mut hi) = (0, m);
        let depth = 31 - node.leading_zeros();
        for bit in (0..depth).rev() {
            let mid = (lo + hi) / 2;
            if node >> bit & 1 == 0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo, hi)
    }

    pub fn canonical(&self, id: CanonicalPathId) -> CanonicalPath {
        let cells = &self.paths[id.path as usize].cells;
        let range = Self::node_range(id.node, cells.len());
        CanonicalPath { id, smallest: cells[range.0], largest: cells[range.1 - 1], range }
    }

    pub fn canonical_cells(&self, id: CanonicalPathId) -> &[CellId] {
        let cells = &self.paths[id.path as usize].cells;
        let (lo, hi) = Self::node_range(id.node, cells.len());
        &cells[lo..hi]
    }

    /// Every canonical path of every heavy path.
    pub fn canonical_paths(&self) -> Vec<CanonicalPathId> {
        fn walk(path: u32, node: u32, lo: usize, hi: usize, out: &mut Vec<CanonicalPathId>) {
            out.push(CanonicalPathId { path, node });
            if hi - lo > 1 {
                let mid = (lo + hi) / 2;
                walk(path, 2 * node, lo, mid, out);
                walk(path, 2 * node + 1, mid, hi, out);
            }
        }
        let mut out = Vec::new();
        for (i, p) in self.paths.iter().enumerate() {
            walk(i as u32, 1, 0, p.cells.len(), &mut out);
        }
        out
    }

    /// Balanced-tree nodes of `cell`'s heavy path whose run contains `cell`,
    /// from the root of that tree down to the leaf.
    pub fn canonical_paths_containing(&self, cell: CellId) -> Result<Vec<CanonicalPathId>, ForestError> {
        let (path, pos) = self.path_position(cell)?;
        let m = self.paths[path as usize].cells.len();
        let (mut node, mut lo, mut hi) = (1u32, 0, m);
        let mut out = vec![CanonicalPathId { path, node }];
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if pos < mid {
                node *= 2;
                hi = mid;
            } else {
                node = 2 * node + 1;
                lo = mid;
            }
            out.push(CanonicalPathId { path, node });
        }
        Ok(out)
    }

    /// Splits the root-to-`cell` path into disjoint canonical paths.
    pub fn decompose_root_path(&self, cell: CellId) -> Result<Vec<CanonicalPathId>, ForestError> {
        fn suffix(path: u32, node: u32, lo: usize, hi: usize, from: usize, out: &mut Vec<CanonicalPathId>) {
            if from <= lo {
                out.push(CanonicalPathId { path, node });
                return;
            }
            let mid = (lo + hi) / 2;
            if from < mid {
                suffix(path, 2 * node, lo, mid, from, out);
            }
            suffix(path, 2 * node + 1, mid, hi, from, out);
        }
        let mut out = Vec::new();
        let mut cur = Some(cell);
        while let Some(c) = cur {
            let (path, pos) = self.path_position(c)?;
            let hp = &self.paths[path as usize];
            suffix(path, 1, 0, hp.cells.len(), pos, &mut out);
            cur = hp.parent;
        }
        Ok(out)
    }
}
