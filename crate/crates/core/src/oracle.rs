//! Brute-force ground truth. Everything here recomputes from the live site
//! set alone and never looks at structure internals.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::geometry::{disks_intersect, Site, SiteId};
use crate::grid::{cell_of, level_of_radius, CellId};
use crate::quadforest::{CanonicalPathId, CompressedQuadtree};
use crate::regions::{s1_region, Anchor, AnchorFrame, ConeCounts, RegionId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("site {0} is not live")]
    UnknownSite(SiteId),
}

/// Component label of every site of the disk graph, by pairwise tests and
/// breadth-first search.
pub fn components(sites: &[Site]) -> FxHashMap<SiteId, usize> {
    let n = sites.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if disks_intersect(&sites[i], &sites[j]) {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if label[v] == usize::MAX {
                    label[v] = next;
                    queue.push_back(v);
                }
            }
        }
        next += 1;
    }
    sites.iter().zip(label).map(|(s, l)| (s.id, l)).collect()
}

pub fn oracle_connected(sites: &[Site], a: SiteId, b: SiteId) -> Result<bool, OracleError> {
    let labels = components(sites);
    let la = labels.get(&a).ok_or(OracleError::UnknownSite(a))?;
    let lb = labels.get(&b).ok_or(OracleError::UnknownSite(b))?;
    Ok(la == lb)
}

/// Sites of `p` that intersect no site of `b`.
pub fn oracle_revealed(b: &[Site], p: &[Site]) -> BTreeSet<SiteId> {
    p.iter().filter(|ps| !b.iter().any(|bs| disks_intersect(ps, bs))).map(|s| s.id).collect()
}

/// Checks that `pairs` is a matching of intersecting (P, B) pairs that no
/// unmatched intersecting pair could extend.
pub fn oracle_mbm_maximal(p: &[Site], b: &[Site], pairs: &[(SiteId, SiteId)]) -> Result<(), String> {
    let pm: FxHashMap<SiteId, &Site> = p.iter().map(|s| (s.id, s)).collect();
    let bm: FxHashMap<SiteId, &Site> = b.iter().map(|s| (s.id, s)).collect();
    let mut used = FxHashSet::default();
    for &(x, y) in pairs {
        let xs = pm.get(&x).ok_or_else(|| format!("{x} is not a P site"))?;
        let ys = bm.get(&y).ok_or_else(|| format!("{y} is not a B site"))?;
        if !used.insert(x) || !used.insert(y) {
            return Err(format!("pair ({x}, {y}) reuses a site"));
        }
        if !disks_intersect(xs, ys) {
            return Err(format!("pair ({x}, {y}) does not intersect"));
        }
    }
    for ps in p.iter().filter(|s| !used.contains(&s.id)) {
        for bs in b.iter().filter(|s| !used.contains(&s.id)) {
            if disks_intersect(ps, bs) {
                return Err(format!("unmatched pair ({}, {}) intersects", ps.id, bs.id));
            }
        }
    }
    Ok(())
}

/// The anchors regions are defined over.
#[derive(Debug, Clone, Copy)]
pub enum AnchorSystem<'a> {
    /// Quadtree cells; a site may join `S2` of a cell containing its center
    /// whose diameter exceeds half its radius.
    Cells(&'a [CellId]),
    /// Canonical paths of a compressed quadtree; a site may join `S2` of the
    /// maximal canonical paths lying on the root path of its cell.
    Tree(&'a CompressedQuadtree),
}

/// Non-empty `S1` and `S2` sets by region.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegionSets {
    pub s1: BTreeMap<RegionId, BTreeSet<SiteId>>,
    pub s2: BTreeMap<RegionId, BTreeSet<SiteId>>,
}

/// Recomputes every region set by testing every site against every anchor.
pub fn oracle_regions(sites: &[Site], anchors: AnchorSystem<'_>, cones: ConeCounts) -> RegionSets {
    let frames: Vec<(Anchor, AnchorFrame)> = match anchors {
        AnchorSystem::Cells(cells) => cells.iter().map(|&c| (Anchor::Cell(c), AnchorFrame::cell(c))).collect(),
        AnchorSystem::Tree(tree) => tree
            .canonical_paths()
            .into_iter()
            .map(|id| (Anchor::Path(id), AnchorFrame::path(&tree.canonical(id))))
            .collect(),
    };
    let mut out = RegionSets::default();
    for &(anchor, frame) in &frames {
        for t in sites {
            if let Some(kind) = s1_region(&frame, cones, t) {
                out.s1.entry(RegionId { anchor, kind }).or_default().insert(t.id);
            }
        }
    }
    let by_id: FxHashMap<SiteId, &Site> = sites.iter().map(|s| (s.id, s)).collect();
    let on_root_path = |tree: &CompressedQuadtree, id: CanonicalPathId, own: CellId| {
        tree.canonical_cells(id).iter().all(|c| c.contains_cell(&own))
    };
    for s in sites {
        let own = cell_of(s.center, level_of_radius(s.radius).expect("radius at least 1"));
        for &(anchor, frame) in &frames {
            let eligible = match (anchor, anchors) {
                (Anchor::Cell(c), _) => c.contains_point(s.center) && s.radius < 2.0 * c.diameter(),
                (Anchor::Path(id), AnchorSystem::Tree(tree)) => {
                    on_root_path(tree, id, own)
                        && (id.node == 1
                            || !on_root_path(tree, CanonicalPathId { path: id.path, node: id.node / 2 }, own))
                }
                (Anchor::Path(_), AnchorSystem::Cells(_)) => false,
            };
            if !eligible {
                continue;
            }
            debug_assert!(frame.smallest.contains_point(s.center));
            for kind in cones.kinds() {
                let region = RegionId { anchor, kind };
                let hit = out.s1.get(&region).is_some_and(|set| set.iter().any(|t| disks_intersect(s, by_id[t])));
                if hit {
                    out.s2.entry(region).or_default().insert(s.id);
                }
            }
        }
    }
    out
}
