//! Regions around anchors, used by the semi-dynamic structures.
//!
//! An anchor is either a single quadtree cell or a canonical path of a
//! compressed quadtree; σ is its smallest cell, τ its largest, and the apex
//! `a(σ)` is the center of σ. Around the apex lie the inner region (the disk
//! of radius |σ|), `d₂` middle regions (cones over the annulus
//! `[|σ|, 5/2|σ|)`) and `d₁` outer regions (cones over the annulus
//! `[5/2|σ|, 5/2|σ| + 2|τ|]`). For a cell anchor τ = σ, so the outer radius
//! is `9/2|σ|`.
//!
//! `S1(A)` holds the sites centered in `A` whose radius fits the anchor;
//! `S2(A)` holds the sites below the anchor that meet some site of `S1(A)`.

use rustc_hash::FxHashSet;
use thiserror::Error;

use crate::geometry::{Point, Site};
use crate::grid::{cell_of, cone_index, level_of_radius, neighborhood, CellId, GridError};
use crate::quadforest::{CanonicalPath, CanonicalPathId, CompressedQuadtree, ForestError, QuadForest};

pub const DEFAULT_D1: u32 = 23;
pub const DEFAULT_D2: u32 = 8;
/// Window of same-level cells holding every anchor of a site's regions.
pub const S1_WINDOW: u32 = 15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error("cone counts d1={d1}, d2={d2} are below the minimum d1=23, d2=8")]
    TooFewCones { d1: u32, d2: u32 },
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Cone counts of the outer (`d1`) and middle (`d2`) regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConeCounts {
    d1: u32,
    d2: u32,
}

impl ConeCounts {
    pub fn new(d1: u32, d2: u32) -> Result<Self, RegionError> {
        if d1 < DEFAULT_D1 || d2 < DEFAULT_D2 {
            return Err(RegionError::TooFewCones { d1, d2 });
        }
        Ok(Self { d1, d2 })
    }

    pub fn d1(&self) -> u32 {
        self.d1
    }

    pub fn d2(&self) -> u32 {
        self.d2
    }

    /// Every region kind of one anchor.
    pub fn kinds(&self) -> impl Iterator<Item = RegionKind> {
        std::iter::once(RegionKind::Inner)
            .chain((0..self.d2).map(RegionKind::Middle))
            .chain((0..self.d1).map(RegionKind::Outer))
    }
}

impl Default for ConeCounts {
    fn default() -> Self {
        Self { d1: DEFAULT_D1, d2: DEFAULT_D2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Anchor {
    Cell(CellId),
    Path(CanonicalPathId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionKind {
    Inner,
    Middle(u32),
    Outer(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegionId {
    pub anchor: Anchor,
    pub kind: RegionKind,
}

/// The cells an anchor's geometry depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnchorFrame {
    pub smallest: CellId,
    pub largest: CellId,
    /// Canonical-path anchors admit radii up to `2|τ|` in every region;
    /// cell anchors admit `[|σ|, 2|σ|)`, closed above for outer regions.
    pub general: bool,
}

impl AnchorFrame {
    pub fn cell(c: CellId) -> Self {
        Self { smallest: c, largest: c, general: false }
    }

    pub fn path(p: &CanonicalPath) -> Self {
        Self { smallest: p.smallest, largest: p.largest, general: true }
    }

    pub fn apex(&self) -> Point {
        self.smallest.center()
    }

    pub fn inner_radius(&self) -> f64 {
        self.smallest.diameter()
    }

    pub fn middle_radius(&self) -> f64 {
        2.5 * self.smallest.diameter()
    }

    pub fn outer_radius(&self) -> f64 {
        2.5 * self.smallest.diameter() + 2.0 * self.largest.diameter()
    }

    /// The region of this anchor containing `p`; a point on the apex is in
    /// the inner region.
    pub fn locate(&self, cones: ConeCounts, p: Point) -> Option<RegionKind> {
        let apex = self.apex();
        let d = apex.dist(p);
        if d < self.inner_radius() {
            Some(RegionKind::Inner)
        } else if d < self.middle_radius() {
            Some(RegionKind::Middle(cone_index(apex, p, cones.d2).expect("off the apex")))
        } else if d <= self.outer_radius() {
            Some(RegionKind::Outer(cone_index(apex, p, cones.d1).expect("off the apex")))
        } else {
            None
        }
    }

    pub fn admits_radius(&self, kind: RegionKind, r: f64) -> bool {
        let lo = self.smallest.diameter();
        if self.general {
            lo <= r && r <= 2.0 * self.largest.diameter()
        } else if matches!(kind, RegionKind::Outer(_)) {
            lo <= r && r <= 2.0 * lo
        } else {
            lo <= r && r < 2.0 * lo
        }
    }
}

/// Whether `t` belongs to `S1` of the region `kind` of the anchor.
pub fn s1_membership(frame: &AnchorFrame, kind: RegionKind, cones: ConeCounts, t: &Site) -> bool {
    if frame.locate(cones, t.center) != Some(kind) || !frame.admits_radius(kind, t.radius) {
        return false;
    }
    match kind {
        RegionKind::Outer(_) => frame.apex().dist(t.center) <= t.radius + frame.middle_radius(),
        _ => true,
    }
}

/// The region of the anchor whose `S1` holds `t`, if any.
pub fn s1_region(frame: &AnchorFrame, cones: ConeCounts, t: &Site) -> Option<RegionKind> {
    let kind = frame.locate(cones, t.center)?;
    s1_membership(frame, kind, cones, t).then_some(kind)
}

/// Cells that may anchor a region with `t` in its `S1`: the 15x15 window
/// around `t`'s cell, plus the window one level down when `r_t` is a power
/// of two (outer regions admit `r_t = 2|σ|`).
pub fn s1_anchor_cells(t: &Site) -> Result<Vec<CellId>, RegionError> {
    let level = level_of_radius(t.radius)?;
    let mut out = neighborhood(cell_of(t.center, level), S1_WINDOW)?;
    if level > 0 && t.radius == (level as f64).exp2() {
        out.extend(neighborhood(cell_of(t.center, level - 1), S1_WINDOW)?);
    }
    Ok(out)
}

/// Regions anchored at forest cells whose `S1` holds `t`.
pub fn s1_regions_bounded(forest: &QuadForest, cones: ConeCounts, t: &Site) -> Result<Vec<RegionId>, RegionError> {
    let mut out = Vec::new();
    for c in s1_anchor_cells(t)? {
        if !forest.contains(c) {
            continue;
        }
        if let Some(kind) = s1_region(&AnchorFrame::cell(c), cones, t) {
            out.push(RegionId { anchor: Anchor::Cell(c), kind });
        }
    }
    Ok(out)
}

/// Canonical paths on the search paths of the tree cells near `t`.
pub fn s1_candidate_paths(tree: &CompressedQuadtree, t: &Site) -> Result<Vec<CanonicalPathId>, RegionError> {
    let mut seen = FxHashSet::default();
    let mut out = Vec::new();
    for c in s1_anchor_cells(t)? {
        if !tree.contains(c) {
            continue;
        }
        for id in tree.canonical_paths_containing(c)? {
            if seen.insert(id) {
                out.push(id);
            }
        }
    }
    Ok(out)
}

/// Regions anchored at canonical paths whose `S1` holds `t`.
pub fn s1_regions_general(
    tree: &CompressedQuadtree,
    cones: ConeCounts,
    t: &Site,
) -> Result<Vec<RegionId>, RegionError> {
    let mut out = Vec::new();
    for id in s1_candidate_paths(tree, t)? {
        if let Some(kind) = s1_region(&AnchorFrame::path(&tree.canonical(id)), cones, t) {
            out.push(RegionId { anchor: Anchor::Path(id), kind });
        }
    }
    Ok(out)
}

/// Anchors whose regions may hold `s` in `S2`: the cells on the root path
/// of `s`'s cell.
pub fn s2_anchors_bounded(forest: &QuadForest, s: &Site) -> Result<Vec<Anchor>, RegionError> {
    let cell = forest.assigned_cell(s)?;
    let path = forest.root_path(cell);
    if path.is_empty() {
        return Err(ForestError::UnknownCell(cell).into());
    }
    Ok(path.into_iter().map(Anchor::Cell).collect())
}

/// Anchors whose regions may hold `s` in `S2`: the canonical paths that
/// decompose the root path of `s`'s cell.
pub fn s2_anchors_general(tree: &CompressedQuadtree, s: &Site) -> Result<Vec<Anchor>, RegionError> {
    let cell = tree.cell_of_site(s.id).ok_or(ForestError::UnknownSite(s.id))?;
    Ok(tree.decompose_root_path(cell)?.into_iter().map(Anchor::Path).collect())
}

/// Every region of the given anchors.
pub fn regions_of(anchors: &[Anchor], cones: ConeCounts) -> Vec<RegionId> {
    anchors.iter().flat_map(|&anchor| cones.kinds().map(move |kind| RegionId { anchor, kind })).collect()
}
