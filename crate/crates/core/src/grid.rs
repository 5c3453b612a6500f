//! The hierarchical grid.
//!
//! A level-`i` cell is an axis-parallel square of diameter `2^i`. Indices are
//! computed in a frame scaled by `sqrt(2)`, where the cell side is exactly
//! `2^i`; scaling by a power of two is exact in floating point, so a point's
//! level-`i+1` index is always its level-`i` index halved. All distances are
//! still measured in the original frame.

use std::f64::consts::{PI, SQRT_2};

use thiserror::Error;

use crate::geometry::Point;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("radius {0} is below 1; normalize the input first")]
    RadiusBelowOne(f64),
    #[error("neighborhood size must be odd, got {0}")]
    EvenNeighborhood(u32),
    #[error("cone index is undefined at the apex")]
    ApexQuery,
    #[error("cone count must be positive")]
    NoCones,
}

/// A cell of the hierarchical grid. The derived order (level, ix, iy) is the
/// canonical order used to orient cell pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellId {
    pub level: u32,
    pub ix: i64,
    pub iy: i64,
}

impl CellId {
    pub const fn new(level: u32, ix: i64, iy: i64) -> Self {
        Self { level, ix, iy }
    }

    /// Diameter `|σ| = 2^level`.
    pub fn diameter(&self) -> f64 {
        diameter(self.level)
    }

    pub fn side(&self) -> f64 {
        self.diameter() / SQRT_2
    }

    pub fn center(&self) -> Point {
        let s = self.side();
        Point::new((self.ix as f64 + 0.5) * s, (self.iy as f64 + 0.5) * s)
    }

    pub fn rect(&self) -> Rect {
        let s = self.side();
        Rect {
            x0: self.ix as f64 * s,
            y0: self.iy as f64 * s,
            x1: (self.ix + 1) as f64 * s,
            y1: (self.iy + 1) as f64 * s,
        }
    }

    pub fn parent(&self) -> CellId {
        CellId::new(self.level + 1, self.ix >> 1, self.iy >> 1)
    }

    /// Ancestor at `level` (itself if the levels agree). `level` must not be
    /// below this cell's level.
    pub fn ancestor_at(&self, level: u32) -> CellId {
        debug_assert!(level >= self.level);
        let shift = level - self.level;
        CellId::new(level, self.ix >> shift, self.iy >> shift)
    }

    /// Children in quadrant order: (0,0), (1,0), (0,1), (1,1).
    pub fn children(&self) -> Option<[CellId; 4]> {
        let level = self.level.checked_sub(1)?;
        let (x, y) = (self.ix * 2, self.iy * 2);
        Some([
            CellId::new(level, x, y),
            CellId::new(level, x + 1, y),
            CellId::new(level, x, y + 1),
            CellId::new(level, x + 1, y + 1),
        ])
    }

    pub fn quadrant_in_parent(&self) -> usize {
        ((self.ix & 1) + 2 * (self.iy & 1)) as usize
    }

    pub fn contains_cell(&self, other: &CellId) -> bool {
        other.level <= self.level && other.ancestor_at(self.level) == *self
    }

    pub fn contains_point(&self, p: Point) -> bool {
        cell_of(p, self.level) == *self
    }
}

/// Half-open axis-parallel rectangle in the original frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn dist_to_point(&self, p: Point) -> f64 {
        let dx = (self.x0 - p.x).max(0.0).max(p.x - self.x1);
        let dy = (self.y0 - p.y).max(0.0).max(p.y - self.y1);
        dx.hypot(dy)
    }

    pub fn max_corner_dist(&self, p: Point) -> f64 {
        let dx = (p.x - self.x0).abs().max((p.x - self.x1).abs());
        let dy = (p.y - self.y0).abs().max((p.y - self.y1).abs());
        dx.hypot(dy)
    }

    pub fn dist_to_rect(&self, other: &Rect) -> f64 {
        let dx = (self.x0 - other.x1).max(0.0).max(other.x0 - self.x1);
        let dy = (self.y0 - other.y1).max(0.0).max(other.y0 - self.y1);
        dx.hypot(dy)
    }
}

pub fn diameter(level: u32) -> f64 {
    (level as f64).exp2()
}

/// The cell of `level` that contains `p`.
pub fn cell_of(p: Point, level: u32) -> CellId {
    let inv = (-(level as f64)).exp2();
    CellId::new(
        level,
        (p.x * SQRT_2 * inv).floor() as i64,
        (p.y * SQRT_2 * inv).floor() as i64,
    )
}

/// The level `i` with `2^i <= r < 2^(i+1)`.
pub fn level_of_radius(r: f64) -> Result<u32, GridError> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(GridError::RadiusBelowOne(r));
    }
    let mut i = r.log2().floor() as i64;
    while ((i + 1) as f64).exp2() <= r {
        i += 1;
    }
    while (i as f64).exp2() > r {
        i -= 1;
    }
    Ok(i as u32)
}

/// The `k x k` block of same-level cells centred on `c`, clipped to
/// non-negative indices.
pub fn neighborhood(c: CellId, k: u32) -> Result<Vec<CellId>, GridError> {
    if k % 2 == 0 {
        return Err(GridError::EvenNeighborhood(k));
    }
    let half = (k / 2) as i64;
    let mut out = Vec::with_capacity((k * k) as usize);
    for dy in -half..=half {
        for dx in -half..=half {
            let (ix, iy) = (c.ix + dx, c.iy + dy);
            if ix >= 0 && iy >= 0 {
                out.push(CellId::new(c.level, ix, iy));
            }
        }
    }
    Ok(out)
}

/// Index of the cone of the `d`-cone family at `apex` containing `q`. Cone
/// `k` covers angles `[2πk/d, 2π(k+1)/d)` measured from the positive x-axis.
pub fn cone_index(apex: Point, q: Point, d: u32) -> Result<u32, GridError> {
    if d == 0 {
        return Err(GridError::NoCones);
    }
    let (dx, dy) = (q.x - apex.x, q.y - apex.y);
    if dx == 0.0 && dy == 0.0 {
        return Err(GridError::ApexQuery);
    }
    let mut angle = dy.atan2(dx);
    if angle < 0.0 {
        angle += 2.0 * PI;
    }
    let k = (angle / (2.0 * PI / d as f64)).floor() as u32;
    Ok(k.min(d - 1))
}

/// Low-inclusive annulus test: `r_in <= |center q| < r_out`.
pub fn annulus_membership(center: Point, r_in: f64, r_out: f64, q: Point) -> bool {
    let d = center.dist(q);
    r_in <= d && d < r_out
}

/// Cells that may hold intersecting assigned disks.
pub fn cells_neighboring(a: &CellId, b: &CellId) -> bool {
    a.rect().dist_to_rect(&b.rect()) < 2.0 * a.diameter() + 2.0 * b.diameter()
}
