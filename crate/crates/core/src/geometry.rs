//! Points, disks and the normalization that puts an input set into the
//! canonical frame (non-negative coordinates, smallest radius 1).

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("coordinate must be finite, got ({0}, {1})")]
    NonFiniteCoordinate(f64, f64),
    #[error("coordinates must be non-negative, got ({0}, {1})")]
    NegativeCoordinate(f64, f64),
}

/// Stable identifier of a site across inserts and deletes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SiteId(pub u64);

impl fmt::Display for SiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist2(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(self, other: Point) -> f64 {
        self.dist2(other).sqrt()
    }
}

/// A disk with an identity. Two sites are adjacent in the disk graph when
/// their closed disks share a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    pub id: SiteId,
    pub center: Point,
    pub radius: f64,
}

impl Site {
    pub fn new(id: SiteId, center: Point, radius: f64) -> Result<Self, GeometryError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(GeometryError::InvalidRadius(radius));
        }
        if !(center.x.is_finite() && center.y.is_finite()) {
            return Err(GeometryError::NonFiniteCoordinate(center.x, center.y));
        }
        Ok(Self { id, center, radius })
    }

    /// Shorthand for tests and examples.
    pub fn at(id: u64, x: f64, y: f64, radius: f64) -> Self {
        Self::new(SiteId(id), Point::new(x, y), radius).expect("valid site")
    }

    pub fn intersects(&self, other: &Site) -> bool {
        disks_intersect(self, other)
    }

    /// Rejects sites outside the non-negative quadrant used by the grids.
    pub fn check_canonical(&self) -> Result<(), GeometryError> {
        if self.center.x < 0.0 || self.center.y < 0.0 {
            return Err(GeometryError::NegativeCoordinate(self.center.x, self.center.y));
        }
        Ok(())
    }
}

/// Closed-disk intersection: tangent disks intersect.
pub fn disks_intersect(a: &Site, b: &Site) -> bool {
    let reach = a.radius + b.radius;
    a.center.dist2(b.center) <= reach * reach
}

/// The affine map applied by [`normalize`]: `p' = (p - shift) * scale`,
/// `r' = r * scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizeReport {
    pub shift: Point,
    pub scale: f64,
}

impl NormalizeReport {
    pub const IDENTITY: Self = Self { shift: Point::new(0.0, 0.0), scale: 1.0 };

    pub fn apply(&self, site: &Site) -> Site {
        Site {
            id: site.id,
            center: Point::new(
                (site.center.x - self.shift.x) * self.scale,
                (site.center.y - self.shift.y) * self.scale,
            ),
            radius: site.radius * self.scale,
        }
    }
}

/// Translates so the smallest x and y become 0 and scales so the smallest
/// radius becomes 1. Uniform scaling preserves every intersection.
pub fn normalize(sites: &[Site]) -> (Vec<Site>, NormalizeReport) {
    if sites.is_empty() {
        return (Vec::new(), NormalizeReport::IDENTITY);
    }
    let min_x = sites.iter().map(|s| s.center.x).fold(f64::INFINITY, f64::min);
    let min_y = sites.iter().map(|s| s.center.y).fold(f64::INFINITY, f64::min);
    let min_r = sites.iter().map(|s| s.radius).fold(f64::INFINITY, f64::min);
    let report = NormalizeReport { shift: Point::new(min_x, min_y), scale: 1.0 / min_r };
    let out = sites.iter().map(|s| report.apply(s)).collect();
    (out, report)
}
