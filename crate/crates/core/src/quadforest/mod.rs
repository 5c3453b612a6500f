//! Quadtrees over the hierarchical grid: the dynamic uncompressed forest
//! used by the bounded-ratio structures, and the static compressed tree with
//! heavy paths and canonical paths used by the general decremental
//! structure.

mod compressed;
mod forest;

use thiserror::Error;

use crate::geometry::{GeometryError, SiteId};
use crate::grid::GridError;

pub use compressed::{build_compressed, CanonicalPath, CanonicalPathId, CompressedQuadtree, HeavyPath};
pub use forest::{NodeId, QuadForest, QuadNode};
pub(crate) use forest::container_key;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ForestError {
    #[error("site {0} is already in the forest")]
    DuplicateSite(SiteId),
    #[error("site {0} is not in the forest")]
    UnknownSite(SiteId),
    #[error("radius {radius} needs a level above the top level {top_level}")]
    RadiusAboveBound { radius: f64, top_level: u32 },
    #[error("cell {0:?} is not in the tree")]
    UnknownCell(crate::grid::CellId),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
