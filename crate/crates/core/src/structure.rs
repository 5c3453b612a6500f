//! The interface shared by every connectivity structure over disks.

use thiserror::Error;

use crate::awnn::AwnnError;
use crate::dynconn::ConnectivityError;
use crate::geometry::{GeometryError, Site, SiteId};
use crate::grid::GridError;
use crate::mbm::MatchingError;
use crate::quadforest::ForestError;
use crate::rds::RdsError;
use crate::regions::RegionError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StructureError {
    #[error("site {0} is already present")]
    DuplicateSite(SiteId),
    #[error("site {0} is not present")]
    UnknownSite(SiteId),
    #[error("radius {radius} of site {id} is outside [{min}, {max}]")]
    RadiusOutOfRange { id: SiteId, radius: f64, min: f64, max: f64 },
    #[error("operation not supported: {0}")]
    Unsupported(&'static str),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error(transparent)]
    Connectivity(#[from] ConnectivityError),
    #[error(transparent)]
    Awnn(#[from] AwnnError),
    #[error(transparent)]
    Rds(#[from] RdsError),
    #[error(transparent)]
    Region(#[from] RegionError),
}

/// Counters reported by a structure; fields that do not apply stay zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StructureStats {
    pub sites: usize,
    /// Vertices of the proxy graph.
    pub vertices: usize,
    /// Edges of the proxy graph.
    pub edges: usize,
    /// Cells visited by updates, cumulative.
    pub touched: u64,
    /// Sites stored across all matchings.
    pub matched_sites: usize,
    /// Reveal-structure reassignments, cumulative.
    pub reassignments: u64,
}

/// Connectivity in the intersection graph of a dynamic set of disks.
/// Semi-dynamic structures reject the unsupported update kind.
pub trait DiskConnectivity {
    fn insert(&mut self, site: Site) -> Result<(), StructureError>;
    fn delete(&mut self, id: SiteId) -> Result<(), StructureError>;
    fn connected(&mut self, a: SiteId, b: SiteId) -> Result<bool, StructureError>;
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn stats(&self) -> StructureStats;
    /// Full consistency check against the structure's own invariants.
    fn audit(&mut self) -> Result<(), String>;
}
