pub mod awnn;
pub mod bdg;
pub mod dynconn;
pub mod envelope;
pub mod geometry;
pub mod grid;
pub mod mbm;
pub mod oracle;
pub mod quadforest;
pub mod rds;
pub mod regions;
pub mod semidyn;
pub mod structure;
pub mod udg;
mod util;

pub use geometry::{Point, Site, SiteId};
pub use structure::{DiskConnectivity, StructureError, StructureStats};
