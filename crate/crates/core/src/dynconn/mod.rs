//! Connectivity over explicit graphs: a fully dynamic structure for the
//! proxy graphs and union-find for the insert-only variant.

mod ett;
mod hdt;
mod union_find;

pub use hdt::{ConnectivityError, DynamicConnectivity, EdgeHandle, VertexId};
pub use union_find::UnionFind;
