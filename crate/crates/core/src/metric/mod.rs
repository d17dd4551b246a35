//! Exact finite metric spaces and the graphs that generate them.

mod apsp;
mod geodesic;
mod graph;
mod space;
mod verify;

pub use apsp::{apsp, shortest_from};
pub use geodesic::{count_geodesics, enumerate_geodesic_paths, GeodesicPath, DEFAULT_GEODESIC_CAP};
pub use graph::{Edge, WeightedGraph};
pub use space::{Metric, MetricSpace, PointId};
pub use verify::{verify_metric, MetricReport, Violation};

use crate::{Classify, ErrorClass};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("graph is disconnected: no path between {u} and {v}")]
    Disconnected { u: String, v: String },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate undirected edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("edge {0}-{1} has non-positive length {2}")]
    NonPositiveLength(usize, usize, String),
    #[error("vertex index {index} out of range for {size} vertices")]
    VertexOutOfRange { index: usize, size: usize },
    #[error("point ids must be contiguous 0..N-1, found {found} at position {position}")]
    NonContiguousIds { position: usize, found: usize },
    #[error("duplicate point label {0:?}")]
    DuplicateLabel(String),
    #[error("distance table must be {n}x{n}, got a row of length {row_len}")]
    BadShape { n: usize, row_len: usize },
    #[error("geodesic endpoints must differ (both are {0})")]
    SameEndpoints(usize),
    #[error("{count} geodesics exceed the enumeration cap of {cap}")]
    TooManyGeodesics { count: String, cap: usize },
    #[error("malformed input: {0}")]
    Parse(String),
}

impl Classify for MetricError {
    fn class(&self) -> ErrorClass {
        match self {
            MetricError::TooManyGeodesics { .. } => ErrorClass::CapExceeded,
            _ => ErrorClass::Validation,
        }
    }
}
