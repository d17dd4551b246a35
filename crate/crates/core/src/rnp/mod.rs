//! δ-trees and δ-bushes in discretised `L₁`, the gauge renorming built from
//! a bush, broken-line geodesics, thick geodesic families of diamonds and
//! the divergent martingales they produce.

mod broken_line;
mod delta;
mod gauge;
pub mod lp;
mod martingale;
mod thick;

pub use broken_line::{broken_line_family, BrokenLine, BrokenLineFamily, LineReport, Term, TermKind};
pub use delta::{
    mean, normalized_l1, rademacher_tree, tree_to_bush, BushViolation, DeltaBush, DeltaTree, DeltaTreeReport,
    MAX_RADEMACHER_DEPTH,
};
pub use gauge::GaugeNorm;
pub use martingale::{
    diamond_tent_embedding, martingale_check, martingale_from_embedding, IntervalCheck, Martingale, MartingaleReport,
    MartingaleRun, PiecewiseConstant, QuadrupleCheck,
};
pub use thick::{
    diamond_geodesic_family, thickness_alpha, DeviationInterval, GeodesicFamily, OracleResponse, ThicknessReport,
};

use crate::embeddings::EmbedError;
use crate::generators::GenError;
use crate::metric::MetricError;
use crate::{Classify, ErrorClass};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RnpError {
    #[error("{0}")]
    Invalid(String),
    #[error("not a δ-tree: {0}")]
    InvalidTree(String),
    #[error("not a δ-bush: {0}")]
    InvalidBush(String),
    #[error("bush vectors must satisfy x*(z) = 1; shift the bush first")]
    NotOnHyperplane,
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error("{what} exceeds the cap of {cap}")]
    Cap { what: &'static str, cap: u64 },
    #[error("thickness oracle found no deviating geodesic at step {step}")]
    OracleFailure { step: usize },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Gen(#[from] GenError),
}

impl Classify for RnpError {
    fn class(&self) -> ErrorClass {
        match self {
            RnpError::Cap { .. } => ErrorClass::CapExceeded,
            RnpError::Lp(_) => ErrorClass::Undecided,
            RnpError::Metric(e) => e.class(),
            RnpError::Embed(e) => e.class(),
            RnpError::Gen(e) => e.class(),
            _ => ErrorClass::Validation,
        }
    }
}
