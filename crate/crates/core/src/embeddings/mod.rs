//! Normed targets, distortion of embeddings, and the concrete embeddings
//! and brute-force searches built on them.

mod bourgain;
mod cycle_oracle;
mod distortion;
mod james;
mod norm;
mod scalar;
mod submetric;

pub use bourgain::{bourgain_embed, psi, BourgainLabeling, MAX_BOURGAIN_DEPTH};
pub use cycle_oracle::{
    cycle_tree_lower_oracle, free_trees, map_distortion, CycleTreeReport, CycleTreeWitness, UnitTree,
    MAX_ORACLE_TREE_VERTICES,
};
pub use distortion::{distortion, frechet_embed, DistortionReport, Embedding};
pub use james::{james_alpha, james_ratio, CoefficientGrid, JamesReport, JamesSequence, MAX_GRID_POINTS};
pub use norm::{NormKind, NormedTarget};
pub use scalar::{Scalar, SparseVec};
pub use submetric::{submetric_check, SubmetricOutcome, SubmetricSpace};

use crate::{Classify, ErrorClass};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmbedError {
    #[error("vector dimension {got} does not match target dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{vectors} vectors for {points} points")]
    PointCountMismatch { points: usize, vectors: usize },
    #[error("distortion needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("infinite distortion: points {i} and {j} have identical images")]
    Collapsed { i: usize, j: usize },
    #[error("distinct points {i} and {j} are at distance 0")]
    ZeroDistance { i: usize, j: usize },
    #[error("vector of point {point} has a non-finite entry")]
    NonFiniteEntry { point: usize },
    #[error("value is not finite")]
    NonFinite,
    #[error("{0} norm cannot be evaluated exactly; use floating-point vectors")]
    InexactNorm(&'static str),
    #[error("gauge evaluation failed: {0}")]
    Gauge(String),
    #[error("coefficient grid is empty")]
    EmptyGrid,
    #[error("{what} exceeds the budget of {cap}")]
    Budget { what: &'static str, cap: u64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Classify for EmbedError {
    fn class(&self) -> ErrorClass {
        match self {
            EmbedError::Budget { .. } => ErrorClass::CapExceeded,
            _ => ErrorClass::Validation,
        }
    }
}
