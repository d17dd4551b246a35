//! Minimum Euclidean distortion by alternating projections and bisection,
//! grandchild selection on tree embeddings and the resulting
//! self-improvement bound.

mod fork;
mod fork_gap;
mod kloeckner;
mod sdp;

pub use fork::{fork_select, ForkSelection, ForkSummary, CONTRACTION_SLACK};
pub use fork_gap::{fork_gap_estimate, ConvexityModulus, ForkGapParams, TRIPOD_L2_DISTORTION};
pub use kloeckner::{kloeckner_bound, KloecknerBound};
pub use sdp::{
    min_distortion_l2, sdp_feasible, GramCertificate, L2Result, ProbeRecord, ProbeStatus, SdpOutcome,
    MAX_SDP_ITERATIONS, MAX_SDP_POINTS, STALL_THRESHOLD,
};

use crate::embeddings::EmbedError;
use crate::{Classify, ErrorClass};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum L2Error {
    #[error("{0}")]
    Invalid(String),
    #[error("{what} exceeds the cap of {cap}")]
    Cap { what: &'static str, cap: usize },
    #[error("undecided at c = {c}: no certificate and no stall after {iterations} iterations (gap {gap})")]
    Undecided { c: f64, iterations: usize, gap: f64 },
    #[error("embedding contracts pair ({i}, {j}) to {ratio} of its distance; rescale it to be non-contractive")]
    Contractive { i: usize, j: usize, ratio: f64 },
    #[error(transparent)]
    Embed(#[from] EmbedError),
}

impl Classify for L2Error {
    fn class(&self) -> ErrorClass {
        match self {
            L2Error::Cap { .. } => ErrorClass::CapExceeded,
            L2Error::Undecided { .. } => ErrorClass::Undecided,
            L2Error::Embed(e) => e.class(),
            _ => ErrorClass::Validation,
        }
    }
}
