//! Markov p-convexity functionals: exact dynamic programming over matrix
//! powers, a closed-form mode for the downward tree walk, and Monte Carlo
//! estimates with per-term random substreams.

mod chain;
mod exact;
mod mc;
mod walks;

pub use chain::{MarkovChain, MetricMap};
pub use exact::{exact_convexity, tree_walk_convexity, MAX_DP_PAIRS};
pub use mc::mc_convexity;
pub use walks::{downhill_walk, downward_tree_walk, MAX_ANALYTIC_TREE_M, MAX_EXPLICIT_TREE_M};

use serde::Serialize;

use crate::generators::GenError;
use crate::metric::MetricError;
use crate::rational::{self, Rational};
use crate::{Classify, ErrorClass};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MarkovError {
    #[error("{0}")]
    Invalid(String),
    #[error("row {state} sums to {sum}, not 1")]
    RowSum { state: usize, sum: String },
    #[error("state {state} has no image in the metric space")]
    MissingImage { state: usize },
    #[error("{what} exceeds the cap of {cap}{hint}")]
    Cap {
        what: &'static str,
        cap: u64,
        hint: &'static str,
    },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Gen(#[from] GenError),
}

impl Classify for MarkovError {
    fn class(&self) -> ErrorClass {
        match self {
            MarkovError::Cap { .. } => ErrorClass::CapExceeded,
            MarkovError::Metric(e) => e.class(),
            MarkovError::Gen(e) => e.class(),
            _ => ErrorClass::Validation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Method {
    ExactDp,
    /// Closed form for the downward walk on `T_{2^m}`.
    AnalyticTree,
    #[serde(rename_all = "camelCase")]
    MonteCarlo {
        seed: u64,
        samples: u64,
        lhs_stderr: f64,
        rhs_stderr: f64,
    },
}

/// Both sides of the Markov convexity inequality for one chain and map.
///
/// `lhs` is `Σ_k Σ_t E[d(f(X_t), f(X̃_t(t−2^k)))^p] / 2^{kp}` and `rhs` is
/// `Σ_t E[d(f(X_t), f(X_{t−1}))^p]`, both over `t = 1..T` and
/// `k = 0..⌈log₂ T⌉`. Exact methods also fill the rational fields.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConvexityEstimate {
    pub p: f64,
    pub horizon: usize,
    pub lhs: f64,
    pub rhs: f64,
    #[serde(with = "rational::serde_opt_str", skip_serializing_if = "Option::is_none")]
    pub lhs_exact: Option<Rational>,
    #[serde(with = "rational::serde_opt_str", skip_serializing_if = "Option::is_none")]
    pub rhs_exact: Option<Rational>,
    /// `(lhs/rhs)^{1/p}`, absent when `rhs = 0`.
    pub pi_lower: Option<f64>,
    pub method: Method,
}

impl ConvexityEstimate {
    fn exact(p: u32, horizon: usize, lhs: Rational, rhs: Rational, method: Method) -> Self {
        let (l, r) = (rational::to_f64(&lhs), rational::to_f64(&rhs));
        ConvexityEstimate {
            p: p as f64,
            horizon,
            lhs: l,
            rhs: r,
            pi_lower: pi_lower(l, r, p as f64),
            lhs_exact: Some(lhs),
            rhs_exact: Some(rhs),
            method,
        }
    }
}

fn pi_lower(lhs: f64, rhs: f64, p: f64) -> Option<f64> {
    (rhs > 0.0).then(|| (lhs / rhs).powf(1.0 / p))
}

/// `⌈log₂ T⌉`, the largest `k` in the double sum.
pub fn max_scale(horizon: usize) -> u32 {
    horizon.next_power_of_two().trailing_zeros()
}
