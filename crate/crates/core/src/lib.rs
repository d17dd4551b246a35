//! Finite metric test spaces and the invariants used to tell Banach spaces
//! apart by which of these spaces embed into them.
//!
//! The crate is organised bottom-up:
//!
//! * [`metric`]: exact finite metric spaces, weighted graphs, shortest paths
//!   and geodesic enumeration.
//! * [`generators`]: binary trees, forks, diamonds, Laakso graphs, cycles,
//!   ℓ₁ products of trees and word-metric balls in the integer Heisenberg group.
//! * [`embeddings`]: normed targets, distortion, Fréchet and Bourgain
//!   embeddings, James-type sequences, submetric (active pair) checks and the
//!   cycle-into-tree brute force.
//! * [`l2`]: minimum Euclidean distortion by PSD feasibility and bisection,
//!   fork selection and the self-improvement bound for trees.
//! * [`markov`]: Markov p-convexity functionals, exact and Monte Carlo.
//! * [`rnp`]: δ-trees and δ-bushes, the gauge renorming, broken-line
//!   geodesics, thick geodesic families and divergent martingales.
//!
//! Distances and all combinatorial invariants are exact rationals
//! ([`Rational`]); only the Euclidean optimisation and Monte Carlo estimates
//! use floating point.

pub mod embeddings;
pub mod generators;
pub mod l2;
pub mod markov;
pub mod metric;
pub mod rational;
pub mod rnp;

pub use rational::Rational;

/// Failure classes shared by every module, used by front ends to pick an
/// exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input or a violated precondition.
    Validation,
    /// A configured size or enumeration budget was exceeded.
    CapExceeded,
    /// A numerical procedure could not decide.
    Undecided,
}

/// Implemented by every error type of the crate.
pub trait Classify {
    fn class(&self) -> ErrorClass;
}
