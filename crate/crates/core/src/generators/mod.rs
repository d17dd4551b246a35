//! Graph and metric-space families: binary trees, the fork, diamonds,
//! Laakso graphs, cycles, ℓ₁ products of trees and Heisenberg word balls.

mod heisenberg;
mod product;
mod recursive;
mod tree;

pub use heisenberg::{heisenberg_ball, word_lengths, HeisElement, GENERATORS, MAX_HEISENBERG_RADIUS};
pub use product::{tree_product, MAX_PRODUCT_POINTS};
pub use recursive::{diamond, laakso, Cell, Family, RecursiveGraph, MAX_DIAMOND_LEVEL, MAX_LAAKSO_LEVEL};
pub use tree::{
    binary_tree, fork, tree_children, tree_depth_of, tree_distance, tree_index, tree_label, tree_parent, TreeMetric,
    MAX_TREE_DEPTH,
};

use crate::metric::{MetricError, WeightedGraph};
use crate::rational::{self, Rational};
use crate::{Classify, ErrorClass};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("{what} = {requested} exceeds the cap of {cap}")]
    TooLarge {
        what: &'static str,
        requested: usize,
        cap: usize,
    },
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

impl Classify for GenError {
    fn class(&self) -> ErrorClass {
        match self {
            GenError::TooLarge { .. } => ErrorClass::CapExceeded,
            GenError::Invalid(_) => ErrorClass::Validation,
            GenError::Metric(e) => e.class(),
        }
    }
}

/// Edge-length convention for the recursive families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// Every edge has length 1.
    #[default]
    Unit,
    /// Every edge at level `n` has length `base^(-n)`.
    Scaled,
}

impl Weighting {
    pub fn edge_length(self, base: u64, level: u32) -> Rational {
        match self {
            Weighting::Unit => rational::int(1),
            Weighting::Scaled => rational::inv_pow(base, level),
        }
    }
}

/// The cycle `C_m` with unit edges.
pub fn cycle(m: usize) -> Result<WeightedGraph, GenError> {
    if m < 3 {
        return Err(GenError::Invalid(format!("cycle needs m >= 3, got {m}")));
    }
    let edges = (0..m).map(|i| (i, (i + 1) % m, rational::int(1)));
    Ok(WeightedGraph::from_edges(m, edges)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{apsp, verify_metric};

    #[test]
    fn cycles() {
        assert!(cycle(2).is_err());
        for m in 3..=9 {
            let d = apsp(&cycle(m).unwrap()).unwrap();
            assert_eq!(d.diameter(), rational::int((m / 2) as i64));
            assert!(verify_metric(&d).is_valid());
        }
        let c6 = apsp(&cycle(6).unwrap()).unwrap();
        assert_eq!(c6.d(0, 3), &rational::int(3));
    }

    #[test]
    fn c4_is_unit_d1() {
        let c4 = apsp(&cycle(4).unwrap()).unwrap();
        let d1 = apsp(&diamond(1, Weighting::Unit).unwrap().graph).unwrap();
        let mut a: Vec<_> = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| c4.d(i, j).clone())
            .collect();
        let mut b: Vec<_> = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| d1.d(i, j).clone())
            .collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        // D_1 numbering is source, sink, a, b: the cycle order is 0,2,1,3.
        let perm = [0, 2, 1, 3];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(c4.d(i, j), d1.d(perm[i], perm[j]));
            }
        }
    }
}
