use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::MarkovError;
use crate::metric::Metric;
use crate::rational::{self, Rational};

/// A finite Markov chain with exact transition probabilities, run for
/// times `1..=horizon` and frozen at `start` for `t ≤ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    rows: Vec<Vec<(usize, Rational)>>,
    start: usize,
    horizon: usize,
}

impl MarkovChain {
    /// `rows[i]` lists `(j, P(i, j))`. Entries must be positive with
    /// distinct targets and each row must sum to exactly 1.
    pub fn new(rows: Vec<Vec<(usize, Rational)>>, start: usize, horizon: usize) -> Result<Self, MarkovError> {
        let n = rows.len();
        if start >= n {
            return Err(MarkovError::Invalid(format!(
                "start state {start} out of range for {n} states"
            )));
        }
        if horizon == 0 {
            return Err(MarkovError::Invalid("horizon must be at least 1".into()));
        }
        let mut rows = rows;
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_by_key(|e| e.0);
            let mut sum = Rational::zero();
            for (k, (j, pr)) in row.iter().enumerate() {
                if *j >= n {
                    return Err(MarkovError::Invalid(format!("row {i} points at missing state {j}")));
                }
                if !pr.is_positive() {
                    return Err(MarkovError::Invalid(format!(
                        "row {i} has non-positive entry {pr} at {j}"
                    )));
                }
                if k > 0 && row[k - 1].0 == *j {
                    return Err(MarkovError::Invalid(format!("row {i} lists state {j} twice")));
                }
                sum += pr;
            }
            if !sum.is_one() {
                return Err(MarkovError::RowSum {
                    state: i,
                    sum: rational::format(&sum),
                });
            }
        }
        Ok(MarkovChain { rows, start, horizon })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn row(&self, i: usize) -> &[(usize, Rational)] {
        &self.rows[i]
    }

    pub fn is_absorbing(&self, i: usize) -> bool {
        self.rows[i].len() == 1 && self.rows[i][0].0 == i
    }

    /// Same transitions with another horizon.
    pub fn with_horizon(&self, horizon: usize) -> Result<Self, MarkovError> {
        if horizon == 0 {
            return Err(MarkovError::Invalid("horizon must be at least 1".into()));
        }
        Ok(MarkovChain {
            horizon,
            ..self.clone()
        })
    }

    /// One step of the distribution `mu`.
    pub(crate) fn push(&self, mu: &[(usize, Rational)]) -> Vec<(usize, Rational)> {
        let mut next: BTreeMap<usize, Rational> = BTreeMap::new();
        for (i, w) in mu {
            for (j, pr) in &self.rows[*i] {
                *next.entry(*j).or_insert_with(Rational::zero) += w * pr;
            }
        }
        next.into_iter().collect()
    }
}

/// Image of every chain state in a metric space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricMap {
    pub images: Vec<usize>,
}

impl MetricMap {
    pub fn new(images: Vec<usize>) -> Self {
        MetricMap { images }
    }

    pub fn identity(n: usize) -> Self {
        MetricMap {
            images: (0..n).collect(),
        }
    }

    pub fn constant(n: usize, point: usize) -> Self {
        MetricMap { images: vec![point; n] }
    }

    pub(crate) fn check(&self, chain: &MarkovChain, space: &dyn Metric) -> Result<(), MarkovError> {
        for state in 0..chain.len() {
            match self.images.get(state) {
                Some(&x) if x < space.size() => {}
                _ => return Err(MarkovError::MissingImage { state }),
            }
        }
        Ok(())
    }
}
