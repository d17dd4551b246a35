use std::collections::HashMap;
use std::sync::Mutex;

use num_traits::Zero;

use super::lp::{minimize, LpOutcome};
use super::{DeltaBush, RnpError};
use crate::embeddings::SparseVec;
use crate::rational::{self, Rational};

/// The Minkowski functional of `conv(B ∪ ±X)`, where `B` is the unit ball
/// of normalized ℓ₁ on `dim` atoms and `X` a finite set of generators.
///
/// `gauge(v) = min (1/N) Σ |w_i| + Σ |μ_j|` over `v = w + Σ μ_j x_j`,
/// solved as an exact linear program. Values are memoised per vector.
#[derive(Debug)]
pub struct GaugeNorm {
    dim: usize,
    generators: Vec<SparseVec<Rational>>,
    cache: Mutex<HashMap<Vec<Rational>, Rational>>,
}

impl GaugeNorm {
    pub fn new(dim: usize, generators: Vec<SparseVec<Rational>>) -> Result<Self, RnpError> {
        if dim == 0 {
            return Err(RnpError::Invalid("gauge needs a positive dimension".into()));
        }
        let mut unique: Vec<SparseVec<Rational>> = Vec::with_capacity(generators.len());
        for g in generators {
            if g.support_end() > dim {
                return Err(RnpError::Invalid(format!(
                    "generator has support beyond dimension {dim}"
                )));
            }
            if !g.is_zero() && !unique.contains(&g) {
                unique.push(g);
            }
        }
        Ok(GaugeNorm {
            dim,
            generators: unique,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// Gauge whose generators are all vectors of the bush.
    pub fn from_bush(bush: &DeltaBush) -> Result<Self, RnpError> {
        Self::new(bush.atoms, bush.all_vectors().cloned().collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[SparseVec<Rational>] {
        &self.generators
    }

    pub fn eval(&self, v: &[Rational]) -> Result<Rational, RnpError> {
        if v.len() != self.dim {
            return Err(RnpError::Invalid(format!(
                "vector has length {}, gauge dimension is {}",
                v.len(),
                self.dim
            )));
        }
        if v.iter().all(Zero::is_zero) {
            return Ok(rational::int(0));
        }
        if let Some(hit) = self.cache.lock().expect("cache lock").get(v) {
            return Ok(hit.clone());
        }
        let value = self.solve(v)?;
        self.cache.lock().expect("cache lock").insert(v.to_vec(), value.clone());
        Ok(value)
    }

    pub fn eval_sparse(&self, v: &SparseVec<Rational>) -> Result<Rational, RnpError> {
        self.eval(&v.to_dense(self.dim))
    }

    fn solve(&self, v: &[Rational]) -> Result<Rational, RnpError> {
        let n = self.dim;
        let g = self.generators.len();
        let zero = rational::int(0);
        let one = rational::int(1);
        // Columns: w+ (n), w- (n), mu+ (g), mu- (g).
        let mut cost = vec![rational::frac(1, n as i64); 2 * n];
        cost.extend(std::iter::repeat_n(one.clone(), 2 * g));
        let mut a = vec![vec![zero.clone(); 2 * n + 2 * g]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = one.clone();
            row[n + i] = -one.clone();
        }
        for (j, x) in self.generators.iter().enumerate() {
            for (i, val) in x.entries() {
                a[*i][2 * n + j] = val.clone();
                a[*i][2 * n + g + j] = -val.clone();
            }
        }
        match minimize(&cost, &a, v) {
            LpOutcome::Optimal { value, .. } => Ok(value),
            other => Err(RnpError::Lp(format!("gauge program ended as {other:?}"))),
        }
    }
}
