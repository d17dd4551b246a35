use serde::Serialize;

use super::{EmbedError, NormedTarget, SparseVec};
use crate::rational::{self, Rational};

pub const MAX_GRID_POINTS: u64 = 100_000_000;

/// Integer coefficients `lo..=hi` in every coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoefficientGrid {
    pub lo: i64,
    pub hi: i64,
}

impl Default for CoefficientGrid {
    fn default() -> Self {
        CoefficientGrid { lo: -3, hi: 3 }
    }
}

/// Vectors `x_1..x_m` with
/// `‖Σ a_i x_i‖ >= alpha (|Σ_{i<=j} a_i| + |Σ_{i>j} a_i|)`.
#[derive(Debug, Clone)]
pub struct JamesSequence {
    pub vectors: Vec<SparseVec<Rational>>,
    pub target: NormedTarget,
    pub alpha: Rational,
}

impl JamesSequence {
    /// The unit vectors of the summing-norm space, with `alpha = 1/3`.
    pub fn summing_basis(m: usize) -> Self {
        JamesSequence {
            vectors: (0..m)
                .map(|i| SparseVec::from_pairs(vec![(i, rational::int(1))]))
                .collect(),
            target: NormedTarget::summing(m),
            alpha: rational::frac(1, 3),
        }
    }

    /// Whether the defining inequality holds for `a` split after `j`
    /// (1-based, `1 <= j < m`).
    pub fn holds(&self, a: &[i64], j: usize) -> Result<bool, EmbedError> {
        let combo = self
            .vectors
            .iter()
            .zip(a)
            .fold(SparseVec::new(), |acc, (x, &c)| acc.add(&x.scale(&rational::int(c))));
        let lhs = self.target.norm(&combo)?;
        let head: i64 = a[..j].iter().sum();
        let tail: i64 = a[j..].iter().sum();
        Ok(lhs >= &self.alpha * rational::int(head.abs() + tail.abs()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JamesReport {
    pub m: usize,
    pub grid: CoefficientGrid,
    #[serde(with = "rational::serde_str")]
    pub infimum: Rational,
    pub argmin: Vec<i64>,
    /// The split `j` of the minimizing ratio (1-based).
    pub split: usize,
    #[serde(with = "rational::serde_str")]
    pub analytic_bound: Rational,
    pub evaluated: u64,
}

/// `‖Σ a_i e_i‖_s / (|Σ_{i<=j} a_i| + |Σ_{i>j} a_i|)` as a reduced pair,
/// `None` when the denominator vanishes.
pub fn james_ratio(a: &[i64], j: usize) -> Option<(i64, i64)> {
    let mut s = 0i64;
    let mut sup = 0i64;
    let mut head = 0i64;
    for (k, &c) in a.iter().enumerate() {
        s += c;
        sup = sup.max(s.abs());
        if k + 1 == j {
            head = s;
        }
    }
    let den = head.abs() + (s - head).abs();
    if den == 0 {
        None
    } else {
        Some((sup, den))
    }
}

/// Infimum of the James ratio for unit vectors under the summing norm over
/// every coefficient vector of the grid and every split.
///
/// The ratio is invariant under `a -> -a`, so on symmetric grids only
/// vectors whose first nonzero entry is positive are visited. Ties keep the first vector in
/// lexicographic order and then the smallest split.
pub fn james_alpha(m: usize, grid: CoefficientGrid) -> Result<JamesReport, EmbedError> {
    if m < 2 {
        return Err(EmbedError::Invalid(format!("james_alpha needs m >= 2, got {m}")));
    }
    if grid.lo > grid.hi || (grid.lo == 0 && grid.hi == 0) {
        return Err(EmbedError::EmptyGrid);
    }
    let width = (grid.hi - grid.lo + 1) as u64;
    let total = width.checked_pow(m as u32).filter(|&t| t <= MAX_GRID_POINTS);
    if total.is_none() {
        return Err(EmbedError::Budget {
            what: "coefficient grid",
            cap: MAX_GRID_POINTS,
        });
    }
    let symmetric = grid.lo == -grid.hi;
    let mut a = vec![grid.lo; m];
    let mut best: Option<((i64, i64), Vec<i64>, usize)> = None;
    let mut evaluated = 0u64;
    loop {
        if !symmetric || a.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0) {
            for j in 1..m {
                if let Some((p, q)) = james_ratio(&a, j) {
                    evaluated += 1;
                    let improves = match &best {
                        None => true,
                        Some(((bp, bq), _, _)) => (p as i128) * (*bq as i128) < (*bp as i128) * (q as i128),
                    };
                    if improves {
                        best = Some(((p, q), a.clone(), j));
                    }
                }
            }
        }
        let mut k = m;
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            if a[k] < grid.hi {
                a[k] += 1;
                break;
            }
            a[k] = grid.lo;
            if k == 0 {
                k = usize::MAX;
                break;
            }
        }
        if k == usize::MAX {
            break;
        }
    }
    let ((p, q), argmin, split) = best.ok_or(EmbedError::EmptyGrid)?;
    Ok(JamesReport {
        m,
        grid,
        infimum: rational::frac(p, q),
        argmin,
        split,
        analytic_bound: rational::frac(1, 3),
        evaluated,
    })
}
