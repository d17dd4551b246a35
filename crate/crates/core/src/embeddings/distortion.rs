use rayon::prelude::*;

use super::{EmbedError, NormedTarget, Scalar, SparseVec};
use crate::metric::{Metric, MetricSpace};
use crate::rational::Rational;

/// One vector per point of a space, measured in `target`.
#[derive(Debug, Clone)]
pub struct Embedding<S> {
    pub vectors: Vec<SparseVec<S>>,
    pub target: NormedTarget,
}

impl<S: Scalar> Embedding<S> {
    pub fn new(vectors: Vec<SparseVec<S>>, target: NormedTarget) -> Result<Self, EmbedError> {
        for (point, v) in vectors.iter().enumerate() {
            if v.support_end() > target.dim {
                return Err(EmbedError::DimensionMismatch {
                    expected: target.dim,
                    got: v.support_end(),
                });
            }
            if v.entries().iter().any(|(_, x)| !x.is_finite()) {
                return Err(EmbedError::NonFiniteEntry { point });
            }
        }
        Ok(Embedding { vectors, target })
    }

    pub fn from_dense(rows: Vec<Vec<S>>, target: NormedTarget) -> Result<Self, EmbedError> {
        for row in &rows {
            if row.len() != target.dim {
                return Err(EmbedError::DimensionMismatch {
                    expected: target.dim,
                    got: row.len(),
                });
            }
        }
        Self::new(rows.iter().map(|r| SparseVec::from_dense(r)).collect(), target)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dense_rows(&self) -> Vec<Vec<S>> {
        self.vectors.iter().map(|v| v.to_dense(self.target.dim)).collect()
    }

    pub fn scaled(&self, c: &S) -> Self {
        Embedding {
            vectors: self.vectors.iter().map(|v| v.scale(c)).collect(),
            target: self.target.clone(),
        }
    }

    pub fn to_f64(&self) -> Embedding<f64> {
        Embedding {
            vectors: self.vectors.iter().map(|v| v.map(|x| x.to_f64())).collect(),
            target: self.target.clone(),
        }
    }

    /// Restriction to the listed points, in that order.
    pub fn restrict(&self, points: &[usize]) -> Self {
        Embedding {
            vectors: points.iter().map(|&i| self.vectors[i].clone()).collect(),
            target: self.target.clone(),
        }
    }

    pub fn diff_norm(&self, i: usize, j: usize) -> Result<S, EmbedError> {
        self.target.norm(&self.vectors[i].sub(&self.vectors[j]))
    }
}

/// Extreme distance ratios of an embedding.
///
/// `lip = max ‖f(i)-f(j)‖ / d(i,j)`, `colip = max d(i,j) / ‖f(i)-f(j)‖`,
/// `distortion = lip * colip`. Witnesses are the lexicographically first
/// pairs `(i, j)`, `i < j`, attaining each maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionReport<S> {
    pub lip: S,
    pub colip: S,
    pub distortion: S,
    pub lip_witness: (usize, usize),
    pub colip_witness: (usize, usize),
}

struct RowBest<S> {
    lip: Option<(S, usize)>,
    colip: Option<(S, usize)>,
}

fn better<S: PartialOrd>(cur: &Option<(S, usize)>, v: &S) -> bool {
    match cur {
        None => true,
        Some((c, _)) => v > c,
    }
}

pub fn distortion<S, M>(space: &M, emb: &Embedding<S>) -> Result<DistortionReport<S>, EmbedError>
where
    S: Scalar,
    M: Metric + Sync + ?Sized,
{
    let n = space.size();
    if emb.len() != n {
        return Err(EmbedError::PointCountMismatch {
            points: n,
            vectors: emb.len(),
        });
    }
    if n < 2 {
        return Err(EmbedError::TooFewPoints(n));
    }
    let rows: Vec<Result<RowBest<S>, EmbedError>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = RowBest { lip: None, colip: None };
            for j in i + 1..n {
                let d = S::from_rational(&space.dist(i, j));
                if d.is_zero() {
                    return Err(EmbedError::ZeroDistance { i, j });
                }
                let e = emb.diff_norm(i, j)?;
                if e.is_zero() {
                    return Err(EmbedError::Collapsed { i, j });
                }
                let up = e.div(&d);
                if better(&best.lip, &up) {
                    best.lip = Some((up, j));
                }
                let down = d.div(&e);
                if better(&best.colip, &down) {
                    best.colip = Some((down, j));
                }
            }
            Ok(best)
        })
        .collect();
    let mut lip: Option<(S, (usize, usize))> = None;
    let mut colip: Option<(S, (usize, usize))> = None;
    for (i, row) in rows.into_iter().enumerate() {
        let row = row?;
        if let Some((v, j)) = row.lip {
            if lip.as_ref().is_none_or(|(c, _)| v > *c) {
                lip = Some((v, (i, j)));
            }
        }
        if let Some((v, j)) = row.colip {
            if colip.as_ref().is_none_or(|(c, _)| v > *c) {
                colip = Some((v, (i, j)));
            }
        }
    }
    let (lip, lip_witness) = lip.expect("at least one pair");
    let (colip, colip_witness) = colip.expect("at least one pair");
    Ok(DistortionReport {
        distortion: lip.mul(&colip),
        lip,
        colip,
        lip_witness,
        colip_witness,
    })
}

/// Point `i` goes to its row of distances, an isometry into `ℓ∞^N`.
pub fn frechet_embed(space: &MetricSpace) -> Embedding<Rational> {
    let n = space.len();
    Embedding {
        vectors: (0..n).map(|i| SparseVec::from_dense(space.row(i))).collect(),
        target: NormedTarget::linf(n),
    }
}
