use std::sync::Arc;

use super::{EmbedError, Scalar, SparseVec};
use crate::rnp::GaugeNorm;

#[derive(Debug, Clone)]
pub enum NormKind {
    L1,
    L2,
    LInf,
    /// `sup_k |a_1 + ... + a_k|`.
    Summing,
    Gauge(Arc<GaugeNorm>),
}

/// A finite-dimensional normed space that embeddings map into.
#[derive(Debug, Clone)]
pub struct NormedTarget {
    pub kind: NormKind,
    pub dim: usize,
}

impl NormedTarget {
    pub fn l1(dim: usize) -> Self {
        NormedTarget {
            kind: NormKind::L1,
            dim,
        }
    }

    pub fn l2(dim: usize) -> Self {
        NormedTarget {
            kind: NormKind::L2,
            dim,
        }
    }

    pub fn linf(dim: usize) -> Self {
        NormedTarget {
            kind: NormKind::LInf,
            dim,
        }
    }

    pub fn summing(dim: usize) -> Self {
        NormedTarget {
            kind: NormKind::Summing,
            dim,
        }
    }

    pub fn gauge(g: Arc<GaugeNorm>) -> Self {
        let dim = g.dim();
        NormedTarget {
            kind: NormKind::Gauge(g),
            dim,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            NormKind::L1 => "l1",
            NormKind::L2 => "l2",
            NormKind::LInf => "linf",
            NormKind::Summing => "summing",
            NormKind::Gauge(_) => "gauge",
        }
    }

    /// Same kind of norm in another dimension (gauges keep their own).
    pub fn with_dim(&self, dim: usize) -> Self {
        match self.kind {
            NormKind::Gauge(_) => self.clone(),
            _ => NormedTarget {
                kind: self.kind.clone(),
                dim,
            },
        }
    }

    pub fn norm<S: Scalar>(&self, v: &SparseVec<S>) -> Result<S, EmbedError> {
        if v.support_end() > self.dim {
            return Err(EmbedError::DimensionMismatch {
                expected: self.dim,
                got: v.support_end(),
            });
        }
        let e = v.entries();
        Ok(match &self.kind {
            NormKind::L1 => e.iter().fold(S::zero(), |acc, (_, x)| acc.add(&x.abs())),
            NormKind::LInf => e.iter().fold(S::zero(), |acc, (_, x)| {
                let a = x.abs();
                if a > acc {
                    a
                } else {
                    acc
                }
            }),
            NormKind::Summing => {
                let mut s = S::zero();
                let mut best = S::zero();
                for (_, x) in e {
                    s = s.add(x);
                    let a = s.abs();
                    if a > best {
                        best = a;
                    }
                }
                best
            }
            NormKind::L2 => {
                let sq = e.iter().fold(S::zero(), |acc, (_, x)| acc.add(&x.mul(x)));
                sq.sqrt().ok_or(EmbedError::InexactNorm("l2"))?
            }
            NormKind::Gauge(g) => {
                let dense: Vec<_> = v
                    .to_dense(self.dim)
                    .iter()
                    .map(|x| x.to_rational().ok_or(EmbedError::NonFinite))
                    .collect::<Result<_, _>>()?;
                let val = g.eval(&dense).map_err(|e| EmbedError::Gauge(e.to_string()))?;
                S::from_rational(&val)
            }
        })
    }

    pub fn norm_dense<S: Scalar>(&self, v: &[S]) -> Result<S, EmbedError> {
        if v.len() != self.dim {
            return Err(EmbedError::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        self.norm(&SparseVec::from_dense(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, Rational};
    use proptest::prelude::*;

    fn r(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn small_values() {
        assert_eq!(NormedTarget::summing(2).norm_dense(&r(&[1, -1])).unwrap(), int(1));
        assert_eq!(NormedTarget::summing(2).norm_dense(&r(&[1, -2])).unwrap(), int(1));
        assert_eq!(NormedTarget::linf(2).norm_dense(&r(&[3, -4])).unwrap(), int(4));
        assert_eq!(NormedTarget::l1(2).norm_dense(&r(&[3, -4])).unwrap(), int(7));
        assert_eq!(NormedTarget::l2(2).norm_dense(&[3.0, -4.0]).unwrap(), 5.0);
        assert!(matches!(
            NormedTarget::l2(2).norm_dense(&r(&[3, -4])),
            Err(EmbedError::InexactNorm(_))
        ));
        assert!(matches!(
            NormedTarget::l1(3).norm_dense(&r(&[1, 2])),
            Err(EmbedError::DimensionMismatch { expected: 3, got: 2 })
        ));
    }

    fn targets() -> Vec<NormedTarget> {
        vec![NormedTarget::l1(5), NormedTarget::linf(5), NormedTarget::summing(5)]
    }

    proptest! {
        #[test]
        fn norm_axioms(a in proptest::collection::vec(-5i64..6, 5), b in proptest::collection::vec(-5i64..6, 5), c in -4i64..5) {
            for t in targets() {
                let (va, vb) = (r(&a), r(&b));
                let na = t.norm_dense(&va).unwrap();
                let nb = t.norm_dense(&vb).unwrap();
                let sum: Vec<Rational> = va.iter().zip(&vb).map(|(x, y)| x + y).collect();
                prop_assert!(t.norm_dense(&sum).unwrap() <= &na + &nb);
                let scaled: Vec<Rational> = va.iter().map(|x| x * int(c)).collect();
                prop_assert_eq!(t.norm_dense(&scaled).unwrap(), &na * int(c.abs()));
                prop_assert_eq!(na == int(0), a.iter().all(|&x| x == 0));
            }
            let fa: Vec<f64> = a.iter().map(|&x| x as f64).collect();
            let fb: Vec<f64> = b.iter().map(|&x| x as f64).collect();
            let t = NormedTarget::l2(5);
            let sum: Vec<f64> = fa.iter().zip(&fb).map(|(x, y)| x + y).collect();
            prop_assert!(t.norm_dense(&sum).unwrap() <= t.norm_dense(&fa).unwrap() + t.norm_dense(&fb).unwrap() + 1e-12);
        }
    }
}
