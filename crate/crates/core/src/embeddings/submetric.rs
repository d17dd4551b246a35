use serde::Serialize;

use super::{EmbedError, Embedding, NormedTarget, SparseVec};
use crate::rational::{self, Rational};

/// Finite subset of `ℓ₁` in which a pair is active when
/// `‖x-y‖₁ <= Δ ‖x-y‖_s`.
#[derive(Debug, Clone)]
pub struct SubmetricSpace {
    pub points: Vec<Vec<Rational>>,
    pub delta: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SubmetricOutcome {
    /// `d <= ‖f(x)-f(y)‖ <= c d` on every active pair; `c` is `None` when
    /// no pair is active.
    Bounded {
        #[serde(with = "rational::serde_opt_str")]
        c: Option<Rational>,
        witness: Option<(usize, usize)>,
        active_pairs: usize,
    },
    /// First active pair (lexicographic) where the map contracts.
    Contracting { i: usize, j: usize },
}

impl SubmetricSpace {
    pub fn new(points: Vec<Vec<Rational>>, delta: Rational) -> Result<Self, EmbedError> {
        if delta < rational::int(1) {
            return Err(EmbedError::Invalid("delta must be at least 1".into()));
        }
        if let Some(d) = points.first().map(Vec::len) {
            if let Some(bad) = points.iter().find(|p| p.len() != d) {
                return Err(EmbedError::DimensionMismatch {
                    expected: d,
                    got: bad.len(),
                });
            }
        }
        Ok(SubmetricSpace { points, delta })
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    fn diff(&self, i: usize, j: usize) -> SparseVec<Rational> {
        let d: Vec<Rational> = self.points[i].iter().zip(&self.points[j]).map(|(a, b)| a - b).collect();
        SparseVec::from_dense(&d)
    }

    /// `‖x_i - x_j‖₁`, the metric of the space.
    pub fn dist(&self, i: usize, j: usize) -> Rational {
        NormedTarget::l1(self.dim())
            .norm(&self.diff(i, j))
            .expect("matching dimension")
    }

    pub fn is_active(&self, i: usize, j: usize) -> bool {
        let v = self.diff(i, j);
        let l1 = NormedTarget::l1(self.dim()).norm(&v).expect("matching dimension");
        let s = NormedTarget::summing(self.dim()).norm(&v).expect("matching dimension");
        l1 <= &self.delta * s
    }

    /// Active pairs `(i, j)` with `i < j`.
    pub fn active_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.points.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.is_active(i, j))
            .collect()
    }

    /// The identity map into `ℓ₁`.
    pub fn identity_embedding(&self) -> Embedding<Rational> {
        Embedding {
            vectors: self.points.iter().map(|p| SparseVec::from_dense(p)).collect(),
            target: NormedTarget::l1(self.dim()),
        }
    }
}

/// Smallest `C` with `d <= ‖f(x)-f(y)‖ <= C d` over active pairs, or the
/// first active pair where `f` contracts.
pub fn submetric_check(sub: &SubmetricSpace, emb: &Embedding<Rational>) -> Result<SubmetricOutcome, EmbedError> {
    if emb.len() != sub.points.len() {
        return Err(EmbedError::PointCountMismatch {
            points: sub.points.len(),
            vectors: emb.len(),
        });
    }
    let mut c: Option<Rational> = None;
    let mut witness = None;
    let pairs = sub.active_pairs();
    for &(i, j) in &pairs {
        let d = sub.dist(i, j);
        if d == rational::int(0) {
            return Err(EmbedError::ZeroDistance { i, j });
        }
        let e = emb.diff_norm(i, j)?;
        if e < d {
            return Ok(SubmetricOutcome::Contracting { i, j });
        }
        let ratio = e / d;
        if c.as_ref().is_none_or(|cur| ratio > *cur) {
            c = Some(ratio);
            witness = Some((i, j));
        }
    }
    Ok(SubmetricOutcome::Bounded {
        c,
        witness,
        active_pairs: pairs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use proptest::prelude::*;

    fn pts(v: &[&[i64]]) -> Vec<Vec<Rational>> {
        v.iter().map(|p| p.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn worked_pairs() {
        let s = SubmetricSpace::new(pts(&[&[1, 0], &[0, 1]]), frac(3, 2)).unwrap();
        assert!(!s.is_active(0, 1));
        let s = SubmetricSpace::new(pts(&[&[1, 0], &[0, 1]]), int(2)).unwrap();
        assert!(s.is_active(0, 1));
        let s = SubmetricSpace::new(pts(&[&[1, -1, 0], &[0, 0, 0]]), int(2)).unwrap();
        assert!(s.is_active(0, 1));
    }

    #[test]
    fn identity_has_constant_one() {
        let s = SubmetricSpace::new(pts(&[&[0, 0, 0], &[1, 0, 0], &[1, 1, 0], &[2, -1, 3]]), int(2)).unwrap();
        let out = submetric_check(&s, &s.identity_embedding()).unwrap();
        match out {
            SubmetricOutcome::Bounded { c, active_pairs, .. } => {
                assert!(active_pairs > 0);
                assert_eq!(c, Some(int(1)));
            }
            other => panic!("{other:?}"),
        }
        let half = s.identity_embedding().scaled(&frac(1, 2));
        assert!(matches!(
            submetric_check(&s, &half).unwrap(),
            SubmetricOutcome::Contracting { .. }
        ));
    }

    proptest! {
        #[test]
        fn active_set_monotone_in_delta(p in proptest::collection::vec(proptest::collection::vec(-3i64..4, 4), 2..6), a in 2i64..12, b in 2i64..12) {
            let (lo, hi) = (frac(a.min(b), 2), frac(a.max(b), 2));
            let small = SubmetricSpace::new(pts(&p.iter().map(|v| v.as_slice()).collect::<Vec<_>>()), lo).unwrap();
            let large = SubmetricSpace { delta: hi, ..small.clone() };
            let big: std::collections::HashSet<_> = large.active_pairs().into_iter().collect();
            for pair in small.active_pairs() {
                prop_assert!(big.contains(&pair));
            }
        }
    }
}
