use std::fmt::Debug;

use num_traits::{Signed, Zero};

use crate::rational::{self, Rational};

/// Number types vectors can carry: exact rationals or floats.
pub trait Scalar: Clone + PartialOrd + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn abs(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_rational(&self) -> Option<Rational>;
    fn to_f64(&self) -> f64;
    /// Square root when it can be represented; `None` for exact types.
    fn sqrt(&self) -> Option<Self>;
    fn is_finite(&self) -> bool;
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn to_f64(&self) -> f64 {
        rational::to_f64(self)
    }
    fn sqrt(&self) -> Option<Self> {
        None
    }
    fn is_finite(&self) -> bool {
        true
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn from_rational(r: &Rational) -> Self {
        rational::to_f64(r)
    }
    fn to_rational(&self) -> Option<Rational> {
        rational::from_f64(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn sqrt(&self) -> Option<Self> {
        Some(f64::sqrt(*self))
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

/// Sparse vector: `(index, value)` pairs sorted by index, no stored zeros.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVec<S> {
    entries: Vec<(usize, S)>,
}

impl<S: Scalar> SparseVec<S> {
    pub fn new() -> Self {
        SparseVec { entries: Vec::new() }
    }

    /// Builds from arbitrary pairs; duplicates are summed and zeros dropped.
    pub fn from_pairs(mut pairs: Vec<(usize, S)>) -> Self {
        pairs.sort_by_key(|p| p.0);
        let mut entries: Vec<(usize, S)> = Vec::with_capacity(pairs.len());
        for (i, v) in pairs {
            match entries.last_mut() {
                Some((j, w)) if *j == i => *w = w.add(&v),
                _ => entries.push((i, v)),
            }
        }
        entries.retain(|(_, v)| !v.is_zero());
        SparseVec { entries }
    }

    pub fn from_dense(v: &[S]) -> Self {
        SparseVec {
            entries: v
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i, x.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, dim: usize) -> Vec<S> {
        let mut out = vec![S::zero(); dim];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn entries(&self) -> &[(usize, S)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> S {
        match self.entries.binary_search_by_key(&i, |e| e.0) {
            Ok(k) => self.entries[k].1.clone(),
            Err(_) => S::zero(),
        }
    }

    /// One past the largest stored index.
    pub fn support_end(&self) -> usize {
        self.entries.last().map_or(0, |e| e.0 + 1)
    }

    fn merge(&self, o: &Self, f: impl Fn(Option<&S>, Option<&S>) -> S) -> Self {
        let (a, b) = (&self.entries, &o.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let (idx, v) = if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                i += 1;
                (a[i - 1].0, f(Some(&a[i - 1].1), None))
            } else if i == a.len() || b[j].0 < a[i].0 {
                j += 1;
                (b[j - 1].0, f(None, Some(&b[j - 1].1)))
            } else {
                i += 1;
                j += 1;
                (a[i - 1].0, f(Some(&a[i - 1].1), Some(&b[j - 1].1)))
            };
            if !v.is_zero() {
                out.push((idx, v));
            }
        }
        SparseVec { entries: out }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.merge(o, |x, y| match (x, y) {
            (Some(x), Some(y)) => x.add(y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => S::zero(),
        })
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.merge(o, |x, y| match (x, y) {
            (Some(x), Some(y)) => x.sub(y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => S::zero().sub(y),
            (None, None) => S::zero(),
        })
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|(i, v)| (*i, v.mul(c))).collect(),
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> SparseVec<T> {
        SparseVec::from_pairs(self.entries.iter().map(|(i, v)| (*i, f(v))).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use proptest::prelude::*;

    #[test]
    fn from_pairs_merges_and_drops_zeros() {
        let v = SparseVec::from_pairs(vec![(3, int(1)), (1, int(2)), (3, int(-1)), (0, int(0))]);
        assert_eq!(v.entries(), &[(1, int(2))]);
        assert_eq!(v.get(3), int(0));
        assert_eq!(v.support_end(), 2);
    }

    proptest! {
        #[test]
        fn sub_matches_dense(a in proptest::collection::vec(-3i64..4, 8), b in proptest::collection::vec(-3i64..4, 8)) {
            let da: Vec<Rational> = a.iter().map(|&x| frac(x, 2)).collect();
            let db: Vec<Rational> = b.iter().map(|&x| int(x)).collect();
            let diff = SparseVec::from_dense(&da).sub(&SparseVec::from_dense(&db)).to_dense(8);
            let sum = SparseVec::from_dense(&da).add(&SparseVec::from_dense(&db)).to_dense(8);
            for k in 0..8 {
                prop_assert_eq!(&diff[k], &(&da[k] - &db[k]));
                prop_assert_eq!(&sum[k], &(&da[k] + &db[k]));
            }
        }
    }
}
