use num_traits::Signed;
use serde::Serialize;

use super::RnpError;
use crate::embeddings::SparseVec;
use crate::generators::{tree_depth_of, tree_parent};
use crate::rational::{self, Rational};

pub const MAX_RADEMACHER_DEPTH: u32 = 14;

/// `‖v‖ = (1/N) Σ |v_i|` on `N` atoms of equal mass.
pub fn normalized_l1(v: &SparseVec<Rational>, atoms: usize) -> Rational {
    let s: Rational = v.entries().iter().map(|(_, x)| x.abs()).sum();
    s / rational::int(atoms as i64)
}

/// The mean functional `x*(v) = (1/N) Σ v_i`.
pub fn mean(v: &SparseVec<Rational>, atoms: usize) -> Rational {
    let s: Rational = v.entries().iter().map(|(_, x)| x.clone()).sum();
    s / rational::int(atoms as i64)
}

/// Vectors `x_τ` indexed by the level-order index of `τ`, each the
/// midpoint of its two children.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaTree {
    pub depth: u32,
    pub atoms: usize,
    pub vectors: Vec<SparseVec<Rational>>,
    pub delta: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaTreeReport {
    /// Internal nodes where `x_τ != (x_τ0 + x_τ1)/2`.
    pub midpoint_failures: Vec<usize>,
    /// Child nodes closer than `delta` to their parent.
    pub separation_failures: Vec<usize>,
    #[serde(with = "rational::serde_str")]
    pub min_separation: Rational,
    #[serde(with = "rational::serde_str")]
    pub max_norm: Rational,
    #[serde(with = "rational::serde_str")]
    pub min_norm: Rational,
}

impl DeltaTreeReport {
    pub fn is_valid(&self) -> bool {
        self.midpoint_failures.is_empty() && self.separation_failures.is_empty()
    }
}

impl DeltaTree {
    pub fn verify(&self) -> DeltaTreeReport {
        let size = self.vectors.len();
        let half = rational::frac(1, 2);
        let mut midpoint_failures = Vec::new();
        let mut separation_failures = Vec::new();
        let mut min_sep: Option<Rational> = None;
        for i in 0..size {
            let (c0, c1) = (2 * i + 1, 2 * i + 2);
            if c1 < size {
                let mid = self.vectors[c0].add(&self.vectors[c1]).scale(&half);
                if mid != self.vectors[i] {
                    midpoint_failures.push(i);
                }
            }
            if let Some(p) = tree_parent(i) {
                let sep = normalized_l1(&self.vectors[i].sub(&self.vectors[p]), self.atoms);
                if sep < self.delta {
                    separation_failures.push(i);
                }
                if min_sep.as_ref().is_none_or(|m| sep < *m) {
                    min_sep = Some(sep);
                }
            }
        }
        let norms: Vec<Rational> = self.vectors.iter().map(|v| normalized_l1(v, self.atoms)).collect();
        DeltaTreeReport {
            midpoint_failures,
            separation_failures,
            min_separation: min_sep.unwrap_or_else(|| rational::int(0)),
            max_norm: norms.iter().max().cloned().unwrap_or_else(|| rational::int(0)),
            min_norm: norms.iter().min().cloned().unwrap_or_else(|| rational::int(0)),
        }
    }
}

/// The standard δ-tree of discretised `L₁` on `2^n` atoms with `δ = 1`.
///
/// `x_∅ = 1` and `x_{τε} = x_τ (1 + (2ε-1) r_{|τ|+1})`, where `r_k` is the
/// k-th Rademacher pattern: `+1` on atoms whose k-th binary digit (most
/// significant first) is 1, `-1` elsewhere.
pub fn rademacher_tree(n: u32) -> Result<DeltaTree, RnpError> {
    if n < 1 {
        return Err(RnpError::Invalid("rademacher_tree needs depth >= 1".into()));
    }
    if n > MAX_RADEMACHER_DEPTH {
        return Err(RnpError::Cap {
            what: "tree depth",
            cap: MAX_RADEMACHER_DEPTH as u64,
        });
    }
    let atoms = 1usize << n;
    let size = (1usize << (n + 1)) - 1;
    let one = rational::int(1);
    let mut vectors: Vec<SparseVec<Rational>> = Vec::with_capacity(size);
    vectors.push(SparseVec::from_pairs((0..atoms).map(|a| (a, one.clone())).collect()));
    for i in 1..size {
        let p = (i - 1) / 2;
        let eps: i64 = if i % 2 == 1 { 0 } else { 1 };
        let k = tree_depth_of(i);
        let parent = &vectors[p];
        let pairs = parent
            .entries()
            .iter()
            .map(|(a, x)| {
                let r: i64 = if (a >> (n - k)) & 1 == 1 { 1 } else { -1 };
                (*a, x * rational::int(1 + (2 * eps - 1) * r))
            })
            .collect();
        vectors.push(SparseVec::from_pairs(pairs));
    }
    Ok(DeltaTree {
        depth: n,
        atoms,
        vectors,
        delta: one,
    })
}

/// Levels of vectors where each vector of level `n-1` is a convex
/// combination of its block of level-`n` vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaBush {
    pub atoms: usize,
    pub levels: Vec<Vec<SparseVec<Rational>>>,
    /// `parent[n][j]` is the block `k` containing `j` (level `n >= 1`).
    pub parent: Vec<Vec<usize>>,
    /// `weights[n][j] = λ_{n,j}`.
    pub weights: Vec<Vec<Rational>>,
    pub delta: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BushViolation {
    RootLevel { size: usize },
    EmptyBlock { level: usize, block: usize },
    NegativeWeight { level: usize, index: usize },
    WeightSum { level: usize, block: usize },
    Convexity { level: usize, block: usize },
    Separation { level: usize, index: usize },
    OffHyperplane { level: usize, index: usize },
}

impl DeltaBush {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// Indices of block `k` at level `n`.
    pub fn block(&self, n: usize, k: usize) -> Vec<usize> {
        (0..self.levels[n].len()).filter(|&j| self.parent[n][j] == k).collect()
    }

    /// Every violated bush identity; empty when the bush is valid.
    pub fn verify(&self) -> Vec<BushViolation> {
        let mut out = Vec::new();
        if self.levels.first().map(Vec::len) != Some(1) {
            out.push(BushViolation::RootLevel {
                size: self.levels.first().map_or(0, Vec::len),
            });
        }
        for n in 1..self.levels.len() {
            for k in 0..self.levels[n - 1].len() {
                let block = self.block(n, k);
                if block.is_empty() {
                    out.push(BushViolation::EmptyBlock { level: n, block: k });
                    continue;
                }
                let total: Rational = block.iter().map(|&j| self.weights[n][j].clone()).sum();
                if total != rational::int(1) {
                    out.push(BushViolation::WeightSum { level: n, block: k });
                }
                let combo = block.iter().fold(SparseVec::new(), |acc, &j| {
                    acc.add(&self.levels[n][j].scale(&self.weights[n][j]))
                });
                if combo != self.levels[n - 1][k] {
                    out.push(BushViolation::Convexity { level: n, block: k });
                }
            }
            for j in 0..self.levels[n].len() {
                if self.weights[n][j].is_negative() {
                    out.push(BushViolation::NegativeWeight { level: n, index: j });
                }
                let k = self.parent[n][j];
                let sep = normalized_l1(&self.levels[n][j].sub(&self.levels[n - 1][k]), self.atoms);
                if sep < self.delta {
                    out.push(BushViolation::Separation { level: n, index: j });
                }
            }
        }
        out
    }

    pub fn on_hyperplane(&self) -> bool {
        self.hyperplane_violations().is_empty()
    }

    fn hyperplane_violations(&self) -> Vec<BushViolation> {
        let one = rational::int(1);
        let mut out = Vec::new();
        for (n, level) in self.levels.iter().enumerate() {
            for (j, z) in level.iter().enumerate() {
                if mean(z, self.atoms) != one {
                    out.push(BushViolation::OffHyperplane { level: n, index: j });
                }
            }
        }
        out
    }

    /// Projects every vector onto `ker x*` along the constant vector `e`
    /// and then adds `e`, so that `x*(z) = 1` everywhere. `δ` becomes the
    /// smallest separation after the move.
    pub fn shifted_to_hyperplane(&self) -> DeltaBush {
        let e = SparseVec::from_pairs((0..self.atoms).map(|a| (a, rational::int(1))).collect());
        let levels: Vec<Vec<SparseVec<Rational>>> = self
            .levels
            .iter()
            .map(|level| {
                level
                    .iter()
                    .map(|z| {
                        let m = mean(z, self.atoms);
                        z.sub(&e.scale(&m)).add(&e)
                    })
                    .collect()
            })
            .collect();
        let mut delta: Option<Rational> = None;
        for n in 1..levels.len() {
            for (j, z) in levels[n].iter().enumerate() {
                let sep = normalized_l1(&z.sub(&levels[n - 1][self.parent[n][j]]), self.atoms);
                if delta.as_ref().is_none_or(|d| sep < *d) {
                    delta = Some(sep);
                }
            }
        }
        DeltaBush {
            atoms: self.atoms,
            levels,
            parent: self.parent.clone(),
            weights: self.weights.clone(),
            delta: delta.unwrap_or_else(|| self.delta.clone()),
        }
    }

    pub fn all_vectors(&self) -> impl Iterator<Item = &SparseVec<Rational>> {
        self.levels.iter().flatten()
    }
}

/// A δ-tree read as a δ-bush with blocks of size two and weights `1/2`.
pub fn tree_to_bush(tree: &DeltaTree) -> Result<DeltaBush, RnpError> {
    let report = tree.verify();
    if !report.is_valid() {
        return Err(RnpError::InvalidTree(format!(
            "midpoint failures at {:?}, separation failures at {:?}",
            report.midpoint_failures, report.separation_failures
        )));
    }
    let n = tree.depth as usize;
    let mut levels = Vec::with_capacity(n + 1);
    let mut parent = Vec::with_capacity(n + 1);
    let mut weights = Vec::with_capacity(n + 1);
    for level in 0..=n {
        let first = (1usize << level) - 1;
        let count = 1usize << level;
        levels.push(tree.vectors[first..first + count].to_vec());
        parent.push(if level == 0 {
            Vec::new()
        } else {
            (0..count).map(|j| j / 2).collect()
        });
        weights.push(vec![rational::frac(1, 2); if level == 0 { 0 } else { count }]);
    }
    let bush = DeltaBush {
        atoms: tree.atoms,
        levels,
        parent,
        weights,
        delta: tree.delta.clone(),
    };
    let violations = bush.verify();
    if !violations.is_empty() {
        return Err(RnpError::InvalidBush(format!("{violations:?}")));
    }
    Ok(bush)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn rademacher_identities() {
        for n in 1..=8 {
            let t = rademacher_tree(n).unwrap();
            let r = t.verify();
            assert!(r.is_valid(), "n={n}");
            assert_eq!((r.min_norm.clone(), r.max_norm.clone()), (int(1), int(1)));
            assert_eq!(r.min_separation, int(1));
        }
        assert!(rademacher_tree(0).is_err());
        assert!(rademacher_tree(MAX_RADEMACHER_DEPTH + 1).is_err());
    }

    #[test]
    fn entries_are_dyadic_indicators() {
        let t = rademacher_tree(3).unwrap();
        // x_"10" is 4 on atoms 100 and 101.
        let v = &t.vectors[crate::generators::tree_index("10").unwrap()];
        assert_eq!(v.entries(), &[(4, int(4)), (5, int(4))]);
    }

    #[test]
    fn bush_from_tree() {
        let t = rademacher_tree(1).unwrap();
        let b = tree_to_bush(&t).unwrap();
        assert_eq!(b.levels[1].len(), 2);
        assert_eq!(b.weights[1], vec![rational::frac(1, 2); 2]);
        assert_eq!(b.delta, t.delta);
        assert!(b.verify().is_empty());
        assert!(b.on_hyperplane());
        assert_eq!(b.shifted_to_hyperplane(), b);
    }

    #[test]
    fn corrupted_tree_is_rejected() {
        let mut t = rademacher_tree(2).unwrap();
        t.vectors[3] = t.vectors[3].scale(&int(2));
        assert!(!t.verify().midpoint_failures.is_empty());
        assert!(matches!(tree_to_bush(&t), Err(RnpError::InvalidTree(_))));
    }

    #[test]
    fn shift_moves_a_kernel_bush_to_the_hyperplane() {
        let t = rademacher_tree(2).unwrap();
        let b = tree_to_bush(&t).unwrap();
        let e = SparseVec::from_pairs((0..4).map(|a| (a, int(1))).collect());
        let kernel = DeltaBush {
            levels: b.levels.iter().map(|l| l.iter().map(|z| z.sub(&e)).collect()).collect(),
            ..b.clone()
        };
        assert!(!kernel.on_hyperplane());
        let shifted = kernel.shifted_to_hyperplane();
        assert!(shifted.on_hyperplane());
        assert!(shifted.verify().is_empty());
        assert_eq!(shifted.levels, b.levels);
    }
}
