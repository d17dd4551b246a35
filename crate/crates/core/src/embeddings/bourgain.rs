use super::{EmbedError, Embedding, NormedTarget, SparseVec};
use crate::generators::{tree_children, tree_depth_of, tree_label, tree_parent};
use crate::rational::{self, Rational};

pub const MAX_BOURGAIN_DEPTH: u32 = 16;

/// `ψ(θ_1..θ_k) = Σ 2^{-i} (2θ_i - 1)`; the root maps to 0.
pub fn psi(label: &str) -> Rational {
    label
        .chars()
        .enumerate()
        .map(|(i, c)| {
            let s = if c == '1' { 1 } else { -1 };
            rational::inv_pow(2, i as u32 + 1) * rational::int(s)
        })
        .sum()
}

/// `ψ` on every vertex of `T_n` and its rank relabelling `φ` onto
/// `1..=2^{n+1}-1`, both indexed by level-order vertex index.
#[derive(Debug, Clone, PartialEq)]
pub struct BourgainLabeling {
    pub depth: u32,
    pub psi: Vec<Rational>,
    pub phi: Vec<usize>,
}

impl BourgainLabeling {
    pub fn new(n: u32) -> Result<Self, EmbedError> {
        if n > MAX_BOURGAIN_DEPTH {
            return Err(EmbedError::Budget {
                what: "tree depth",
                cap: MAX_BOURGAIN_DEPTH as u64,
            });
        }
        let size = (1usize << (n + 1)) - 1;
        let psi: Vec<Rational> = (0..size).map(|i| psi(&tree_label(i))).collect();
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&a, &b| psi[a].cmp(&psi[b]));
        let mut phi = vec![0; size];
        for (rank, &v) in order.iter().enumerate() {
            phi[v] = rank + 1;
        }
        Ok(BourgainLabeling { depth: n, psi, phi })
    }

    pub fn size(&self) -> usize {
        self.phi.len()
    }

    /// First non-leaf vertex whose two child subtrees do not map onto
    /// disjoint integer intervals, if any.
    pub fn first_interval_violation(&self) -> Option<usize> {
        let size = self.size();
        // (min, max, count) of φ over each subtree, children before parents.
        let mut span = vec![(usize::MAX, 0usize, 0usize); size];
        for v in (0..size).rev() {
            let mut s = (self.phi[v], self.phi[v], 1);
            let [c0, c1] = tree_children(v);
            if c1 < size {
                for c in [c0, c1] {
                    s = (s.0.min(span[c].0), s.1.max(span[c].1), s.2 + span[c].2);
                }
                let (a, b) = (span[c0], span[c1]);
                let contiguous = |x: (usize, usize, usize)| x.1 - x.0 + 1 == x.2;
                let disjoint = a.1 < b.0 || b.1 < a.0;
                if !(contiguous(a) && contiguous(b) && disjoint) {
                    return Some(v);
                }
            }
            span[v] = s;
        }
        None
    }
}

/// `t -> Σ_{s <= t} e_{φ(s)}` (sum over `t` and its ancestors) in the
/// summing-norm space of dimension `2^{n+1}-1`.
pub fn bourgain_embed(n: u32) -> Result<Embedding<Rational>, EmbedError> {
    if n < 1 {
        return Err(EmbedError::Invalid("bourgain_embed needs depth >= 1".into()));
    }
    let lab = BourgainLabeling::new(n)?;
    let size = lab.size();
    let one = rational::int(1);
    let vectors = (0..size)
        .map(|t| {
            let mut pairs = Vec::with_capacity(tree_depth_of(t) as usize + 1);
            let mut cur = Some(t);
            while let Some(s) = cur {
                pairs.push((lab.phi[s] - 1, one.clone()));
                cur = tree_parent(s);
            }
            SparseVec::from_pairs(pairs)
        })
        .collect();
    Embedding::new(vectors, NormedTarget::summing(size))
}
