use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use super::{DeltaBush, GaugeNorm, RnpError};
use crate::embeddings::SparseVec;
use crate::rational::{self, Rational};

pub const MAX_LINE_DEPTH: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TermKind {
    /// Bush vector `x_{level,index}`.
    X { level: usize, index: usize },
    /// `(x_{level-1,parent} + x_{level,index}) / 2`.
    Y { level: usize, index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Term {
    #[serde(with = "rational::serde_str")]
    pub coef: Rational,
    #[serde(flatten)]
    pub kind: TermKind,
}

/// A polygonal path from 0 to `x_{0,0}` whose segments are multiples of
/// bush vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct BrokenLine {
    /// Binary label; the empty string is the root line.
    pub label: String,
    pub terms: Vec<Term>,
    pub segments: Vec<SparseVec<Rational>>,
    /// Partial sums of the segments, starting at 0.
    pub vertices: Vec<SparseVec<Rational>>,
    /// Gauge arc length at each vertex.
    pub params: Vec<Rational>,
}

impl BrokenLine {
    pub fn length(&self) -> &Rational {
        self.params.last().expect("line has a start vertex")
    }
}

#[derive(Debug)]
pub struct BrokenLineFamily {
    pub depth: usize,
    /// Lines in level order of their labels.
    pub lines: Vec<BrokenLine>,
    pub gauge: Arc<GaugeNorm>,
    /// Smallest gauge distance between a bush vector and its parent.
    pub delta_gauge: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineReport {
    #[serde(with = "rational::serde_str")]
    pub delta_gauge: Rational,
    #[serde(serialize_with = "ser_labeled")]
    pub lengths: Vec<(String, Rational)>,
    pub length_failures: Vec<String>,
    /// Vertexwise gauge deviation between the lines `τ0` and `τ1`.
    #[serde(serialize_with = "ser_labeled")]
    pub deviations: Vec<(String, Rational)>,
    pub deviation_failures: Vec<String>,
    /// Pairs `(τ, σ)` with `σ` extending `τ` where a vertex of `τ` is
    /// missing from `σ` at the same parameter.
    pub monotonicity_failures: Vec<(String, String)>,
}

fn ser_labeled<S: serde::Serializer>(v: &[(String, Rational)], s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(
        v.iter()
            .map(|(l, r)| (if l.is_empty() { "∅" } else { l.as_str() }, rational::format(r))),
    )
}

impl LineReport {
    pub fn is_valid(&self) -> bool {
        self.length_failures.is_empty() && self.deviation_failures.is_empty() && self.monotonicity_failures.is_empty()
    }
}

fn label_of(i: usize) -> String {
    crate::generators::tree_label(i)
}

struct Builder<'a> {
    bush: &'a DeltaBush,
    children: Vec<Vec<Vec<usize>>>,
}

impl Builder<'_> {
    fn preliminary(&self, terms: &[Term]) -> Vec<Term> {
        let mut out = Vec::new();
        for t in terms {
            let TermKind::X { level, index } = t.kind else {
                unreachable!("lines consist of bush vectors")
            };
            for &j in &self.children[level + 1][index] {
                out.push(Term {
                    coef: &t.coef * &self.bush.weights[level + 1][j],
                    kind: TermKind::Y {
                        level: level + 1,
                        index: j,
                    },
                });
            }
        }
        out
    }

    fn split(&self, terms: &[Term], theta: u8) -> Vec<Term> {
        let half = rational::frac(1, 2);
        let mut out = Vec::with_capacity(2 * terms.len());
        for t in terms {
            let TermKind::Y { level, index } = t.kind else {
                unreachable!("preliminary lines consist of midpoints")
            };
            let c = &t.coef * &half;
            let parent = Term {
                coef: c.clone(),
                kind: TermKind::X {
                    level: level - 1,
                    index: self.bush.parent[level][index],
                },
            };
            let child = Term {
                coef: c,
                kind: TermKind::X { level, index },
            };
            if theta == 0 {
                out.extend([parent, child]);
            } else {
                out.extend([child, parent]);
            }
        }
        out
    }

    fn vector(&self, t: &Term) -> SparseVec<Rational> {
        let half = rational::frac(1, 2);
        match t.kind {
            TermKind::X { level, index } => self.bush.levels[level][index].scale(&t.coef),
            TermKind::Y { level, index } => {
                let p = &self.bush.levels[level - 1][self.bush.parent[level][index]];
                p.add(&self.bush.levels[level][index]).scale(&(&t.coef * &half))
            }
        }
    }
}

/// All broken lines with labels of length at most `depth`.
///
/// The bush must be valid and lie on the hyperplane `x* = 1`.
pub fn broken_line_family(bush: &DeltaBush, depth: usize) -> Result<BrokenLineFamily, RnpError> {
    let violations = bush.verify();
    if !violations.is_empty() {
        return Err(RnpError::InvalidBush(format!("{violations:?}")));
    }
    if !bush.on_hyperplane() {
        return Err(RnpError::NotOnHyperplane);
    }
    if depth > bush.depth() {
        return Err(RnpError::Invalid(format!(
            "line depth {depth} exceeds bush depth {}",
            bush.depth()
        )));
    }
    if depth > MAX_LINE_DEPTH {
        return Err(RnpError::Cap {
            what: "broken line depth",
            cap: MAX_LINE_DEPTH as u64,
        });
    }
    let gauge = Arc::new(GaugeNorm::from_bush(bush)?);
    let mut children = vec![Vec::new()];
    for n in 1..bush.levels.len() {
        children.push((0..bush.levels[n - 1].len()).map(|k| bush.block(n, k)).collect());
    }
    let b = Builder { bush, children };
    let root = vec![Term {
        coef: rational::int(1),
        kind: TermKind::X { level: 0, index: 0 },
    }];
    let mut term_lists = vec![root];
    for i in 0..(1usize << depth) - 1 {
        let pre = b.preliminary(&term_lists[i]);
        term_lists.push(b.split(&pre, 0));
        term_lists.push(b.split(&pre, 1));
    }
    let mut lengths: HashMap<Term, Rational> = HashMap::new();
    let mut lines = Vec::with_capacity(term_lists.len());
    for (i, terms) in term_lists.into_iter().enumerate() {
        let segments: Vec<SparseVec<Rational>> = terms.iter().map(|t| b.vector(t)).collect();
        let mut vertices = vec![SparseVec::new()];
        let mut params = vec![rational::int(0)];
        for (t, s) in terms.iter().zip(&segments) {
            let len = match lengths.get(t) {
                Some(l) => l.clone(),
                None => {
                    let l = gauge.eval_sparse(s)?;
                    lengths.insert(t.clone(), l.clone());
                    l
                }
            };
            vertices.push(vertices.last().expect("nonempty").add(s));
            params.push(params.last().expect("nonempty") + len);
        }
        lines.push(BrokenLine {
            label: label_of(i),
            terms,
            segments,
            vertices,
            params,
        });
    }
    let mut delta_gauge: Option<Rational> = None;
    for n in 1..bush.levels.len() {
        for (j, z) in bush.levels[n].iter().enumerate() {
            let d = gauge.eval_sparse(&z.sub(&bush.levels[n - 1][bush.parent[n][j]]))?;
            if delta_gauge.as_ref().is_none_or(|m| d < *m) {
                delta_gauge = Some(d);
            }
        }
    }
    Ok(BrokenLineFamily {
        depth,
        lines,
        gauge,
        delta_gauge: delta_gauge.unwrap_or_else(|| rational::int(0)),
    })
}

impl BrokenLineFamily {
    pub fn line(&self, label: &str) -> Option<&BrokenLine> {
        crate::generators::tree_index(label).and_then(|i| self.lines.get(i))
    }

    /// Exact check of unit gauge length, the deviation lower bound
    /// `δ_gauge / 2` between sibling lines and vertex monotonicity.
    pub fn check(&self) -> Result<LineReport, RnpError> {
        let one = rational::int(1);
        let mut lengths = Vec::new();
        let mut length_failures = Vec::new();
        for l in &self.lines {
            lengths.push((l.label.clone(), l.length().clone()));
            let increasing = l.params.windows(2).all(|w| w[0] < w[1]);
            if *l.length() != one || !increasing {
                length_failures.push(l.label.clone());
            }
        }
        let bound = &self.delta_gauge * rational::frac(1, 2);
        let mut deviations = Vec::new();
        let mut deviation_failures = Vec::new();
        for i in 0..self.lines.len() {
            let (c0, c1) = (2 * i + 1, 2 * i + 2);
            if c1 >= self.lines.len() {
                break;
            }
            let (a, b) = (&self.lines[c0], &self.lines[c1]);
            let mut dev = rational::int(0);
            for (p, q) in a.vertices.iter().zip(&b.vertices) {
                dev += self.gauge.eval_sparse(&p.sub(q))?;
            }
            if dev < bound {
                deviation_failures.push(self.lines[i].label.clone());
            }
            deviations.push((self.lines[i].label.clone(), dev));
        }
        let mut monotonicity_failures = Vec::new();
        for (i, l) in self.lines.iter().enumerate() {
            let mut stack = vec![2 * i + 1, 2 * i + 2];
            while let Some(j) = stack.pop() {
                if j >= self.lines.len() {
                    continue;
                }
                let ext = &self.lines[j];
                let contained = l
                    .vertices
                    .iter()
                    .zip(&l.params)
                    .all(|(v, t)| ext.params.binary_search(t).is_ok_and(|pos| ext.vertices[pos] == *v));
                if !contained {
                    monotonicity_failures.push((l.label.clone(), ext.label.clone()));
                }
                stack.extend([2 * j + 1, 2 * j + 2]);
            }
        }
        Ok(LineReport {
            delta_gauge: self.delta_gauge.clone(),
            lengths,
            length_failures,
            deviations,
            deviation_failures,
            monotonicity_failures,
        })
    }
}
