use num_traits::{Signed, Zero};
use serde::Serialize;

use super::MetricSpace;

/// One violated axiom instance, by point index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum Violation {
    /// `dist[i][i] != 0`.
    NonzeroDiagonal {
        i: usize,
    },
    /// `dist[i][j] == 0` for `i != j`.
    Identity {
        i: usize,
        j: usize,
    },
    Negative {
        i: usize,
        j: usize,
    },
    /// `dist[i][j] != dist[j][i]`, reported once with `i < j`.
    Symmetry {
        i: usize,
        j: usize,
    },
    /// `dist[i][j] > dist[i][k] + dist[k][j]`.
    Triangle {
        i: usize,
        j: usize,
        k: usize,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MetricReport {
    pub violations: Vec<Violation>,
}

impl MetricReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lists every violated metric axiom. Triangle instances are checked over
/// all ordered pairs `i != j` and intermediate points `k` distinct from both.
pub fn verify_metric(space: &MetricSpace) -> MetricReport {
    let n = space.len();
    let mut violations = Vec::new();
    for i in 0..n {
        if !space.d(i, i).is_zero() {
            violations.push(Violation::NonzeroDiagonal { i });
        }
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = space.d(i, j);
            if d.is_zero() {
                violations.push(Violation::Identity { i, j });
            } else if d.is_negative() {
                violations.push(Violation::Negative { i, j });
            }
            if i < j && d != space.d(j, i) {
                violations.push(Violation::Symmetry { i, j });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = space.d(i, j);
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                if *d > space.d(i, k) + space.d(k, j) {
                    violations.push(Violation::Triangle { i, j, k });
                }
            }
        }
    }
    MetricReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn table(rows: &[[i64; 3]]) -> MetricSpace {
        MetricSpace::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn triangle_violation_is_located() {
        let s = table(&[[0, 1, 3], [1, 0, 1], [3, 1, 0]]);
        let r = verify_metric(&s);
        assert!(r.violations.contains(&Violation::Triangle { i: 0, j: 2, k: 1 }));
        assert!(r.violations.contains(&Violation::Triangle { i: 2, j: 0, k: 1 }));
        assert_eq!(r.violations.len(), 2);
    }

    #[test]
    fn identity_and_symmetry() {
        let s = table(&[[0, 0, 1], [0, 0, 1], [1, 2, 0]]);
        let r = verify_metric(&s);
        assert!(r.violations.contains(&Violation::Identity { i: 0, j: 1 }));
        assert!(r.violations.contains(&Violation::Symmetry { i: 1, j: 2 }));
        let ok = table(&[[0, 1, 2], [1, 0, 1], [2, 1, 0]]);
        assert!(verify_metric(&ok).is_valid());
    }
}
