use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::MetricError;
use crate::rational::{self, Rational};

/// A point of a finite space: its index and an optional human-readable label
/// (binary strings for tree vertices, tuples for products, matrices for the
/// Heisenberg group).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointId {
    #[serde(rename = "id")]
    pub index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl PointId {
    pub fn new(index: usize) -> Self {
        PointId { index, label: None }
    }

    pub fn labeled(index: usize, label: impl Into<String>) -> Self {
        PointId {
            index,
            label: Some(label.into()),
        }
    }

    /// Label if present, otherwise the index.
    pub fn display(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.index.to_string())
    }
}

pub(crate) fn check_points(points: &[PointId]) -> Result<(), MetricError> {
    let mut labels = HashSet::new();
    for (position, p) in points.iter().enumerate() {
        if p.index != position {
            return Err(MetricError::NonContiguousIds {
                position,
                found: p.index,
            });
        }
        if let Some(l) = &p.label {
            if !labels.insert(l.as_str()) {
                return Err(MetricError::DuplicateLabel(l.clone()));
            }
        }
    }
    Ok(())
}

/// Anything that can report exact distances between `size()` indexed points.
///
/// Tables implement it directly; implicit metrics (very deep trees) compute
/// distances on demand.
pub trait Metric {
    fn size(&self) -> usize;

    fn dist(&self, i: usize, j: usize) -> Rational;

    fn dist_f64(&self, i: usize, j: usize) -> f64 {
        rational::to_f64(&self.dist(i, j))
    }
}

/// A finite point set with an exact pairwise distance table.
///
/// Construction only checks the shape of the table; use
/// [`verify_metric`](super::verify_metric) to check the metric axioms.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpace {
    points: Vec<PointId>,
    dist: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct MetricSpaceJson {
    points: Vec<PointId>,
    dist: Vec<Vec<String>>,
}

impl MetricSpace {
    pub fn from_table(points: Vec<PointId>, table: Vec<Vec<Rational>>) -> Result<Self, MetricError> {
        check_points(&points)?;
        let n = points.len();
        if table.len() != n {
            return Err(MetricError::BadShape {
                n,
                row_len: table.len(),
            });
        }
        let mut dist = Vec::with_capacity(n * n);
        for row in table {
            if row.len() != n {
                return Err(MetricError::BadShape { n, row_len: row.len() });
            }
            dist.extend(row);
        }
        Ok(MetricSpace { points, dist })
    }

    /// Unlabeled space from a table.
    pub fn from_rows(table: Vec<Vec<Rational>>) -> Result<Self, MetricError> {
        let points = (0..table.len()).map(PointId::new).collect();
        Self::from_table(points, table)
    }

    /// Builds the table by evaluating `f` on every ordered pair.
    pub fn from_fn(points: Vec<PointId>, mut f: impl FnMut(usize, usize) -> Rational) -> Result<Self, MetricError> {
        check_points(&points)?;
        let n = points.len();
        let mut dist = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                dist.push(if i == j {
                    Rational::from_integer(0.into())
                } else {
                    f(i, j)
                });
            }
        }
        Ok(MetricSpace { points, dist })
    }

    pub(crate) fn from_flat(points: Vec<PointId>, dist: Vec<Rational>) -> Self {
        debug_assert_eq!(dist.len(), points.len() * points.len());
        MetricSpace { points, dist }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[PointId] {
        &self.points
    }

    pub fn d(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i * self.points.len() + j]
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        let n = self.points.len();
        &self.dist[i * n..(i + 1) * n]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p.label.as_deref() == Some(label))
    }

    /// The largest pairwise distance.
    pub fn diameter(&self) -> Rational {
        self.dist.iter().max().cloned().unwrap_or_else(|| rational::int(0))
    }

    /// Restriction to `indices`, relabeled contiguously in the given order.
    pub fn subspace(&self, indices: &[usize]) -> MetricSpace {
        let points = indices
            .iter()
            .enumerate()
            .map(|(k, &i)| PointId {
                index: k,
                label: self.points[i].label.clone(),
            })
            .collect();
        let mut dist = Vec::with_capacity(indices.len() * indices.len());
        for &i in indices {
            for &j in indices {
                dist.push(self.d(i, j).clone());
            }
        }
        MetricSpace { points, dist }
    }

    /// Every distance multiplied by `factor`.
    pub fn scaled(&self, factor: &Rational) -> MetricSpace {
        MetricSpace {
            points: self.points.clone(),
            dist: self.dist.iter().map(|d| d * factor).collect(),
        }
    }

    /// Distance table as CSV of rational strings, one row per point.
    pub fn to_csv(&self) -> String {
        let n = self.len();
        let mut out = String::new();
        for i in 0..n {
            let row: Vec<String> = self.row(i).iter().map(rational::format).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let n = self.len();
        let doc = MetricSpaceJson {
            points: self.points.clone(),
            dist: (0..n)
                .map(|i| self.row(i).iter().map(rational::format).collect())
                .collect(),
        };
        serde_json::to_value(doc).expect("metric space serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, MetricError> {
        let doc: MetricSpaceJson =
            serde_json::from_value(value.clone()).map_err(|e| MetricError::Parse(e.to_string()))?;
        let table = doc
            .dist
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| rational::parse(s).map_err(|e| MetricError::Parse(e.to_string())))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_table(doc.points, table)
    }
}

impl Metric for MetricSpace {
    fn size(&self) -> usize {
        self.len()
    }

    fn dist(&self, i: usize, j: usize) -> Rational {
        self.d(i, j).clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn rejects_ragged_tables_and_bad_ids() {
        let bad = MetricSpace::from_rows(vec![vec![int(0), int(1)], vec![int(1)]]);
        assert!(matches!(bad, Err(MetricError::BadShape { .. })));
        let ids = vec![PointId::new(1)];
        assert!(matches!(
            MetricSpace::from_table(ids, vec![vec![int(0)]]),
            Err(MetricError::NonContiguousIds { .. })
        ));
        let dup = vec![PointId::labeled(0, "a"), PointId::labeled(1, "a")];
        assert!(matches!(
            MetricSpace::from_table(dup, vec![vec![int(0), int(1)], vec![int(1), int(0)]]),
            Err(MetricError::DuplicateLabel(_))
        ));
    }

    #[test]
    fn json_and_subspace() {
        let s = MetricSpace::from_table(
            vec![PointId::labeled(0, "x"), PointId::new(1), PointId::new(2)],
            vec![
                vec![int(0), int(1), int(2)],
                vec![int(1), int(0), int(1)],
                vec![int(2), int(1), int(0)],
            ],
        )
        .unwrap();
        let back = MetricSpace::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        let sub = s.subspace(&[2, 0]);
        assert_eq!(sub.d(0, 1), &int(2));
        assert_eq!(sub.points()[1].label.as_deref(), Some("x"));
        assert_eq!(s.to_csv(), "0,1,2\n1,0,1\n2,1,0\n");
    }
}
