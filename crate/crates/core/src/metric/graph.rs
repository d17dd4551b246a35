use std::collections::{HashSet, VecDeque};

use num_traits::Signed;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::space::check_points;
use super::{MetricError, PointId};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub len: Rational,
}

/// Undirected graph with positive rational edge lengths.
///
/// Self-loops, duplicate edges and non-positive lengths are rejected at
/// construction. Connectivity is checked by [`apsp`](super::apsp), which
/// needs to name an unreachable pair.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    vertices: Vec<PointId>,
    edges: Vec<Edge>,
    adj: Vec<Vec<(usize, usize)>>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<PointId>,
    edges: Vec<(usize, usize, Value)>,
}

impl WeightedGraph {
    pub fn new(vertices: Vec<PointId>, edges: Vec<Edge>) -> Result<Self, MetricError> {
        check_points(&vertices)?;
        let n = vertices.len();
        let mut seen = HashSet::with_capacity(edges.len());
        let mut adj = vec![Vec::new(); n];
        for (k, e) in edges.iter().enumerate() {
            for &x in &[e.u, e.v] {
                if x >= n {
                    return Err(MetricError::VertexOutOfRange { index: x, size: n });
                }
            }
            if e.u == e.v {
                return Err(MetricError::SelfLoop(e.u));
            }
            if !e.len.is_positive() {
                return Err(MetricError::NonPositiveLength(e.u, e.v, rational::format(&e.len)));
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(MetricError::DuplicateEdge(e.u, e.v));
            }
            adj[e.u].push((e.v, k));
            adj[e.v].push((e.u, k));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(WeightedGraph { vertices, edges, adj })
    }

    /// Unlabeled graph on `n` vertices.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Result<Self, MetricError> {
        let vertices = (0..n).map(PointId::new).collect();
        let edges = edges.into_iter().map(|(u, v, len)| Edge { u, v, len }).collect();
        Self::new(vertices, edges)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[PointId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbours of `v` in increasing index order, with the edge index.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Length of the edge between `u` and `v`, if adjacent.
    pub fn edge_len(&self, u: usize, v: usize) -> Option<&Rational> {
        self.adj[u]
            .binary_search_by(|&(w, _)| w.cmp(&v))
            .ok()
            .map(|pos| &self.edges[self.adj[u][pos].1].len)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.vertices.iter().position(|p| p.label.as_deref() == Some(label))
    }

    /// First vertex not reachable from vertex 0, if any.
    pub fn unreachable_from_first(&self) -> Option<usize> {
        let n = self.len();
        if n == 0 {
            return None;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen.iter().position(|s| !s)
    }

    pub fn is_connected(&self) -> bool {
        self.unreachable_from_first().is_none()
    }

    /// Same graph with every length multiplied by `factor` (> 0).
    pub fn scaled(&self, factor: &Rational) -> Result<Self, MetricError> {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                u: e.u,
                v: e.v,
                len: &e.len * factor,
            })
            .collect();
        Self::new(self.vertices.clone(), edges)
    }

    pub fn to_json(&self) -> Value {
        let doc = GraphJson {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| (e.u, e.v, Value::String(rational::format(&e.len))))
                .collect(),
        };
        serde_json::to_value(doc).expect("graph serializes")
    }

    /// Reads the JSON graph format. Lengths may be rational strings or JSON
    /// numbers; unknown top-level keys are ignored.
    pub fn from_json(value: &Value) -> Result<Self, MetricError> {
        let doc: GraphJson = serde_json::from_value(value.clone()).map_err(|e| MetricError::Parse(e.to_string()))?;
        let mut edges = Vec::with_capacity(doc.edges.len());
        for (u, v, len) in doc.edges {
            let text = match &len {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                other => return Err(MetricError::Parse(format!("bad edge length {other}"))),
            };
            let len = rational::parse(&text).map_err(|e| MetricError::Parse(e.to_string()))?;
            if len.is_zero() {
                return Err(MetricError::NonPositiveLength(u, v, text));
            }
            edges.push(Edge { u, v, len });
        }
        Self::new(doc.vertices, edges)
    }
}
