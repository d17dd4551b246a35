use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::{shortest_from, MetricError, PointId, WeightedGraph};
use crate::rational::{self, Rational};

pub const DEFAULT_GEODESIC_CAP: usize = 1_000_000;

/// A shortest vertex path with cumulative lengths at each vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeodesicPath {
    pub vertices: Vec<usize>,
    #[serde(with = "rational::serde_vec_str")]
    pub breakpoints: Vec<Rational>,
}

impl GeodesicPath {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn length(&self) -> &Rational {
        self.breakpoints.last().expect("nonempty path")
    }

    pub fn point_ids(&self, graph: &WeightedGraph) -> Vec<PointId> {
        self.vertices.iter().map(|&v| graph.vertices()[v].clone()).collect()
    }

    /// Position of the vertex at parameter `t`, if `t` is a breakpoint.
    pub fn vertex_at(&self, t: &Rational) -> Option<usize> {
        self.breakpoints.binary_search(t).ok().map(|k| self.vertices[k])
    }
}

/// Vertices and edges that lie on some shortest `u`–`v` path, as a DAG
/// oriented away from `u`, plus the distances from `u`.
struct GeodesicDag {
    from_u: Vec<Rational>,
    succ: Vec<Vec<usize>>,
    order: Vec<usize>,
}

fn geodesic_dag(graph: &WeightedGraph, u: usize, v: usize) -> Result<GeodesicDag, MetricError> {
    let du = shortest_from(graph, u);
    let dv = shortest_from(graph, v);
    let total = match &du[v] {
        Some(d) => d.clone(),
        None => {
            return Err(MetricError::Disconnected {
                u: graph.vertices()[u].display(),
                v: graph.vertices()[v].display(),
            })
        }
    };
    let n = graph.len();
    let on_path: Vec<bool> = (0..n)
        .map(|x| match (&du[x], &dv[x]) {
            (Some(a), Some(b)) => a + b == total,
            _ => false,
        })
        .collect();
    let from_u: Vec<Rational> = du.into_iter().map(|d| d.unwrap_or_else(|| rational::int(-1))).collect();
    let mut succ = vec![Vec::new(); n];
    for x in (0..n).filter(|&x| on_path[x]) {
        for &(y, e) in graph.neighbors(x) {
            if on_path[y] && &from_u[x] + &graph.edges()[e].len == from_u[y] {
                succ[x].push(y);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).filter(|&x| on_path[x]).collect();
    order.sort_by(|a, b| from_u[*a].cmp(&from_u[*b]).then(a.cmp(b)));
    Ok(GeodesicDag { from_u, succ, order })
}

/// Number of shortest `u`–`v` paths, counted exactly.
pub fn count_geodesics(graph: &WeightedGraph, u: usize, v: usize) -> Result<BigUint, MetricError> {
    let dag = geodesic_dag(graph, u, v)?;
    let mut count = vec![BigUint::zero(); graph.len()];
    count[u] = BigUint::from(1u32);
    for &x in &dag.order {
        let c = count[x].clone();
        for &y in &dag.succ[x] {
            count[y] += &c;
        }
    }
    Ok(count[v].clone())
}

/// All distinct shortest `u`–`v` vertex paths, in lexicographic order of
/// their vertex sequences. Fails if there are more than `cap`.
pub fn enumerate_geodesic_paths(
    graph: &WeightedGraph,
    u: usize,
    v: usize,
    cap: usize,
) -> Result<Vec<GeodesicPath>, MetricError> {
    let n = graph.len();
    for &x in &[u, v] {
        if x >= n {
            return Err(MetricError::VertexOutOfRange { index: x, size: n });
        }
    }
    if u == v {
        return Err(MetricError::SameEndpoints(u));
    }
    let count = count_geodesics(graph, u, v)?;
    if count.to_usize().is_none_or(|c| c > cap) {
        return Err(MetricError::TooManyGeodesics {
            count: count.to_string(),
            cap,
        });
    }
    let dag = geodesic_dag(graph, u, v)?;
    let mut out = Vec::with_capacity(count.to_usize().unwrap_or(0));
    let mut stack = vec![u];
    walk(&dag, v, &mut stack, &mut out);
    Ok(out)
}

fn walk(dag: &GeodesicDag, target: usize, stack: &mut Vec<usize>, out: &mut Vec<GeodesicPath>) {
    let x = *stack.last().expect("nonempty stack");
    if x == target {
        out.push(GeodesicPath {
            vertices: stack.clone(),
            breakpoints: stack.iter().map(|&y| dag.from_u[y].clone()).collect(),
        });
        return;
    }
    for &y in &dag.succ[x] {
        stack.push(y);
        walk(dag, target, stack, out);
        stack.pop();
    }
}
