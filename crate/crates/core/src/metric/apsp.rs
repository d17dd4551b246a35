use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::{MetricError, MetricSpace, WeightedGraph};
use crate::rational::{self, Rational};

/// Single-source shortest-path lengths by Dijkstra; `None` marks
/// unreachable vertices.
pub fn shortest_from(graph: &WeightedGraph, source: usize) -> Vec<Option<Rational>> {
    let n = graph.len();
    let mut dist: Vec<Option<Rational>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(rational::int(0));
    heap.push(Reverse((rational::int(0), source)));
    while let Some(Reverse((d, x))) = heap.pop() {
        if done[x] {
            continue;
        }
        done[x] = true;
        for &(y, e) in graph.neighbors(x) {
            if done[y] {
                continue;
            }
            let cand = &d + &graph.edges()[e].len;
            let better = match &dist[y] {
                Some(cur) => cand < *cur,
                None => true,
            };
            if better {
                dist[y] = Some(cand.clone());
                heap.push(Reverse((cand, y)));
            }
        }
    }
    dist
}

/// Exact all-pairs shortest-path metric of a connected graph.
pub fn apsp(graph: &WeightedGraph) -> Result<MetricSpace, MetricError> {
    if let Some(v) = graph.unreachable_from_first() {
        return Err(MetricError::Disconnected {
            u: graph.vertices()[0].display(),
            v: graph.vertices()[v].display(),
        });
    }
    let n = graph.len();
    let rows: Vec<Vec<Rational>> = (0..n)
        .into_par_iter()
        .map(|s| {
            shortest_from(graph, s)
                .into_iter()
                .map(|d| d.expect("connected graph"))
                .collect()
        })
        .collect();
    let mut flat = Vec::with_capacity(n * n);
    for row in rows {
        flat.extend(row);
    }
    Ok(MetricSpace::from_flat(graph.vertices().to_vec(), flat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::verify_metric;
    use crate::rational::int;
    use proptest::prelude::*;

    fn floyd_warshall(n: usize, edges: &[(usize, usize, Rational)]) -> Vec<Vec<Option<Rational>>> {
        let mut d = vec![vec![None; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = Some(int(0));
        }
        for (u, v, w) in edges {
            d[*u][*v] = Some(w.clone());
            d[*v][*u] = Some(w.clone());
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if let (Some(a), Some(b)) = (&d[i][k], &d[k][j]) {
                        let c = a + b;
                        if d[i][j].as_ref().is_none_or(|cur| c < *cur) {
                            d[i][j] = Some(c);
                        }
                    }
                }
            }
        }
        d
    }

    #[test]
    fn single_edge_and_square() {
        let g = WeightedGraph::from_edges(2, [(0, 1, int(1))]).unwrap();
        let m = apsp(&g).unwrap();
        assert_eq!(m.d(0, 1), &int(1));
        let c4 =
            WeightedGraph::from_edges(4, [(0, 1, int(1)), (1, 2, int(1)), (2, 3, int(1)), (3, 0, int(1))]).unwrap();
        let m = apsp(&c4).unwrap();
        assert_eq!(m.d(0, 2), &int(2));
        assert_eq!(m.d(1, 3), &int(2));
    }

    #[test]
    fn disconnected_names_a_pair() {
        let g = WeightedGraph::from_edges(3, [(0, 1, int(1))]).unwrap();
        assert_eq!(
            apsp(&g).unwrap_err(),
            MetricError::Disconnected {
                u: "0".into(),
                v: "2".into()
            }
        );
    }

    fn random_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize, Rational)>)> {
        (2usize..=50).prop_flat_map(|n| {
            let tree = proptest::collection::vec((any::<prop::sample::Index>(), 1i64..8, 1i64..5), n - 1);
            let extra = proptest::collection::vec((0..n, 0..n, 1i64..8, 1i64..5), 0..2 * n);
            (Just(n), tree, extra).prop_map(|(n, tree, extra)| {
                let mut edges = Vec::new();
                let mut seen = std::collections::HashSet::new();
                for (k, (parent, p, q)) in tree.into_iter().enumerate() {
                    let v = k + 1;
                    let u = parent.index(v);
                    seen.insert((u, v));
                    edges.push((u, v, crate::rational::frac(p, q)));
                }
                for (a, b, p, q) in extra {
                    let (u, v) = (a.min(b), a.max(b));
                    if u != v && seen.insert((u, v)) {
                        edges.push((u, v, crate::rational::frac(p, q)));
                    }
                }
                (n, edges)
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn agrees_with_floyd_warshall((n, edges) in random_graph()) {
            let g = WeightedGraph::from_edges(n, edges.clone()).unwrap();
            let m = apsp(&g).unwrap();
            let fw = floyd_warshall(n, &edges);
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(Some(m.d(i, j).clone()), fw[i][j].clone());
                }
            }
            prop_assert!(verify_metric(&m).is_valid());
        }
    }
}
