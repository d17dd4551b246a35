use super::{MarkovChain, MarkovError, MetricMap};
use crate::generators::{tree_children, TreeMetric};
use crate::metric::{shortest_from, WeightedGraph};
use crate::rational::{self, Rational};

/// Largest `m` for which the downward walk on `T_{2^m}` is built explicitly.
pub const MAX_EXPLICIT_TREE_M: u32 = 4;
/// Largest `m` accepted by [`tree_walk_convexity`](super::tree_walk_convexity).
pub const MAX_ANALYTIC_TREE_M: u32 = 10;

/// The downward random walk on `T_{2^m}`: start at the root, move to each
/// child with probability 1/2, leaves absorbing, horizon `2^m`.
pub fn downward_tree_walk(m: u32) -> Result<(MarkovChain, MetricMap, TreeMetric), MarkovError> {
    if m > MAX_EXPLICIT_TREE_M {
        return Err(MarkovError::Cap {
            what: "explicit tree walk exponent m",
            cap: MAX_EXPLICIT_TREE_M as u64,
            hint: "; use the analytic tree mode",
        });
    }
    let depth = 1u32 << m;
    let tree = TreeMetric::new(depth);
    let n = crate::metric::Metric::size(&tree);
    let first_leaf = (1usize << depth) - 1;
    let half = rational::frac(1, 2);
    let rows = (0..n)
        .map(|v| {
            if v >= first_leaf {
                vec![(v, rational::int(1))]
            } else {
                tree_children(v).iter().map(|&c| (c, half.clone())).collect()
            }
        })
        .collect();
    let chain = MarkovChain::new(rows, 0, depth as usize)?;
    Ok((chain, MetricMap::identity(n), tree))
}

/// Walk from `source` that moves uniformly to a neighbour strictly closer
/// to `sink`; the sink is absorbing. States are the graph vertices and the
/// map is the identity into the shortest-path metric.
pub fn downhill_walk(
    graph: &WeightedGraph,
    source: usize,
    sink: usize,
    horizon: usize,
) -> Result<(MarkovChain, MetricMap), MarkovError> {
    let n = graph.len();
    if source >= n || sink >= n {
        return Err(MarkovError::Invalid(format!(
            "source {source} or sink {sink} out of range for {n} vertices"
        )));
    }
    let dist = shortest_from(graph, sink);
    let mut rows = Vec::with_capacity(n);
    for v in 0..n {
        if v == sink {
            rows.push(vec![(v, rational::int(1))]);
            continue;
        }
        let here = dist[v]
            .as_ref()
            .ok_or_else(|| MarkovError::Invalid(format!("vertex {v} cannot reach the sink")))?;
        let down: Vec<usize> = graph
            .neighbors(v)
            .iter()
            .map(|&(w, _)| w)
            .filter(|&w| dist[w].as_ref().is_some_and(|d| d < here))
            .collect();
        if down.is_empty() {
            return Err(MarkovError::Invalid(format!(
                "vertex {v} has no neighbour closer to the sink"
            )));
        }
        let pr = Rational::new(1.into(), (down.len() as i64).into());
        rows.push(down.into_iter().map(|w| (w, pr.clone())).collect());
    }
    let chain = MarkovChain::new(rows, source, horizon)?;
    Ok((chain, MetricMap::identity(n)))
}
