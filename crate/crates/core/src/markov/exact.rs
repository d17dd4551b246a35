use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use super::walks::MAX_ANALYTIC_TREE_M;
use super::{max_scale, ConvexityEstimate, MarkovChain, MarkovError, Method, MetricMap};
use crate::metric::Metric;
use crate::rational::{self, Rational};

/// Cap on `Σ |support|²` over the distributions the exact DP pairs up.
pub const MAX_DP_PAIRS: u64 = 20_000_000;

/// Exact value of both sides of the convexity inequality for an integer
/// exponent `p ≥ 1`.
///
/// Splits at `s = max(t − 2^k, 0)`; after a split the two copies are
/// independent draws from `P^{t−s}(u, ·)`, so each term is
/// `Σ_u π_s(u) Σ_{a,b} P^r(u,a) P^r(u,b) d(f(a), f(b))^p`.
pub fn exact_convexity(
    chain: &MarkovChain,
    map: &MetricMap,
    space: &(dyn Metric + Sync),
    p: u32,
) -> Result<ConvexityEstimate, MarkovError> {
    if p == 0 {
        return Err(MarkovError::Invalid("exponent p must be at least 1".into()));
    }
    map.check(chain, space)?;
    let horizon = chain.horizon();
    let dp = |a: usize, b: usize| -> Rational {
        let (x, y) = (map.images[a], map.images[b]);
        if x == y {
            Rational::zero()
        } else {
            rational::pow(&space.dist(x, y), p)
        }
    };

    // π_s for s = 0..T-1.
    let mut pi = vec![vec![(chain.start(), rational::int(1))]];
    for _ in 1..horizon {
        let next = chain.push(pi.last().expect("nonempty"));
        pi.push(next);
    }

    let mut rhs = Rational::zero();
    for mu in &pi {
        for (u, w) in mu {
            for (j, pr) in chain.row(*u) {
                let d = dp(*u, *j);
                if !d.is_zero() {
                    rhs += w * pr * d;
                }
            }
        }
    }

    // Weight of each (s, r) in the double sum.
    let mut coef: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for k in 0..=max_scale(horizon) {
        let w = rational::inv_pow(2, k * p);
        for t in 1..=horizon {
            let s = t.saturating_sub(1usize << k.min(63));
            *coef.entry((s, t - s)).or_insert_with(Rational::zero) += &w;
        }
    }
    let mut wanted: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &(s, r) in coef.keys() {
        for (u, _) in &pi[s] {
            wanted.entry(*u).or_default().insert(r);
        }
    }

    let mut jobs: Vec<(usize, usize, Vec<(usize, Rational)>)> = Vec::new();
    let mut work: u64 = 0;
    for (&u, rs) in &wanted {
        let rmax = *rs.iter().next_back().expect("nonempty");
        let mut mu = vec![(u, rational::int(1))];
        for r in 1..=rmax {
            mu = chain.push(&mu);
            if rs.contains(&r) {
                work += (mu.len() as u64).pow(2);
                if work > MAX_DP_PAIRS {
                    return Err(MarkovError::Cap {
                        what: "pairs in the exact dynamic program",
                        cap: MAX_DP_PAIRS,
                        hint: "",
                    });
                }
                jobs.push((u, r, mu.clone()));
            }
        }
    }
    let values: Vec<Rational> = jobs
        .par_iter()
        .map(|(_, _, mu)| {
            let mut acc = Rational::zero();
            for (i, (a, wa)) in mu.iter().enumerate() {
                for (b, wb) in &mu[i + 1..] {
                    let d = dp(*a, *b);
                    if !d.is_zero() {
                        acc += wa * wb * d;
                    }
                }
            }
            acc * rational::int(2)
        })
        .collect();
    let q: BTreeMap<(usize, usize), Rational> = jobs.iter().zip(values).map(|((u, r, _), v)| ((*u, *r), v)).collect();

    let mut lhs = Rational::zero();
    for ((s, r), c) in &coef {
        let mut h = Rational::zero();
        for (u, w) in &pi[*s] {
            h += w * &q[&(*u, *r)];
        }
        lhs += c * h;
    }
    Ok(ConvexityEstimate::exact(p, horizon, lhs, rhs, Method::ExactDp))
}

/// Exact functional of the downward walk on `T_{2^m}` without building the
/// tree.
///
/// Two walks that split at a vertex and take `r` further steps first
/// disagree at step `j` with probability `2^{-j}` and then end `2(r−j+1)`
/// apart, so the term for `r` steps is
/// `2^{-r} Σ_{i=1..r} 2^{i−1} (2i)^p`. Every step has length 1, so the
/// right-hand side is `2^m`.
pub fn tree_walk_convexity(m: u32, p: u32) -> Result<ConvexityEstimate, MarkovError> {
    if p == 0 {
        return Err(MarkovError::Invalid("exponent p must be at least 1".into()));
    }
    if m > MAX_ANALYTIC_TREE_M {
        return Err(MarkovError::Cap {
            what: "tree walk exponent m",
            cap: MAX_ANALYTIC_TREE_M as u64,
            hint: "",
        });
    }
    let horizon = 1usize << m;
    let mut g = vec![Rational::zero()];
    let mut acc = BigInt::zero();
    for r in 1..=horizon {
        acc += (BigInt::from(1) << (r - 1)) * num_traits::pow(BigInt::from(2 * r), p as usize);
        g.push(Rational::new(acc.clone(), BigInt::from(1) << r));
    }
    let mut lhs = Rational::zero();
    for k in 0..=m {
        let mut inner = Rational::zero();
        for t in 1..=horizon {
            inner += &g[t.min(1 << k)];
        }
        lhs += inner * rational::inv_pow(2, k * p);
    }
    let rhs = rational::int(horizon as i64);
    Ok(ConvexityEstimate::exact(p, horizon, lhs, rhs, Method::AnalyticTree))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::TreeMetric;
    use crate::markov::downward_tree_walk;
    use crate::metric::MetricSpace;
    use crate::rational::{frac, int};
    use num_traits::Signed;
    use proptest::prelude::*;

    /// Enumerates every trajectory of the walk and every independent
    /// continuation after each split; exponential, for tiny chains only.
    fn enumerate_lhs(chain: &MarkovChain, map: &MetricMap, space: &dyn Metric, p: u32) -> (Rational, Rational) {
        fn paths(chain: &MarkovChain, from: usize, steps: usize) -> Vec<(Vec<usize>, Rational)> {
            let mut out = vec![(vec![from], rational::int(1))];
            for _ in 0..steps {
                let mut next = Vec::new();
                for (path, w) in &out {
                    for (j, pr) in chain.row(*path.last().unwrap()) {
                        let mut q = path.clone();
                        q.push(*j);
                        next.push((q, w * pr));
                    }
                }
                out = next;
            }
            out
        }
        let t_max = chain.horizon();
        let d = |a: usize, b: usize| rational::pow(&space.dist(map.images[a], map.images[b]), p);
        let mut lhs = Rational::zero();
        let mut rhs = Rational::zero();
        for (path, w) in paths(chain, chain.start(), t_max) {
            for t in 1..=t_max {
                rhs += &w * d(path[t - 1], path[t]);
                for k in 0..=max_scale(t_max) {
                    let s = t.saturating_sub(1 << k);
                    for (tail, w2) in paths(chain, path[s], t - s) {
                        lhs += &w * &w2 * d(path[t], *tail.last().unwrap()) * rational::inv_pow(2, k * p);
                    }
                }
            }
        }
        (lhs, rhs)
    }

    #[test]
    fn smallest_tree_walk_matches_enumeration() {
        let (chain, map, tree) = downward_tree_walk(1).unwrap();
        let (lhs, rhs) = enumerate_lhs(&chain, &map, &tree, 2);
        assert_eq!(lhs, frac(27, 4));
        assert_eq!(rhs, int(2));
        let e = exact_convexity(&chain, &map, &tree, 2).unwrap();
        assert_eq!(e.lhs_exact, Some(frac(27, 4)));
        assert_eq!(e.rhs_exact, Some(int(2)));
        let a = tree_walk_convexity(1, 2).unwrap();
        assert_eq!(a.lhs_exact, e.lhs_exact);
    }

    #[test]
    fn analytic_mode_equals_explicit_mode() {
        for m in 1..=3 {
            let (chain, map, tree) = downward_tree_walk(m).unwrap();
            for p in [1, 2, 3, 4] {
                let e = exact_convexity(&chain, &map, &tree, p).unwrap();
                let a = tree_walk_convexity(m, p).unwrap();
                assert_eq!(e.lhs_exact, a.lhs_exact, "m={m} p={p}");
                assert_eq!(e.rhs_exact, a.rhs_exact, "m={m} p={p}");
            }
        }
        let (chain, map, tree) = downward_tree_walk(2).unwrap();
        let (lhs, _) = enumerate_lhs(&chain, &map, &tree, 2);
        assert_eq!(Some(lhs), tree_walk_convexity(2, 2).unwrap().lhs_exact);
    }

    #[test]
    fn explicit_tree_of_depth_sixteen_hits_the_pair_cap() {
        let (chain, map, tree) = downward_tree_walk(4).unwrap();
        assert!(matches!(
            exact_convexity(&chain, &map, &tree, 2),
            Err(MarkovError::Cap { .. })
        ));
    }

    #[test]
    fn lower_bound_on_trees() {
        for m in 1..=6 {
            for p in [2u32, 4] {
                let e = tree_walk_convexity(m, p).unwrap();
                let floor = rational::int(1i64 << (p - 2)) * rational::int(m as i64) * rational::int(1i64 << m);
                assert!(e.lhs_exact.clone().unwrap() >= floor, "m={m} p={p}");
                assert_eq!(e.rhs_exact, Some(rational::int(1i64 << m)));
                let bound = 2f64.powf(1.0 - 2.0 / p as f64) * (m as f64).powf(1.0 / p as f64);
                assert!(e.pi_lower.unwrap() >= bound - 1e-12);
            }
        }
    }

    #[test]
    fn constant_and_frozen_chains_vanish() {
        let (chain, _, tree) = downward_tree_walk(2).unwrap();
        let e = exact_convexity(&chain, &MetricMap::constant(chain.len(), 3), &tree, 2).unwrap();
        assert_eq!(e.lhs_exact, Some(int(0)));
        assert_eq!(e.rhs_exact, Some(int(0)));
        assert_eq!(e.pi_lower, None);
        let still = MarkovChain::new(vec![vec![(0, int(1))], vec![(1, int(1))]], 0, 4).unwrap();
        let e = exact_convexity(&still, &MetricMap::identity(2), &TreeMetric::new(1), 2).unwrap();
        assert_eq!((e.lhs, e.rhs), (0.0, 0.0));
    }

    #[test]
    fn missing_image_is_rejected() {
        let (chain, _, tree) = downward_tree_walk(1).unwrap();
        let short = MetricMap::new(vec![0, 1]);
        assert!(matches!(
            exact_convexity(&chain, &short, &tree, 2),
            Err(MarkovError::MissingImage { state: 2 })
        ));
        let outside = MetricMap::new(vec![0, 1, 99, 0, 0, 0, 0]);
        assert!(matches!(
            exact_convexity(&chain, &outside, &tree, 2),
            Err(MarkovError::MissingImage { state: 2 })
        ));
    }

    #[test]
    fn lazy_monotone_walk_on_a_line_stays_bounded() {
        // Moves one step right with probability 1/2, otherwise stays.
        let mut seen = Vec::new();
        for h in [2usize, 4, 8, 16, 32] {
            let rows = (0..=h)
                .map(|i| {
                    if i == h {
                        vec![(i, int(1))]
                    } else {
                        vec![(i, frac(1, 2)), (i + 1, frac(1, 2))]
                    }
                })
                .collect();
            let chain = MarkovChain::new(rows, 0, h).unwrap();
            let line = MetricSpace::from_fn((0..=h).map(crate::metric::PointId::new).collect(), |i, j| {
                int((i as i64 - j as i64).abs())
            })
            .unwrap();
            let e = exact_convexity(&chain, &MetricMap::identity(h + 1), &line, 2).unwrap();
            seen.push(e.pi_lower.unwrap());
        }
        assert!(seen.iter().all(|&v| v < 1.6), "{seen:?}");
    }

    fn line_space(xs: &[i64]) -> MetricSpace {
        MetricSpace::from_fn((0..xs.len()).map(crate::metric::PointId::new).collect(), |i, j| {
            int((xs[i] - xs[j]).abs())
        })
        .unwrap()
    }

    fn random_chain() -> impl Strategy<Value = (MarkovChain, Vec<i64>)> {
        (2usize..5).prop_flat_map(|n| {
            (
                prop::collection::vec(prop::collection::vec(0u32..4, n), n),
                prop::collection::vec(-5i64..6, n),
                1usize..5,
            )
                .prop_map(move |(weights, xs, horizon)| {
                    let rows = weights
                        .iter()
                        .enumerate()
                        .map(|(i, w)| {
                            let mut w = w.clone();
                            if w.iter().all(|&x| x == 0) {
                                w[i] = 1;
                            }
                            let total: u32 = w.iter().sum();
                            w.iter()
                                .enumerate()
                                .filter(|(_, &x)| x > 0)
                                .map(|(j, &x)| (j, frac(x as i64, total as i64)))
                                .collect()
                        })
                        .collect();
                    (MarkovChain::new(rows, 0, horizon).unwrap(), xs)
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn rescaling_multiplies_both_sides((chain, xs) in random_chain(), num in 1i64..7, den in 1i64..7, p in 1u32..4) {
            let space = line_space(&xs);
            let lambda = frac(num, den);
            let map = MetricMap::identity(chain.len());
            let a = exact_convexity(&chain, &map, &space, p).unwrap();
            let b = exact_convexity(&chain, &map, &space.scaled(&lambda), p).unwrap();
            let f = rational::pow(&lambda, p);
            prop_assert_eq!(b.lhs_exact.clone().unwrap(), a.lhs_exact.clone().unwrap() * &f);
            prop_assert_eq!(b.rhs_exact.clone().unwrap(), a.rhs_exact.clone().unwrap() * &f);
            if let (Some(x), Some(y)) = (a.lhs_exact, a.rhs_exact) {
                if y.is_positive() {
                    let ratio = x / y;
                    let scaled = b.lhs_exact.unwrap() / b.rhs_exact.unwrap();
                    prop_assert_eq!(ratio, scaled);
                }
            }
        }

        #[test]
        fn dp_matches_enumeration((chain, xs) in random_chain(), p in 1u32..3) {
            prop_assume!(chain.horizon() <= 3);
            let space = line_space(&xs);
            let map = MetricMap::identity(chain.len());
            let e = exact_convexity(&chain, &map, &space, p).unwrap();
            let (lhs, rhs) = enumerate_lhs(&chain, &map, &space, p);
            prop_assert_eq!(e.lhs_exact.unwrap(), lhs);
            prop_assert_eq!(e.rhs_exact.unwrap(), rhs);
        }
    }
}
