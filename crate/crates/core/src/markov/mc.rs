use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{max_scale, pi_lower, ConvexityEstimate, MarkovChain, MarkovError, Method, MetricMap};
use crate::metric::Metric;
use crate::rational;

struct Sampler {
    rows: Vec<Vec<(usize, f64)>>,
}

impl Sampler {
    fn new(chain: &MarkovChain) -> Self {
        let rows = (0..chain.len())
            .map(|i| {
                let mut acc = 0.0;
                chain
                    .row(i)
                    .iter()
                    .map(|(j, pr)| {
                        acc += rational::to_f64(pr);
                        (*j, acc)
                    })
                    .collect()
            })
            .collect();
        Sampler { rows }
    }

    fn walk(&self, mut x: usize, steps: usize, rng: &mut ChaCha8Rng) -> usize {
        for _ in 0..steps {
            let row = &self.rows[x];
            if row.len() == 1 {
                x = row[0].0;
                continue;
            }
            let u: f64 = rng.random::<f64>() * row[row.len() - 1].1;
            x = row.iter().find(|(_, c)| u < *c).unwrap_or(&row[row.len() - 1]).0;
        }
        x
    }
}

/// Mean and variance of the mean.
fn summarize(values: impl Iterator<Item = f64>, n: u64) -> (f64, f64) {
    let (mut mean, mut m2) = (0.0, 0.0);
    for (i, v) in values.enumerate() {
        let d = v - mean;
        mean += d / (i + 1) as f64;
        m2 += d * (v - mean);
    }
    let var = if n > 1 { m2 / (n - 1) as f64 } else { 0.0 };
    (mean, var / n as f64)
}

/// Sample means of both sides of the convexity inequality.
///
/// Every `(k, t)` term, and every step term of the right-hand side, draws
/// from its own ChaCha stream keyed by `seed`, so results do not depend on
/// scheduling. Standard errors treat the terms as independent.
pub fn mc_convexity(
    chain: &MarkovChain,
    map: &MetricMap,
    space: &(dyn Metric + Sync),
    p: f64,
    seed: u64,
    samples: u64,
) -> Result<ConvexityEstimate, MarkovError> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(MarkovError::Invalid(format!("exponent p must be positive, got {p}")));
    }
    if samples == 0 {
        return Err(MarkovError::Invalid("need at least one sample".into()));
    }
    map.check(chain, space)?;
    let sampler = Sampler::new(chain);
    let horizon = chain.horizon();
    let dp = |a: usize, b: usize| {
        let (x, y) = (map.images[a], map.images[b]);
        if x == y {
            0.0
        } else {
            space.dist_f64(x, y).powf(p)
        }
    };

    // (stream, split time, steps after split, weight); k = None marks a step term.
    let mut terms: Vec<(u64, usize, usize, Option<u32>)> = Vec::new();
    for t in 1..=horizon {
        terms.push((t as u64, t - 1, 1, None));
    }
    for k in 0..=max_scale(horizon) {
        for t in 1..=horizon {
            let s = t.saturating_sub(1usize << k.min(63));
            terms.push((((k as u64 + 1) << 32) | t as u64, s, t - s, Some(k)));
        }
    }
    let results: Vec<(f64, f64)> = terms
        .par_iter()
        .map(|&(stream, s, r, k)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            let start = chain.start();
            let draws = (0..samples).map(|_| {
                let x = sampler.walk(start, s, &mut rng);
                if k.is_none() {
                    let y = sampler.walk(x, 1, &mut rng);
                    dp(x, y)
                } else {
                    let a = sampler.walk(x, r, &mut rng);
                    let b = sampler.walk(x, r, &mut rng);
                    dp(a, b)
                }
            });
            summarize(draws, samples)
        })
        .collect();
    let (mut lhs, mut lhs_var, mut rhs, mut rhs_var) = (0.0, 0.0, 0.0, 0.0);
    for (&(_, _, _, k), &(mean, var)) in terms.iter().zip(&results) {
        match k {
            None => {
                rhs += mean;
                rhs_var += var;
            }
            Some(k) => {
                let w = 2f64.powf(-(k as f64) * p);
                lhs += w * mean;
                lhs_var += w * w * var;
            }
        }
    }
    Ok(ConvexityEstimate {
        p,
        horizon,
        lhs,
        rhs,
        lhs_exact: None,
        rhs_exact: None,
        pi_lower: pi_lower(lhs, rhs, p),
        method: Method::MonteCarlo {
            seed,
            samples,
            lhs_stderr: lhs_var.sqrt(),
            rhs_stderr: rhs_var.sqrt(),
        },
    })
}
