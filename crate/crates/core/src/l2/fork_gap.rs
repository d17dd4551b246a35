use serde::Serialize;

use super::L2Error;

/// `δ_X(ε) ≥ c ε^q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvexityModulus {
    pub c: f64,
    pub q: f64,
}

impl ConvexityModulus {
    pub fn new(c: f64, q: f64) -> Result<Self, L2Error> {
        if !(c > 0.0) || !(q >= 2.0) {
            return Err(L2Error::Invalid(format!(
                "modulus needs c > 0 and q >= 2, got ({c}, {q})"
            )));
        }
        Ok(ConvexityModulus { c, q })
    }

    /// Hilbert space: `1 - √(1 - ε²/4) ≥ ε²/8`.
    pub fn hilbert() -> Self {
        ConvexityModulus { c: 0.125, q: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForkGapParams {
    pub d: f64,
    pub q: f64,
    /// `2D − max min(‖x₀−x₂‖, ‖x₀−x₂′‖)` over admissible forks.
    pub gap: f64,
    /// `K = gap · D^{q−1} / 2`, so that the fork bound reads
    /// `2(D − K/D^{q−1})`.
    pub k: f64,
    pub modulus: ConvexityModulus,
    /// Best fork found: images of `a₀, a₁, a₂, a₂′`.
    pub witness: [[f64; 3]; 4],
    /// Largest constraint violation of the witness.
    pub violation: f64,
    /// Whether any non-contractive `D`-Lipschitz fork exists in ℓ₂,
    /// i.e. `D ≥ 2/√3`. Below that the fork bound holds for every `K` and
    /// `gap`, `k` are reported as 0.
    pub admissible: bool,
    /// The optimiser could not reach a feasible fork although one exists;
    /// `k` is then 0.
    pub stalled: bool,
}

impl ForkGapParams {
    /// `K / D^{q−1}`, the per-round improvement promised by the fork lemma.
    pub fn improvement(&self) -> f64 {
        self.k / self.d.powf(self.q - 1.0)
    }
}

/// Euclidean distortion of the tripod `K_{1,3}`, the fork's underlying tree.
pub const TRIPOD_L2_DISTORTION: f64 = 1.154_700_538_379_251_5;

/// Tree distances of the fork `a₀ – a₁ – {a₂, a₂′}`.
const FORK_PAIRS: [(usize, usize, f64); 6] = [
    (0, 1, 1.0),
    (1, 2, 1.0),
    (1, 3, 1.0),
    (0, 2, 2.0),
    (0, 3, 2.0),
    (2, 3, 2.0),
];

fn points(x: &[f64]) -> [[f64; 3]; 4] {
    [[0.0, 0.0, 0.0], [x[0], 0.0, 0.0], [x[1], x[2], 0.0], [x[3], x[4], x[5]]]
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn violation(p: &[[f64; 3]; 4], d: f64) -> f64 {
    FORK_PAIRS
        .iter()
        .map(|&(i, j, t)| {
            let e = dist(&p[i], &p[j]);
            (t - e).max(e - d * t).max(0.0)
        })
        .fold(0.0, f64::max)
}

fn reach(p: &[[f64; 3]; 4]) -> f64 {
    dist(&p[0], &p[2]).min(dist(&p[0], &p[3]))
}

/// Minimises `f` from `start` with the Nelder–Mead simplex method.
pub(crate) fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, start: &[f64], step: f64, iters: usize) -> (Vec<f64>, f64) {
    let n = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..n {
        let mut x = start.to_vec();
        x[i] += step;
        let fx = f(&x);
        simplex.push((x, fx));
    }
    let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect() };
    for _ in 0..iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if (simplex[n].1 - simplex[0].1).abs() < 1e-15 {
            break;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / n as f64;
            }
        }
        let worst = simplex[n].0.clone();
        let refl = lerp(&centroid, &worst, -1.0);
        let fr = f(&refl);
        if fr < simplex[0].1 {
            let exp = lerp(&centroid, &worst, -2.0);
            let fe = f(&exp);
            simplex[n] = if fe < fr { (exp, fe) } else { (refl, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (refl, fr);
        } else {
            let con = lerp(&centroid, &worst, 0.5);
            let fc = f(&con);
            if fc < simplex[n].1 {
                simplex[n] = (con, fc);
            } else {
                let best = simplex[0].0.clone();
                for s in simplex.iter_mut().skip(1) {
                    s.0 = lerp(&best, &s.0, 0.5);
                    s.1 = f(&s.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

/// Numerical value of the fork gap at Lipschitz constant `d` for exponent
/// `q`: the largest reach `min(‖x₀−x₂‖, ‖x₀−x₂′‖)` of a non-contractive,
/// `d`-Lipschitz fork in ℝ³, found by a penalised Nelder–Mead search from
/// a fixed set of starts.
pub fn fork_gap_estimate(d: f64, q: f64, modulus: ConvexityModulus) -> Result<ForkGapParams, L2Error> {
    if !(d >= 1.0) || !d.is_finite() {
        return Err(L2Error::Invalid(format!("fork gap needs D >= 1, got {d}")));
    }
    if !(q >= 2.0) {
        return Err(L2Error::Invalid(format!("fork gap needs q >= 2, got {q}")));
    }
    let mut best: Option<(Vec<f64>, f64)> = None;
    for (si, scale) in [1.0, 0.5 * (1.0 + d), d].into_iter().enumerate() {
        for k in 0..8 {
            let t = (0.15 + 0.1 * k as f64) * std::f64::consts::FRAC_PI_2;
            let (c, s) = (scale * t.cos(), scale * t.sin());
            let mut x = vec![scale, scale + c, s, scale + c, -s, 0.05 * si as f64];
            for mu in [1e2, 1e4, 1e6, 1e8, 1e10] {
                let obj = |v: &[f64]| {
                    let p = points(v);
                    let pen: f64 = FORK_PAIRS
                        .iter()
                        .map(|&(i, j, tr)| {
                            let e = dist(&p[i], &p[j]);
                            (tr - e).max(0.0).powi(2) + (e - d * tr).max(0.0).powi(2)
                        })
                        .sum();
                    -reach(&p) + mu * pen
                };
                for _ in 0..3 {
                    x = nelder_mead(&obj, &x, 0.02, 4000).0;
                }
            }
            let p = points(&x);
            let score = if violation(&p, d) < 1e-7 {
                reach(&p)
            } else {
                f64::NEG_INFINITY
            };
            if best.as_ref().is_none_or(|(_, b)| score > *b) {
                best = Some((x, score));
            }
        }
    }
    let (x, score) = best.expect("at least one start");
    let witness = points(&x);
    let viol = violation(&witness, d);
    let found = score.is_finite();
    let admissible = d >= TRIPOD_L2_DISTORTION;
    let gap = if found { (2.0 * d - score).max(0.0) } else { 0.0 };
    Ok(ForkGapParams {
        d,
        q,
        gap,
        k: gap * d.powf(q - 1.0) / 2.0,
        modulus,
        witness,
        violation: viol,
        admissible,
        stalled: admissible && !found,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Planar symmetric fork: `a₁` at the origin, `a₀` at distance `D`,
    /// the grandchildren at distance `D` and angle `asin(1/D)` off the far
    /// axis.
    fn closed_form_gap(d: f64) -> f64 {
        2.0 * d - (2.0 * d * d + 2.0 * d * (d * d - 1.0).sqrt()).sqrt()
    }

    #[test]
    fn nelder_mead_on_a_quadratic() {
        let (x, fx) = nelder_mead(
            &|v: &[f64]| (v[0] - 1.0).powi(2) + 3.0 * (v[1] + 2.0).powi(2),
            &[0.0, 0.0],
            0.5,
            2000,
        );
        assert!((x[0] - 1.0).abs() < 1e-6 && (x[1] + 2.0).abs() < 1e-6 && fx < 1e-10);
    }

    #[test]
    fn tripod_threshold_matches_the_euclidean_solver() {
        assert!((TRIPOD_L2_DISTORTION - 2.0 / 3f64.sqrt()).abs() < 1e-15);
        let tripod = crate::metric::apsp(&crate::generators::fork()).unwrap();
        let r = crate::l2::min_distortion_l2(&tripod, 1e-4).unwrap();
        assert!((r.c_star - TRIPOD_L2_DISTORTION).abs() < 1e-3, "{}", r.c_star);
    }

    #[test]
    fn matches_the_planar_fork() {
        for d in [1.2, 1.5, 2.0, 3.0] {
            let est = fork_gap_estimate(d, 2.0, ConvexityModulus::hilbert()).unwrap();
            assert!(est.admissible && !est.stalled);
            assert!(est.violation < 1e-7);
            assert!(
                (est.gap - closed_form_gap(d)).abs() < 1e-4,
                "D={d}: {} vs {}",
                est.gap,
                closed_form_gap(d)
            );
            assert!((est.improvement() - est.gap / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn no_fork_below_the_tripod_distortion() {
        // An isometric fork would need x₂ = x₂′.
        for d in [1.0, 1.1] {
            let est = fork_gap_estimate(d, 2.0, ConvexityModulus::hilbert()).unwrap();
            assert!(!est.admissible && !est.stalled);
            assert_eq!(est.k, 0.0);
        }
    }

    #[test]
    fn estimate_is_non_increasing_on_the_grid() {
        // Inadmissible D means the bound holds for every K: rank it as +∞.
        let ks: Vec<f64> = [1.1, 1.5, 2.0, 3.0]
            .iter()
            .map(|&d| {
                let e = fork_gap_estimate(d, 2.0, ConvexityModulus::hilbert()).unwrap();
                if e.admissible {
                    e.k
                } else {
                    f64::INFINITY
                }
            })
            .collect();
        assert!(ks.windows(2).all(|w| w[1] <= w[0] + 1e-6), "{ks:?}");
        let expected = [f64::INFINITY, 0.1481, 0.1363, 0.1296];
        for (k, e) in ks.iter().zip(expected) {
            assert!(k == &e || (k - e).abs() < 1e-3, "{k} vs {e}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(fork_gap_estimate(0.5, 2.0, ConvexityModulus::hilbert()).is_err());
        assert!(fork_gap_estimate(2.0, 1.0, ConvexityModulus::hilbert()).is_err());
        assert!(ConvexityModulus::new(0.0, 2.0).is_err());
    }
}
