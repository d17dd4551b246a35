use serde::Serialize;

use super::L2Error;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KloecknerBound {
    pub n: u64,
    /// `⌊log₂ n⌋` selection rounds.
    pub rounds: u32,
    pub k: f64,
    pub q: f64,
    /// Least `D ≥ 1` with `D − rounds·K/D^{q−1} ≥ 1`.
    pub bound: f64,
    /// `c₁ = (K/2)^{1/q}`.
    pub c1: f64,
    /// `c₁ (log₂ n)^{1/q}`.
    pub asymptotic: f64,
    pub asymptotic_holds: bool,
}

/// Lower bound on the distortion of `T_n` in a space whose forks improve
/// by `K/D^{q−1}` per selection round.
pub fn kloeckner_bound(n: u64, k: f64, q: f64) -> Result<KloecknerBound, L2Error> {
    if n < 1 {
        return Err(L2Error::Invalid("tree depth must be >= 1".into()));
    }
    if !(k > 0.0) || !(q >= 2.0) {
        return Err(L2Error::Invalid(format!("need K > 0 and q >= 2, got ({k}, {q})")));
    }
    let rounds = n.ilog2();
    let budget = rounds as f64 * k;
    let h = |d: f64| d - budget / d.powf(q - 1.0) - 1.0;
    let (mut lo, mut hi) = (1.0, 1.0 + budget);
    if budget > 0.0 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if h(mid) >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    let bound = hi;
    let c1 = (k / 2.0).powf(1.0 / q);
    let asymptotic = c1 * (n as f64).log2().powf(1.0 / q);
    Ok(KloecknerBound {
        n,
        rounds,
        k,
        q,
        bound,
        c1,
        asymptotic,
        asymptotic_holds: bound >= asymptotic * (1.0 - 1e-12),
    })
}
