use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use super::{GeodesicFamily, RnpError};
use crate::embeddings::{distortion, Embedding, NormedTarget, SparseVec};
use crate::generators::{Family, RecursiveGraph};
use crate::metric::shortest_from;
use crate::rational::{self, Rational};

/// A step function on `(0, 1]`: `values[i]` on `(breaks[i], breaks[i+1]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant {
    pub breaks: Vec<Rational>,
    pub values: Vec<SparseVec<Rational>>,
}

impl PiecewiseConstant {
    /// Difference quotients of `points` (vector images) at parameters
    /// `params`.
    pub fn from_points(params: &[Rational], points: &[SparseVec<Rational>]) -> Self {
        let values = params
            .windows(2)
            .zip(points.windows(2))
            .map(|(t, p)| p[1].sub(&p[0]).scale(&(Rational::one() / (&t[1] - &t[0]))))
            .collect();
        PiecewiseConstant {
            breaks: params.to_vec(),
            values,
        }
    }

    fn is_well_formed(&self) -> bool {
        self.breaks.len() == self.values.len() + 1
            && self.breaks.first().is_some_and(Zero::is_zero)
            && self.breaks.last().is_some_and(One::is_one)
            && self.breaks.windows(2).all(|w| w[0] < w[1])
    }

    /// Index of the piece containing `(a, b]`, for `a < b` inside one piece.
    fn piece_of(&self, a: &Rational) -> usize {
        match self.breaks.binary_search(a) {
            Ok(k) => k,
            Err(k) => k - 1,
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "breaks": self.breaks.iter().map(rational::format).collect::<Vec<_>>(),
            "values": self.values.iter().map(|v| {
                v.entries().iter().map(|(i, x)| json!([i, rational::format(x)])).collect::<Vec<_>>()
            }).collect::<Vec<_>>(),
        })
    }
}

/// A finite sequence of step functions with values in a normed space.
#[derive(Debug, Clone)]
pub struct Martingale {
    pub steps: Vec<PiecewiseConstant>,
    pub target: NormedTarget,
    /// Claimed lower bounds `‖M_k − M_{k−1}‖_{L¹} ≥ b`.
    pub difference_bounds: Vec<(usize, Rational)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MartingaleReport {
    pub malformed: Vec<usize>,
    pub refinement_failures: Vec<usize>,
    /// `(k, piece)` where the average of `M_k` over a piece of `M_{k−1}`
    /// differs from `M_{k−1}`.
    pub conditional_expectation_failures: Vec<(usize, usize)>,
    /// `(k, piece)` with `‖M_k‖ > 1`.
    pub bound_failures: Vec<(usize, usize)>,
    #[serde(with = "rational::serde_vec_str")]
    pub differences: Vec<Rational>,
    pub difference_bound_failures: Vec<usize>,
}

impl MartingaleReport {
    pub fn is_valid(&self) -> bool {
        self.malformed.is_empty()
            && self.refinement_failures.is_empty()
            && self.conditional_expectation_failures.is_empty()
            && self.bound_failures.is_empty()
            && self.difference_bound_failures.is_empty()
    }
}

/// `∫₀¹ ‖f − g‖ dt` for two step functions.
pub fn l1_distance(f: &PiecewiseConstant, g: &PiecewiseConstant, target: &NormedTarget) -> Result<Rational, RnpError> {
    let mut cuts: Vec<Rational> = f.breaks.iter().chain(&g.breaks).cloned().collect();
    cuts.sort();
    cuts.dedup();
    let mut total = rational::int(0);
    for w in cuts.windows(2) {
        let diff = f.values[f.piece_of(&w[0])].sub(&g.values[g.piece_of(&w[0])]);
        total += (&w[1] - &w[0]) * target.norm(&diff)?;
    }
    Ok(total)
}

/// Exact check of the martingale identities.
pub fn martingale_check(m: &Martingale) -> Result<MartingaleReport, RnpError> {
    let one = rational::int(1);
    let mut report = MartingaleReport {
        malformed: Vec::new(),
        refinement_failures: Vec::new(),
        conditional_expectation_failures: Vec::new(),
        bound_failures: Vec::new(),
        differences: Vec::new(),
        difference_bound_failures: Vec::new(),
    };
    for (k, s) in m.steps.iter().enumerate() {
        if !s.is_well_formed() {
            report.malformed.push(k);
        }
    }
    if !report.malformed.is_empty() {
        return Ok(report);
    }
    for (k, s) in m.steps.iter().enumerate() {
        for (i, v) in s.values.iter().enumerate() {
            if m.target.norm(v)? > one {
                report.bound_failures.push((k, i));
            }
        }
        if k == 0 {
            continue;
        }
        let prev = &m.steps[k - 1];
        if !prev.breaks.iter().all(|b| s.breaks.binary_search(b).is_ok()) {
            report.refinement_failures.push(k);
            continue;
        }
        for (i, w) in prev.breaks.windows(2).enumerate() {
            let lo = s.breaks.binary_search(&w[0]).expect("refines");
            let hi = s.breaks.binary_search(&w[1]).expect("refines");
            let mut integral = SparseVec::new();
            for j in lo..hi {
                integral = integral.add(&s.values[j].scale(&(&s.breaks[j + 1] - &s.breaks[j])));
            }
            if integral.scale(&(Rational::one() / (&w[1] - &w[0]))) != prev.values[i] {
                report.conditional_expectation_failures.push((k, i));
            }
        }
        report.differences.push(l1_distance(s, prev, &m.target)?);
    }
    if report.refinement_failures.is_empty() {
        for (k, b) in &m.difference_bounds {
            match report.differences.get(k.wrapping_sub(1)) {
                Some(d) if d >= b => {}
                _ => report.difference_bound_failures.push(*k),
            }
        }
    }
    Ok(report)
}

/// The ℓ₁ embedding of a weighted diamond: the distance from the source
/// plus, for every cell, a signed tent over the branch containing the
/// point.
pub fn diamond_tent_embedding(d: &RecursiveGraph) -> Result<Embedding<Rational>, RnpError> {
    if d.family != Family::Diamond {
        return Err(RnpError::Invalid("tent embedding needs a diamond graph".into()));
    }
    let h: Vec<Rational> = shortest_from(&d.graph, d.source)
        .into_iter()
        .map(|x| x.expect("diamonds are connected"))
        .collect();
    let mut vectors = Vec::with_capacity(d.graph.len());
    for x in 0..d.graph.len() {
        let mut pairs = vec![(0, h[x].clone())];
        for (c, side) in d.ancestry(x) {
            let cell = &d.cells[c];
            let up = &h[x] - &h[cell.u];
            let down = &h[cell.v] - &h[x];
            let tent = if up < down { up } else { down };
            pairs.push((c + 1, if side == 0 { tent } else { -tent }));
        }
        vectors.push(SparseVec::from_pairs(pairs));
    }
    Ok(Embedding::new(vectors, NormedTarget::l1(d.cells.len() + 1))?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuadrupleCheck {
    pub step: usize,
    /// `w_{i-1}, z, z̃, w_i` and the chosen point.
    pub points: [usize; 4],
    pub chosen: usize,
    #[serde(with = "rational::serde_str")]
    pub lhs: Rational,
    #[serde(with = "rational::serde_str")]
    pub rhs: Rational,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntervalCheck {
    pub step: usize,
    #[serde(with = "rational::serde_str")]
    pub lhs: Rational,
    #[serde(with = "rational::serde_str")]
    pub rhs: Rational,
    pub holds: bool,
}

/// The martingale built from an embedding of a thick family, with every
/// intermediate estimate.
#[derive(Debug, Clone)]
pub struct MartingaleRun {
    pub martingale: Martingale,
    /// `1 / distortion` of the embedding, after scaling it to be 1-Lipschitz.
    pub ell: Rational,
    pub lip: Rational,
    pub colip: Rational,
    /// Member index carrying `V(k)` at each step.
    pub geodesics: Vec<usize>,
    /// Vertices of `V(k)` at each step.
    pub vertex_sequences: Vec<Vec<usize>>,
    /// Largest number of interior control points passed to the oracle.
    pub max_controls: usize,
    /// Total oracle deviation at each double step.
    pub deviations: Vec<Rational>,
    pub quadruple_checks: Vec<QuadrupleCheck>,
    pub interval_checks: Vec<IntervalCheck>,
}

impl MartingaleRun {
    pub fn to_json(&self) -> Value {
        json!({
            "ell": rational::format(&self.ell),
            "lip": rational::format(&self.lip),
            "colip": rational::format(&self.colip),
            "geodesics": self.geodesics,
            "vertex_sequences": self.vertex_sequences,
            "max_controls": self.max_controls,
            "deviations": self.deviations.iter().map(rational::format).collect::<Vec<_>>(),
            "difference_bounds": self.martingale.difference_bounds.iter()
                .map(|(k, b)| json!([k, rational::format(b)])).collect::<Vec<_>>(),
            "quadruple_checks": self.quadruple_checks,
            "interval_checks": self.interval_checks,
            "steps": self.martingale.steps.iter().map(PiecewiseConstant::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Runs `double_steps` rounds of the thick-family construction: each round
/// asks the oracle for a deviating geodesic (odd step) and then inserts at
/// every deviation parameter whichever of `z`, `z̃` bends the image more
/// (even step). The family must have `d(u, v) = 1`.
pub fn martingale_from_embedding(
    family: &GeodesicFamily,
    emb: &Embedding<Rational>,
    double_steps: usize,
) -> Result<MartingaleRun, RnpError> {
    if !family.metric.d(family.u, family.v).is_one() {
        return Err(RnpError::Invalid("family must satisfy d(u, v) = 1".into()));
    }
    let report = distortion(&family.metric, emb)?;
    let emb = emb.scaled(&(Rational::one() / &report.lip));
    let ell = Rational::one() / &report.distortion;
    let target = emb.target.clone();
    let d = |a: usize, b: usize| family.metric.d(a, b).clone();
    let f = |x: usize| &emb.vectors[x];
    let norm = |v: &SparseVec<Rational>| target.norm(v);
    let half = rational::frac(1, 2);

    let mut g = 0usize;
    let mut params = vec![rational::int(0), rational::int(1)];
    let path_points = |g: usize, ps: &[Rational]| -> Vec<usize> {
        ps.iter()
            .map(|t| family.members[g].vertex_at(t).expect("breakpoint"))
            .collect()
    };
    let pc = |g: usize, ps: &[Rational]| {
        let pts: Vec<SparseVec<Rational>> = path_points(g, ps).iter().map(|&x| f(x).clone()).collect();
        PiecewiseConstant::from_points(ps, &pts)
    };
    let mut steps = vec![pc(g, &params)];
    let mut geodesics = vec![g];
    let mut vertex_sequences = vec![path_points(g, &params)];
    let mut max_controls = 0;
    let mut deviations = Vec::new();
    let mut difference_bounds = Vec::new();
    let mut quadruple_checks = Vec::new();
    let mut interval_checks = Vec::new();

    for k in 1..=double_steps {
        let odd = 2 * k - 1;
        let controls = &params[1..params.len() - 1];
        max_controls = max_controls.max(controls.len());
        let resp = family
            .respond(g, controls)?
            .ok_or(RnpError::OracleFailure { step: odd })?;
        steps.push(pc(g, &resp.common));
        geodesics.push(g);
        vertex_sequences.push(path_points(g, &resp.common));

        let base = &family.members[g];
        let other = &family.members[resp.other];
        let mut next = Vec::new();
        let mut choices = Vec::new();
        let mut splits = Vec::new();
        for iv in &resp.intervals {
            next.push(iv.q_lo.clone());
            let Some(s) = &iv.s else { continue };
            let w0 = base.vertex_at(&iv.q_lo).expect("breakpoint");
            let w1 = base.vertex_at(&iv.q_hi).expect("breakpoint");
            let z = base.vertex_at(s).expect("breakpoint");
            let zt = other.vertex_at(s).expect("breakpoint");
            let bend = |p: usize| -> Result<Rational, RnpError> {
                let right = f(w1).sub(f(p)).scale(&(Rational::one() / d(w1, p)));
                let left = f(p).sub(f(w0)).scale(&(Rational::one() / d(p, w0)));
                Ok(norm(&right.sub(&left))?)
            };
            let (lz, lzt) = (bend(z)?, bend(zt)?);
            let take_other = lzt >= lz;
            let (chosen, lhs) = if take_other { (zt, lzt) } else { (z, lz) };
            let rhs = &ell * &half * d(z, zt) * (Rational::one() / d(w1, chosen) + Rational::one() / d(chosen, w0));
            quadruple_checks.push(QuadrupleCheck {
                step: 2 * k,
                points: [w0, z, zt, w1],
                chosen,
                holds: lhs >= rhs,
                lhs,
                rhs,
            });
            choices.push(take_other);
            splits.push((iv.q_lo.clone(), s.clone(), iv.q_hi.clone()));
            next.push(s.clone());
        }
        next.push(rational::int(1));
        let path = family.recombine(&resp, &choices);
        g = family
            .position(&path)
            .ok_or_else(|| RnpError::Invalid(format!("recombination at step {} left the family", 2 * k)))?;
        let even = pc(g, &next);
        let odd_pc = steps.last().expect("odd step");
        for (lo, s, hi) in &splits {
            let a = s - lo;
            let b = hi - s;
            let z = &odd_pc.values[odd_pc.piece_of(lo)];
            let x = &even.values[even.piece_of(lo)];
            let y = &even.values[even.piece_of(s)];
            let lhs = &a * norm(&x.sub(z))? + &b * norm(&y.sub(z))?;
            let rhs = &half * norm(&x.sub(y))? * if a < b { a.clone() } else { b.clone() };
            interval_checks.push(IntervalCheck {
                step: 2 * k,
                holds: lhs >= rhs,
                lhs,
                rhs,
            });
        }
        difference_bounds.push((2 * k, rational::frac(1, 4) * &ell * &resp.deviation));
        deviations.push(resp.deviation);
        steps.push(even);
        geodesics.push(g);
        vertex_sequences.push(path_points(g, &next));
        params = next;
    }
    Ok(MartingaleRun {
        martingale: Martingale {
            steps,
            target,
            difference_bounds,
        },
        ell,
        lip: report.lip,
        colip: report.colip,
        geodesics,
        vertex_sequences,
        max_controls,
        deviations,
        quadruple_checks,
        interval_checks,
    })
}
