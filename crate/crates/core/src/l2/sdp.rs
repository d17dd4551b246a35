use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use super::L2Error;
use crate::embeddings::{distortion, frechet_embed, Embedding, NormedTarget};
use crate::metric::{Metric, MetricSpace};
use crate::rational;

pub const MAX_SDP_ITERATIONS: usize = 50_000;
pub const STALL_THRESHOLD: f64 = 1e-9;
pub const MAX_SDP_POINTS: usize = 200;
const ANDERSON_MEMORY: usize = 8;

/// A Gram matrix whose squared distances lie within `[d², c²d²]` up to
/// the recorded residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct GramCertificate {
    pub q: DMatrix<f64>,
    pub c: f64,
    /// `max(0, -λ_min(Q))`.
    pub psd_violation: f64,
    /// Largest violation of a pair constraint, relative to `d²`.
    pub constraint_violation: f64,
    pub iterations: usize,
}

impl GramCertificate {
    /// Points `x_i` with `⟨x_i, x_j⟩ = Q_ij`, one coordinate per positive
    /// eigenvalue.
    pub fn embedding(&self) -> Embedding<f64> {
        let eig = SymmetricEigen::new(self.q.clone());
        let n = self.q.nrows();
        let cols: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k] > 0.0).collect();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                cols.iter()
                    .map(|&k| eig.eigenvectors[(i, k)] * eig.eigenvalues[k].sqrt())
                    .collect()
            })
            .collect();
        let dim = cols.len().max(1);
        let rows = rows
            .into_iter()
            .map(|mut r| {
                r.resize(dim, 0.0);
                r
            })
            .collect();
        Embedding::from_dense(rows, NormedTarget::l2(dim)).expect("gram rows are finite")
    }

    /// The Gram matrix as CSV of shortest round-trip decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.q.nrows() {
            let row: Vec<String> = (0..self.q.ncols()).map(|j| format!("{}", self.q[(i, j)])).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SdpOutcome {
    Feasible(GramCertificate),
    /// The alternating projections stopped making progress with the two
    /// sets still `gap` apart.
    Infeasible {
        c: f64,
        iterations: usize,
        gap: f64,
    },
}

/// Squared distances scaled so that the diameter is 1.
pub(crate) struct Problem {
    n: usize,
    d2: DMatrix<f64>,
    scale2: f64,
}

impl Problem {
    pub(crate) fn new(space: &MetricSpace) -> Result<Self, L2Error> {
        let n = space.len();
        if n < 2 {
            return Err(L2Error::Invalid(format!("need at least 2 points, got {n}")));
        }
        if n > MAX_SDP_POINTS {
            return Err(L2Error::Cap {
                what: "points for the Euclidean solver",
                cap: MAX_SDP_POINTS,
            });
        }
        let diam = rational::to_f64(&space.diameter());
        let mut d2 = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let d = space.dist_f64(i, j) / diam;
                    if !(d > 0.0) {
                        return Err(L2Error::Invalid(format!("points {i} and {j} coincide")));
                    }
                    d2[(i, j)] = d * d;
                }
            }
        }
        Ok(Problem {
            n,
            d2,
            scale2: diam * diam,
        })
    }

    fn start(&self) -> DMatrix<f64> {
        self.d2.clone()
    }

    fn clip(&self, d: &DMatrix<f64>, c2: f64) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| {
            if i == j {
                0.0
            } else {
                let lo = self.d2[(i, j)];
                d[(i, j)].clamp(lo, c2 * lo)
            }
        })
    }

    /// One round of alternating projections from a point `d` of the box.
    fn project(&self, d: &DMatrix<f64>, c2: f64) -> Step {
        let n = self.n;
        // Double centering J D J.
        let row_mean: Vec<f64> = (0..n).map(|i| d.row(i).sum() / n as f64).collect();
        let total = row_mean.iter().sum::<f64>() / n as f64;
        let m = DMatrix::from_fn(n, n, |i, j| d[(i, j)] - row_mean[i] - row_mean[j] + total);
        let eig = SymmetricEigen::new(m);
        let mut pos = DMatrix::zeros(n, n);
        let mut gram = DMatrix::zeros(n, n);
        for k in 0..n {
            let lam = eig.eigenvalues[k];
            let v = eig.eigenvectors.column(k);
            if lam > 0.0 {
                pos += lam * v * v.transpose();
            } else if lam < 0.0 {
                gram += (-0.5 * lam) * v * v.transpose();
            }
        }
        let dk = d - pos;
        let mut viol: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let got = gram[(i, i)] + gram[(j, j)] - 2.0 * gram[(i, j)];
                let lo = self.d2[(i, j)];
                let v = (lo - got).max(got - c2 * lo).max(0.0) / lo;
                viol = viol.max(v);
            }
        }
        let next = self.clip(&dk, c2);
        let gap = (&next - &dk).norm();
        Step { gram, viol, next, gap }
    }

    /// Alternating projections between the box `d² ≤ D ≤ c²d²` (zero
    /// diagonal) and the cone of matrices that are negative semidefinite on
    /// the complement of the constant vector, with Anderson acceleration on
    /// the map `D ↦ box(cone(D))`. `tol` bounds the relative pair violation
    /// of the reconstructed Gram matrix.
    ///
    /// The map has a fixed point whether or not the sets meet; reaching one
    /// (relative step below [`STALL_THRESHOLD`]) without a certificate means
    /// the sets are `gap` apart.
    fn solve(&self, c: f64, tol: f64, start: DMatrix<f64>) -> (Probe, DMatrix<f64>) {
        let c2 = c * c;
        let mut x = self.clip(&start, c2);
        let mut hist: VecDeque<(DMatrix<f64>, DMatrix<f64>)> = VecDeque::new();
        let mut prev_res = f64::INFINITY;
        let mut gap = f64::INFINITY;
        for it in 1..=MAX_SDP_ITERATIONS {
            let s = self.project(&x, c2);
            gap = s.gap;
            if s.viol <= tol {
                let cert = GramCertificate {
                    q: s.gram * self.scale2,
                    c,
                    psd_violation: 0.0,
                    constraint_violation: s.viol,
                    iterations: it,
                };
                return (Probe::Feasible(cert), x);
            }
            let f = &s.next - &x;
            let res = f.norm();
            if res <= STALL_THRESHOLD * x.norm() {
                return (Probe::Infeasible { iterations: it, gap }, s.next);
            }
            if res > prev_res {
                hist.clear();
            }
            prev_res = res;
            hist.push_back((s.next.clone(), f.clone()));
            if hist.len() > ANDERSON_MEMORY + 1 {
                hist.pop_front();
            }
            x = if hist.len() < 2 {
                s.next
            } else {
                let k = hist.len() - 1;
                let len = f.len();
                let df = DMatrix::from_fn(len, k, |r, col| hist[col + 1].1[r] - hist[col].1[r]);
                let rhs = DVector::from_column_slice(f.as_slice());
                match df.svd(true, true).solve(&rhs, 1e-12) {
                    Ok(theta) => {
                        let mut y = s.next.clone();
                        for col in 0..k {
                            y -= theta[col] * (&hist[col + 1].0 - &hist[col].0);
                        }
                        self.clip(&y, c2)
                    }
                    Err(_) => {
                        hist.clear();
                        s.next
                    }
                }
            };
        }
        (Probe::Undecided { gap }, x)
    }
}

struct Step {
    gram: DMatrix<f64>,
    viol: f64,
    next: DMatrix<f64>,
    gap: f64,
}

enum Probe {
    Feasible(GramCertificate),
    Infeasible { iterations: usize, gap: f64 },
    Undecided { gap: f64 },
}

fn check_c(c: f64, tol: f64) -> Result<(), L2Error> {
    if !(c >= 1.0) || !c.is_finite() {
        return Err(L2Error::Invalid(format!("distortion bound must be >= 1, got {c}")));
    }
    if !(tol > 0.0) {
        return Err(L2Error::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

fn finish(mut cert: GramCertificate) -> GramCertificate {
    let eig = SymmetricEigen::new(cert.q.clone());
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    cert.psd_violation = (-min).max(0.0);
    cert
}

/// Is there a Euclidean embedding with distortion at most `c`?
pub fn sdp_feasible(space: &MetricSpace, c: f64, tol: f64) -> Result<SdpOutcome, L2Error> {
    check_c(c, tol)?;
    let p = Problem::new(space)?;
    match p.solve(c, tol, p.start()).0 {
        Probe::Feasible(cert) => Ok(SdpOutcome::Feasible(finish(cert))),
        Probe::Infeasible { iterations, gap } => Ok(SdpOutcome::Infeasible { c, iterations, gap }),
        Probe::Undecided { gap } => Err(L2Error::Undecided {
            c,
            iterations: MAX_SDP_ITERATIONS,
            gap,
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeStatus {
    Feasible,
    Infeasible,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRecord {
    pub c: f64,
    pub status: ProbeStatus,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct L2Result {
    /// Smallest bound certified feasible.
    pub c_star: f64,
    /// Largest bound certified infeasible (1 if none).
    pub lower: f64,
    pub certificate: GramCertificate,
    /// Reconstructed embedding, scaled to be non-contractive.
    pub embedding: Embedding<f64>,
    /// Distortion of `embedding`, measured directly.
    pub measured_distortion: f64,
    pub probes: Vec<ProbeRecord>,
}

/// Bisection over [`sdp_feasible`] from `[1, distortion of the Fréchet
/// rows in ℓ₂]`.
///
/// Each probe accepts relative pair violations up to `tol / (4c)`, so the
/// reconstructed embedding has distortion at most about `c* + tol/4`.
/// Undecided probes steer the search like infeasible ones but never raise
/// the certified lower bound; if they leave the bracket wider than `tol`
/// the call fails with [`L2Error::Undecided`].
pub fn min_distortion_l2(space: &MetricSpace, tol: f64) -> Result<L2Result, L2Error> {
    check_c(1.0, tol)?;
    let p = Problem::new(space)?;
    let rows = frechet_embed(space).to_f64();
    let fallback = Embedding::new(rows.vectors, NormedTarget::l2(space.len()))?;
    let upper = distortion(space, &fallback)?.distortion.max(1.0) * (1.0 + tol);

    let mut probes = Vec::new();
    let mut warm = p.start();
    let mut best: Option<GramCertificate>;
    let run = |c: f64, warm: &mut DMatrix<f64>, probes: &mut Vec<ProbeRecord>| {
        let (probe, last) = p.solve(c, tol / (4.0 * c), warm.clone());
        let (status, iterations) = match &probe {
            Probe::Feasible(cert) => (ProbeStatus::Feasible, cert.iterations),
            Probe::Infeasible { iterations, .. } => (ProbeStatus::Infeasible, *iterations),
            Probe::Undecided { .. } => (ProbeStatus::Undecided, MAX_SDP_ITERATIONS),
        };
        if status == ProbeStatus::Feasible {
            *warm = last;
        }
        probes.push(ProbeRecord { c, status, iterations });
        probe
    };

    let mut lo = 1.0;
    let mut certified_lo = 1.0;
    let mut hi = upper;
    match run(1.0, &mut warm, &mut probes) {
        Probe::Feasible(cert) => {
            best = Some(cert);
            hi = 1.0;
        }
        _ => match run(upper, &mut warm, &mut probes) {
            Probe::Feasible(cert) => best = Some(cert),
            Probe::Infeasible { gap, .. } | Probe::Undecided { gap } => {
                return Err(L2Error::Undecided {
                    c: upper,
                    iterations: MAX_SDP_ITERATIONS,
                    gap,
                })
            }
        },
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        match run(mid, &mut warm, &mut probes) {
            Probe::Feasible(cert) => {
                hi = mid;
                best = Some(cert);
            }
            Probe::Infeasible { .. } => {
                lo = mid;
                certified_lo = mid;
            }
            Probe::Undecided { .. } => lo = mid,
        }
    }
    if hi - certified_lo > tol && hi > 1.0 {
        let gap = 0.0;
        return Err(L2Error::Undecided {
            c: hi,
            iterations: MAX_SDP_ITERATIONS,
            gap,
        });
    }
    let certificate = finish(best.expect("a feasible probe"));
    let raw = certificate.embedding();
    let report = distortion(space, &raw)?;
    let embedding = raw.scaled(&report.colip);
    Ok(L2Result {
        c_star: hi,
        lower: certified_lo,
        certificate,
        embedding,
        measured_distortion: report.distortion,
        probes,
    })
}
