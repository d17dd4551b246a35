use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::RnpError;
use crate::generators::{diamond, Weighting};
use crate::metric::{apsp, enumerate_geodesic_paths, GeodesicPath, MetricSpace, WeightedGraph, DEFAULT_GEODESIC_CAP};
use crate::rational::{self, Rational};

pub const MAX_FAMILY_DIAMOND_LEVEL: u32 = 4;
/// Largest `members² × control sets` product `thickness_alpha` will scan.
pub const MAX_THICKNESS_WORK: u64 = 2_000_000_000;
const MAX_RECOMBINATION_BITS: usize = 20;

/// A set of `u`–`v` geodesics sharing one breakpoint parametrisation.
#[derive(Debug, Clone)]
pub struct GeodesicFamily {
    pub graph: WeightedGraph,
    pub metric: MetricSpace,
    pub u: usize,
    pub v: usize,
    pub members: Vec<GeodesicPath>,
    index: HashMap<Vec<usize>, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeviationInterval {
    #[serde(with = "rational::serde_str")]
    pub q_lo: Rational,
    #[serde(with = "rational::serde_str")]
    pub q_hi: Rational,
    /// Deviation parameter; `None` when both geodesics run along the same
    /// single edge.
    #[serde(with = "rational::serde_opt_str")]
    pub s: Option<Rational>,
    #[serde(with = "rational::serde_str")]
    pub deviation: Rational,
}

/// A deviating geodesic for `(geodesic, controls)`: the common points `q_i`
/// and deviation points `s_i` between them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleResponse {
    pub geodesic: usize,
    pub other: usize,
    #[serde(with = "rational::serde_vec_str")]
    pub common: Vec<Rational>,
    pub intervals: Vec<DeviationInterval>,
    #[serde(with = "rational::serde_str")]
    pub deviation: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThicknessReport {
    /// Smallest best-response deviation over all members and control sets.
    #[serde(with = "rational::serde_str")]
    pub alpha: Rational,
    pub budget: usize,
    /// Member and control parameters attaining `alpha`.
    pub worst_geodesic: usize,
    #[serde(with = "rational::serde_vec_str")]
    pub worst_controls: Vec<Rational>,
    pub control_sets: u64,
    /// Every recombination of every response is again a member.
    pub recombinations_closed: bool,
}

impl GeodesicFamily {
    pub fn new(graph: WeightedGraph, u: usize, v: usize, members: Vec<GeodesicPath>) -> Result<Self, RnpError> {
        let metric = apsp(&graph)?;
        if members.is_empty() {
            return Err(RnpError::Invalid("geodesic family is empty".into()));
        }
        let mut index = HashMap::with_capacity(members.len());
        for (i, g) in members.iter().enumerate() {
            if g.vertices.first() != Some(&u) || g.vertices.last() != Some(&v) {
                return Err(RnpError::Invalid(format!("member {i} does not run from u to v")));
            }
            if g.length() != metric.d(u, v) {
                return Err(RnpError::Invalid(format!("member {i} is not a geodesic")));
            }
            if g.breakpoints != members[0].breakpoints {
                return Err(RnpError::Invalid(format!(
                    "member {i} has different breakpoint parameters"
                )));
            }
            for (w, t) in g.vertices.iter().zip(&g.breakpoints) {
                if metric.d(u, *w) != t {
                    return Err(RnpError::Invalid(format!("member {i} is not a geodesic")));
                }
            }
            if index.insert(g.vertices.clone(), i).is_some() {
                return Err(RnpError::Invalid(format!("member {i} is repeated")));
            }
        }
        Ok(GeodesicFamily {
            graph,
            metric,
            u,
            v,
            members,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Shared breakpoint parameters of every member.
    pub fn params(&self) -> &[Rational] {
        &self.members[0].breakpoints
    }

    pub fn position(&self, vertices: &[usize]) -> Option<usize> {
        self.index.get(vertices).copied()
    }

    fn param_index(&self, t: &Rational) -> Option<usize> {
        self.params().binary_search(t).ok()
    }

    /// The member maximising the total deviation from `g` among those
    /// passing through `g` at every control parameter. Common points are
    /// all shared vertices; each interval between consecutive common points
    /// contributes its largest vertex deviation. Ties go to the member with
    /// fewer common points, then to the smaller index. `None` if no other
    /// member passes the controls.
    pub fn respond(&self, g: usize, controls: &[Rational]) -> Result<Option<OracleResponse>, RnpError> {
        let mut control_pos = Vec::with_capacity(controls.len());
        for t in controls {
            control_pos.push(
                self.param_index(t)
                    .ok_or_else(|| RnpError::Invalid(format!("control {t} is not a breakpoint")))?,
            );
        }
        let base = &self.members[g].vertices;
        let mut best: Option<(Rational, usize, usize)> = None;
        for (h, other) in self.members.iter().enumerate() {
            if h == g || control_pos.iter().any(|&k| other.vertices[k] != base[k]) {
                continue;
            }
            let (ivs, total) = self.intervals(base, &other.vertices);
            let better = match &best {
                None => true,
                Some((b, n, _)) => total > *b || (total == *b && ivs.len() < *n),
            };
            if better {
                best = Some((total, ivs.len(), h));
            }
        }
        Ok(best.map(|(deviation, _, h)| {
            let (intervals, _) = self.intervals(base, &self.members[h].vertices);
            let params = self.params();
            let mut common: Vec<Rational> = intervals.iter().map(|i| i.q_lo.clone()).collect();
            common.push(params.last().expect("nonempty").clone());
            OracleResponse {
                geodesic: g,
                other: h,
                common,
                intervals,
                deviation,
            }
        }))
    }

    fn intervals(&self, a: &[usize], b: &[usize]) -> (Vec<DeviationInterval>, Rational) {
        let params = self.params();
        let common: Vec<usize> = (0..a.len()).filter(|&k| a[k] == b[k]).collect();
        let mut out = Vec::with_capacity(common.len());
        let mut total = rational::int(0);
        for w in common.windows(2) {
            let mut best: Option<(Rational, usize)> = None;
            for k in w[0] + 1..w[1] {
                let d = self.metric.d(a[k], b[k]);
                if best.as_ref().is_none_or(|(m, _)| d > m) {
                    best = Some((d.clone(), k));
                }
            }
            let (deviation, s) = match best {
                Some((d, k)) => (d, Some(params[k].clone())),
                None => (rational::int(0), None),
            };
            total += &deviation;
            out.push(DeviationInterval {
                q_lo: params[w[0]].clone(),
                q_hi: params[w[1]].clone(),
                s,
                deviation,
            });
        }
        (out, total)
    }

    /// The path following `g` on intervals with `choices[i] == false` and
    /// the other geodesic otherwise (indexed over intervals with a
    /// deviation point).
    pub fn recombine(&self, r: &OracleResponse, choices: &[bool]) -> Vec<usize> {
        let a = &self.members[r.geodesic].vertices;
        let b = &self.members[r.other].vertices;
        let mut out = a.clone();
        let mut c = 0;
        for iv in &r.intervals {
            if iv.s.is_none() {
                continue;
            }
            if choices[c] {
                let lo = self.param_index(&iv.q_lo).expect("breakpoint");
                let hi = self.param_index(&iv.q_hi).expect("breakpoint");
                out[lo..=hi].copy_from_slice(&b[lo..=hi]);
            }
            c += 1;
        }
        out
    }

    /// Whether every recombination of `g` and the response lies in the
    /// family.
    pub fn recombinations_closed(&self, r: &OracleResponse) -> Result<bool, RnpError> {
        let k = r.intervals.iter().filter(|i| i.s.is_some()).count();
        if k > MAX_RECOMBINATION_BITS {
            return Err(RnpError::Cap {
                what: "recombination intervals",
                cap: MAX_RECOMBINATION_BITS as u64,
            });
        }
        for mask in 0u64..1 << k {
            let choices: Vec<bool> = (0..k).map(|b| mask >> b & 1 == 1).collect();
            if self.position(&self.recombine(r, &choices)).is_none() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// All source–sink geodesics of the diamond `D_n` with edge length `2^-n`.
pub fn diamond_geodesic_family(n: u32) -> Result<GeodesicFamily, RnpError> {
    if n > MAX_FAMILY_DIAMOND_LEVEL {
        return Err(RnpError::Cap {
            what: "diamond level for geodesic families",
            cap: MAX_FAMILY_DIAMOND_LEVEL as u64,
        });
    }
    let d = diamond(n, Weighting::Scaled)?;
    let members = enumerate_geodesic_paths(&d.graph, d.source, d.sink, DEFAULT_GEODESIC_CAP)?;
    GeodesicFamily::new(d.graph, d.source, d.sink, members)
}

fn subsets(pool: &[usize], max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(0, |&l: &usize| l + 1);
            for p in start..pool.len() {
                let mut t = s.clone();
                t.push(p);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.into_iter()
        .map(|s| s.into_iter().map(|i| pool[i]).collect())
        .collect()
}

/// Thickness constant of the family for control sets of at most `budget`
/// interior breakpoints, by exhaustive search.
pub fn thickness_alpha(family: &GeodesicFamily, budget: usize) -> Result<ThicknessReport, RnpError> {
    let params = family.params().to_vec();
    let interior: Vec<usize> = (1..params.len().saturating_sub(1)).collect();
    let sets = subsets(&interior, budget.min(interior.len()));
    let m = family.len() as u64;
    let work = (sets.len() as u64).saturating_mul(m).saturating_mul(m);
    if work > MAX_THICKNESS_WORK {
        return Err(RnpError::Cap {
            what: "thickness search work",
            cap: MAX_THICKNESS_WORK,
        });
    }
    type Best = (Rational, usize, usize, bool);
    let per_member: Vec<Result<Best, RnpError>> = (0..family.len())
        .into_par_iter()
        .map(|g| {
            let mut best: Option<(Rational, usize)> = None;
            let mut closed = true;
            for (si, set) in sets.iter().enumerate() {
                let controls: Vec<Rational> = set.iter().map(|&k| params[k].clone()).collect();
                let dev = match family.respond(g, &controls)? {
                    Some(r) => {
                        closed &= family.recombinations_closed(&r)?;
                        r.deviation
                    }
                    None => rational::int(0),
                };
                if best.as_ref().is_none_or(|(b, _)| dev < *b) {
                    best = Some((dev, si));
                }
            }
            let (dev, si) = best.expect("at least the empty control set");
            Ok((dev, g, si, closed))
        })
        .collect();
    let mut worst: Option<(Rational, usize, usize)> = None;
    let mut closed = true;
    for r in per_member {
        let (dev, g, si, c) = r?;
        closed &= c;
        if worst.as_ref().is_none_or(|(w, _, _)| dev < *w) {
            worst = Some((dev, g, si));
        }
    }
    let (alpha, g, si) = worst.expect("family is nonempty");
    Ok(ThicknessReport {
        alpha,
        budget,
        worst_geodesic: g,
        worst_controls: sets[si].iter().map(|&k| params[k].clone()).collect(),
        control_sets: sets.len() as u64,
        recombinations_closed: closed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn single_diamond() {
        let f = diamond_geodesic_family(1).unwrap();
        assert_eq!(f.len(), 2);
        let r = f.respond(0, &[]).unwrap().unwrap();
        assert_eq!(r.other, 1);
        assert_eq!(r.common, vec![int(0), int(1)]);
        assert_eq!(r.intervals[0].s, Some(frac(1, 2)));
        assert_eq!(r.deviation, int(1));
        let t = thickness_alpha(&f, 0).unwrap();
        assert_eq!(t.alpha, int(1));
        assert!(t.recombinations_closed);
        // Pinning the middle vertex leaves no alternative.
        assert_eq!(f.respond(0, &[frac(1, 2)]).unwrap(), None);
        assert_eq!(thickness_alpha(&f, 1).unwrap().alpha, int(0));
        assert!(f.respond(0, &[frac(1, 3)]).is_err());
    }

    #[test]
    fn second_diamond_by_hand() {
        let f = diamond_geodesic_family(2).unwrap();
        assert_eq!(f.len(), 8);
        // Without controls the whole-diamond swap gives deviation 1.
        let t0 = thickness_alpha(&f, 0).unwrap();
        assert_eq!(t0.alpha, int(1));
        assert!(t0.recombinations_closed);
        // Pinning the middle vertex leaves two sub-diamond swaps of 1/2.
        let r = f.respond(0, &[frac(1, 2)]).unwrap().unwrap();
        assert_eq!(r.deviation, int(1));
        assert_eq!(r.intervals.len(), 2);
        // Pinning a quarter point kills one sub-diamond.
        let r = f.respond(0, &[frac(1, 4)]).unwrap().unwrap();
        assert_eq!(r.deviation, frac(1, 2));
        let t1 = thickness_alpha(&f, 1).unwrap();
        assert_eq!(t1.alpha, frac(1, 2));
        assert_eq!(t1.control_sets, 4);
    }

    #[test]
    fn subsets_enumerate_by_size() {
        assert_eq!(subsets(&[5, 6, 7], 2).len(), 1 + 3 + 3);
        assert_eq!(subsets(&[5, 6], 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn rejects_non_geodesic_members() {
        let f = diamond_geodesic_family(1).unwrap();
        let mut bad = f.members[0].clone();
        bad.breakpoints[1] = frac(1, 3);
        assert!(GeodesicFamily::new(f.graph.clone(), f.u, f.v, vec![bad]).is_err());
        let dup = vec![f.members[0].clone(), f.members[0].clone()];
        assert!(GeodesicFamily::new(f.graph.clone(), f.u, f.v, dup).is_err());
    }
}
