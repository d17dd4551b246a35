use serde_json::{json, Value};
use testspaces::embeddings::{
    bourgain_embed, cycle_tree_lower_oracle, distortion, frechet_embed, james_alpha, CoefficientGrid, DistortionReport,
    Embedding, NormedTarget, Scalar, SparseVec,
};
use testspaces::generators::{
    binary_tree, cycle, diamond, fork, heisenberg_ball, laakso, tree_product, RecursiveGraph, Weighting,
};
use testspaces::l2::min_distortion_l2;
use testspaces::markov::{
    downhill_walk, downward_tree_walk, exact_convexity, mc_convexity, tree_walk_convexity, ConvexityEstimate,
};
use testspaces::metric::{apsp, verify_metric, WeightedGraph};
use testspaces::rational::{self, Rational};
use testspaces::rnp::{
    broken_line_family, diamond_geodesic_family, diamond_tent_embedding, martingale_check, martingale_from_embedding,
    rademacher_tree, thickness_alpha, tree_to_bush,
};

use crate::args::*;
use crate::input::{load_graph, load_space, load_vectors, rows_to_csv};
use crate::{CliError, OrFail, Output};

pub fn dispatch(cmd: &Command) -> Result<Output, CliError> {
    match cmd {
        Command::Gen(a) => gen(a),
        Command::Apsp(a) => {
            let space = apsp(&load_graph(&a.graph)?).or_fail()?;
            Ok(Output {
                csv: Some(space.to_csv()),
                result: json!({"points": space.len(), "space": space.to_json()}),
            })
        }
        Command::Distort(a) => distort(a),
        Command::L2min(a) => l2min(a),
        Command::Markov(a) => markov(a),
        Command::Rnp { command } => rnp(command),
        Command::Oracle { command } => oracle(command),
        Command::Embed(a) => embed(a),
    }
}

fn weighting(w: WeightingArg) -> Weighting {
    match w {
        WeightingArg::Unit => Weighting::Unit,
        WeightingArg::Scaled => Weighting::Scaled,
    }
}

fn graph_output(g: &WeightedGraph, extra: Value) -> Output {
    let mut result = json!({
        "vertices": g.len(),
        "edges": g.edges().len(),
        "graph": g.to_json(),
    });
    if let (Value::Object(r), Value::Object(e)) = (&mut result, extra) {
        r.extend(e);
    }
    Output::json(result)
}

fn recursive_output(r: &RecursiveGraph) -> Output {
    graph_output(
        &r.graph,
        json!({"family": r.family, "level": r.level, "source": r.source, "sink": r.sink, "level_sizes": r.level_sizes}),
    )
}

fn gen(a: &GenArgs) -> Result<Output, CliError> {
    let w = weighting(a.weighting);
    match a.family {
        GenFamily::Tree => Ok(graph_output(&binary_tree(a.n).or_fail()?, json!({"depth": a.n}))),
        GenFamily::Fork => Ok(graph_output(&fork(), json!({}))),
        GenFamily::Diamond => Ok(recursive_output(&diamond(a.n, w).or_fail()?)),
        GenFamily::Laakso => Ok(recursive_output(&laakso(a.n, w).or_fail()?)),
        GenFamily::Cycle => Ok(graph_output(&cycle(a.n as usize).or_fail()?, json!({}))),
        GenFamily::Product | GenFamily::Heisenberg => {
            let space = if a.family == GenFamily::Product {
                if a.depths.is_empty() {
                    return Err(CliError::validation("product needs --depths"));
                }
                tree_product(&a.depths).or_fail()?
            } else {
                heisenberg_ball(a.n).or_fail()?
            };
            Ok(Output {
                csv: Some(space.to_csv()),
                result: json!({"points": space.len(), "space": space.to_json()}),
            })
        }
    }
}

fn target(t: Target, dim: usize) -> NormedTarget {
    match t {
        Target::L1 => NormedTarget::l1(dim),
        Target::L2 => NormedTarget::l2(dim),
        Target::Linf => NormedTarget::linf(dim),
        Target::Summing => NormedTarget::summing(dim),
    }
}

fn report_json<S: Scalar>(r: &DistortionReport<S>, fmt: impl Fn(&S) -> Value) -> Value {
    json!({
        "lip": fmt(&r.lip),
        "colip": fmt(&r.colip),
        "distortion": fmt(&r.distortion),
        "lip_witness": r.lip_witness,
        "colip_witness": r.colip_witness,
    })
}

fn exact_str(r: &Rational) -> Value {
    Value::String(rational::format(r))
}

fn distort(a: &DistortArgs) -> Result<Output, CliError> {
    let space = load_space(&a.space)?;
    let rows = load_vectors(&a.vectors)?;
    let dim = rows.first().map_or(0, Vec::len);
    let t = target(a.target, dim);
    let result = if a.target == Target::L2 {
        let rows = rows.iter().map(|r| r.iter().map(rational::to_f64).collect()).collect();
        let emb = Embedding::from_dense(rows, t).or_fail()?;
        let r = distortion(&space, &emb).or_fail()?;
        json!({"target": "l2", "exact": false, "report": report_json(&r, |x| json!(x))})
    } else {
        let emb = Embedding::from_dense(rows, t).or_fail()?;
        let r = distortion(&space, &emb).or_fail()?;
        json!({
            "target": emb.target.name(),
            "exact": true,
            "report": report_json(&r, exact_str),
            "distortion_f64": rational::to_f64(&r.distortion),
        })
    };
    Ok(Output::json(result))
}

fn l2min(a: &L2minArgs) -> Result<Output, CliError> {
    let space = load_space(&a.space)?;
    let verify = verify_metric(&space);
    if !verify.is_valid() {
        return Err(CliError::validation("input is not a metric space"));
    }
    let r = min_distortion_l2(&space, a.tol).or_fail()?;
    if let Some(path) = &a.emit_gram {
        std::fs::write(path, r.certificate.to_csv())
            .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
    }
    let rows = r.embedding.dense_rows();
    Ok(Output {
        csv: Some(rows_to_csv(&rows, |x| format!("{x}"))),
        result: json!({
            "c_star": r.c_star,
            "lower": r.lower,
            "measured_distortion": r.measured_distortion,
            "psd_violation": r.certificate.psd_violation,
            "constraint_violation": r.certificate.constraint_violation,
            "probes": r.probes,
            "embedding": rows,
        }),
    })
}

fn estimate_json(e: &ConvexityEstimate) -> Value {
    let side = |exact: &Option<Rational>, x: f64| exact.as_ref().map_or(json!(x), exact_str);
    json!({
        "p": e.p,
        "horizon": e.horizon,
        "lhs": side(&e.lhs_exact, e.lhs),
        "rhs": side(&e.rhs_exact, e.rhs),
        "lhs_f64": e.lhs,
        "rhs_f64": e.rhs,
        "piLower": e.pi_lower,
        "method": e.method,
    })
}

fn integer_p(p: f64) -> Result<u32, CliError> {
    if p >= 1.0 && p.fract() == 0.0 && p <= 64.0 {
        Ok(p as u32)
    } else {
        Err(CliError::validation(format!(
            "exact mode needs an integer p in 1..=64, got {p}"
        )))
    }
}

fn markov(a: &MarkovArgs) -> Result<Output, CliError> {
    let seed = || {
        a.seed
            .ok_or_else(|| CliError::validation("Monte Carlo runs need an explicit --seed"))
    };
    let e = match a.walk {
        Walk::Tree => match a.mode {
            Mode::Exact if !a.explicit => tree_walk_convexity(a.n, integer_p(a.p)?).or_fail()?,
            Mode::Exact => {
                let (chain, map, tree) = downward_tree_walk(a.n).or_fail()?;
                exact_convexity(&chain, &map, &tree, integer_p(a.p)?).or_fail()?
            }
            Mode::Mc => {
                let (chain, map, tree) = downward_tree_walk(a.n).or_fail()?;
                mc_convexity(&chain, &map, &tree, a.p, seed()?, a.samples).or_fail()?
            }
        },
        Walk::Diamond | Walk::Laakso => {
            let w = weighting(a.weighting);
            let (g, steps) = if a.walk == Walk::Diamond {
                (diamond(a.n, w).or_fail()?, 1usize << a.n)
            } else {
                (laakso(a.n, w).or_fail()?, 1usize << (2 * a.n))
            };
            let (chain, map) = downhill_walk(&g.graph, g.source, g.sink, a.horizon.unwrap_or(steps)).or_fail()?;
            let space = apsp(&g.graph).or_fail()?;
            match a.mode {
                Mode::Exact => exact_convexity(&chain, &map, &space, integer_p(a.p)?).or_fail()?,
                Mode::Mc => mc_convexity(&chain, &map, &space, a.p, seed()?, a.samples).or_fail()?,
            }
        }
    };
    Ok(Output::json(estimate_json(&e)))
}

fn rnp(cmd: &RnpCommand) -> Result<Output, CliError> {
    let result = match cmd {
        RnpCommand::Tree { n } => {
            let t = rademacher_tree(*n).or_fail()?;
            let report = t.verify();
            json!({
                "depth": t.depth,
                "atoms": t.atoms,
                "delta": exact_str(&t.delta),
                "valid": report.is_valid(),
                "report": report,
            })
        }
        RnpCommand::Lines { depth } => {
            let mut bush = tree_to_bush(&rademacher_tree(*depth).or_fail()?).or_fail()?;
            if !bush.on_hyperplane() {
                bush = bush.shifted_to_hyperplane();
            }
            let family = broken_line_family(&bush, *depth as usize).or_fail()?;
            let report = family.check().or_fail()?;
            json!({
                "depth": depth,
                "lines": family.lines.len(),
                "delta": exact_str(&bush.delta),
                "valid": report.is_valid(),
                "report": report,
            })
        }
        RnpCommand::Thickness { n, budget } => {
            let fam = diamond_geodesic_family(*n).or_fail()?;
            let r = thickness_alpha(&fam, *budget).or_fail()?;
            json!({"n": n, "geodesics": fam.len(), "report": r})
        }
        RnpCommand::Martingale { n, steps } => {
            let d = diamond(*n, Weighting::Scaled).or_fail()?;
            let emb = diamond_tent_embedding(&d).or_fail()?;
            let fam = diamond_geodesic_family(*n).or_fail()?;
            let run = martingale_from_embedding(&fam, &emb, *steps).or_fail()?;
            let check = martingale_check(&run.martingale).or_fail()?;
            let alpha = thickness_alpha(&fam, run.max_controls).or_fail()?.alpha;
            let bound = rational::frac(1, 4) * &run.ell * &alpha;
            let even: Vec<&Rational> = check.differences.iter().skip(1).step_by(2).collect();
            let holds = even.len() == *steps && even.iter().all(|d| **d >= bound);
            json!({
                "n": n,
                "double_steps": steps,
                "alpha": exact_str(&alpha),
                "quarter_ell_alpha": exact_str(&bound),
                "even_differences": even.iter().map(|d| exact_str(d)).collect::<Vec<_>>(),
                "bound_holds": holds,
                "valid": check.is_valid(),
                "check": check,
                "run": run.to_json(),
            })
        }
    };
    Ok(Output::json(result))
}

fn oracle(cmd: &OracleCommand) -> Result<Output, CliError> {
    let result = match cmd {
        OracleCommand::CycleTree { m, max_tree, budget } => {
            serde_json::to_value(cycle_tree_lower_oracle(*m, *max_tree, *budget).or_fail()?).expect("serializes")
        }
        OracleCommand::JamesAlpha { m, lo, hi } => {
            serde_json::to_value(james_alpha(*m, CoefficientGrid { lo: *lo, hi: *hi }).or_fail()?).expect("serializes")
        }
    };
    Ok(Output::json(result))
}

fn embed(a: &EmbedArgs) -> Result<Output, CliError> {
    let emb = match a.kind {
        EmbedKind::Bourgain => bourgain_embed(a.n).or_fail()?,
        EmbedKind::Tent => diamond_tent_embedding(&diamond(a.n, Weighting::Scaled).or_fail()?).or_fail()?,
        EmbedKind::Frechet => {
            let path = a
                .space
                .as_ref()
                .ok_or_else(|| CliError::validation("the Fréchet embedding needs --space"))?;
            frechet_embed(&load_space(path)?)
        }
    };
    let rows: Vec<Vec<Rational>> = emb
        .vectors
        .iter()
        .map(|v: &SparseVec<Rational>| v.to_dense(emb.target.dim))
        .collect();
    let strings: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(rational::format).collect()).collect();
    Ok(Output {
        csv: Some(rows_to_csv(&rows, rational::format)),
        result: json!({
            "target": emb.target.name(),
            "dim": emb.target.dim,
            "points": rows.len(),
            "vectors": strings,
        }),
    })
}
