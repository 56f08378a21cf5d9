use std::fs;
use std::path::Path as FsPath;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use covadj::criteria::{self, theorem7_report, Theorem7Report};
use covadj::scm::{search_counterexample, verify_soundness};
use covadj::separation::{self, direct_route, path_blocked, route_open};
use covadj::twin::twin_network;
use covadj::{
    parse_graph, AdjustmentQuery, Admg, CriterionName, CriterionVerdict, Failure, Mode, NodeId,
    NodeSet, Route, VerdictReport,
};

use crate::{Cli, Command, GraphArg, ModeArg, Outcome, PairArgs, QueryArgs};

fn load(arg: &GraphArg) -> Result<Admg> {
    let text = fs::read_to_string(&arg.graph)
        .with_context(|| format!("cannot read {}", arg.graph.display()))?;
    parse_graph(&text).with_context(|| format!("in {}", arg.graph.display()))
}

fn set(names: &[String]) -> NodeSet {
    NodeSet::from_names(names.iter().map(|s| s.trim()).filter(|s| !s.is_empty()))
}

fn query(q: &QueryArgs) -> Result<(Admg, AdjustmentQuery)> {
    let g = load(&q.graph)?;
    let query = AdjustmentQuery::new(set(&q.x), set(&q.y), set(&q.z));
    query.validate(&g)?;
    Ok((g, query))
}

fn pair(p: &PairArgs) -> Result<(Admg, NodeSet, NodeSet)> {
    let g = load(&p.graph)?;
    let (x, y) = (set(&p.x), set(&p.y));
    AdjustmentQuery::new(x.clone(), y.clone(), NodeSet::new()).validate(&g)?;
    Ok((g, x, y))
}

fn emit_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn outcome(positive: bool) -> Outcome {
    if positive {
        Outcome::Positive
    } else {
        Outcome::Negative
    }
}

fn describe_failure(f: &Failure, z: &NodeSet) -> String {
    match f {
        Failure::Condition2 { open_path } => {
            format!("non-causal path {open_path} is open given {z}")
        }
        Failure::BackdoorOpenPath { open_path } => {
            format!("back-door path {open_path} is open given {z}")
        }
        other => other.to_string(),
    }
}

fn report_verdict(
    cli: &Cli,
    name: CriterionName,
    q: &AdjustmentQuery,
    v: &CriterionVerdict,
) -> Result<Outcome> {
    if cli.json {
        emit_json(&VerdictReport::from_verdict(name, v))?;
    } else {
        let label = match name {
            CriterionName::Adjustment => "adjustment criterion",
            CriterionName::Backdoor => "back-door criterion",
            CriterionName::Theorem7 => "magnified-graph check",
        };
        println!(
            "{label}: {} for {q}",
            if v.holds { "holds" } else { "fails" }
        );
        if let Some(f) = &v.failure {
            println!("{}", describe_failure(f, &q.z));
        }
    }
    Ok(outcome(v.holds))
}

fn report_t7(cli: &Cli, q: &AdjustmentQuery, r: &Theorem7Report) -> Result<Outcome> {
    if cli.json {
        emit_json(&VerdictReport::from_theorem7(r))?;
    } else {
        println!(
            "magnified-graph check: {} for {q}",
            if r.holds() { "holds" } else { "fails" }
        );
        println!("L = {}, Z_nd = {}, Z_d = {}", r.l, r.z_nd, r.z_d);
        for (name, ok) in [("a", r.clause_a), ("b", r.clause_b), ("c", r.clause_c)] {
            println!(
                "clause ({name}): {}",
                if ok { "satisfied" } else { "violated" }
            );
        }
    }
    Ok(outcome(r.holds()))
}

fn parse_edge(text: &str) -> Result<(NodeId, NodeId)> {
    let (t, h) = text
        .split_once("->")
        .ok_or_else(|| anyhow!("edge `{text}` is not of the form A->B"))?;
    Ok((NodeId::from(t.trim()), NodeId::from(h.trim())))
}

fn dump_graph(cli: &Cli, g: &Admg) -> Result<Outcome> {
    if cli.json {
        emit_json(&json!({ "graph": g.to_text() }))?;
    } else {
        print!("{}", g.to_text());
    }
    Ok(Outcome::Positive)
}

fn write_file(path: &FsPath, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub(crate) fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::CheckBackdoor(q) => {
            let (g, q) = query(q)?;
            let v = criteria::backdoor_criterion(&g, &q)?;
            report_verdict(cli, CriterionName::Backdoor, &q, &v)
        }
        Command::CheckAdjust { query: qa, mode } => {
            let (g, q) = query(qa)?;
            let mode = match mode {
                ModeArg::Fast => Mode::Fast,
                ModeArg::Reference => Mode::Reference,
            };
            let v = criteria::adjustment_criterion(&g, &q, mode)?;
            report_verdict(cli, CriterionName::Adjustment, &q, &v)
        }
        Command::FindSets {
            pair: p,
            candidates,
            limit,
        } => {
            let (g, x, y) = pair(p)?;
            let pool = match candidates {
                Some(c) => set(c),
                None => g.node_set().difference(&x.union(&y)),
            };
            let sets = criteria::enumerate_adjustment_sets(&g, &x, &y, &pool, *limit)?;
            if cli.json {
                emit_json(&json!({ "treatments": x, "outcomes": y, "sets": sets }))?;
            } else if sets.is_empty() {
                println!("no valid adjustment set among subsets of {pool}");
            } else {
                for s in &sets {
                    println!("{s}");
                }
            }
            Ok(outcome(!sets.is_empty()))
        }
        Command::CanonicalSet(p) => {
            let (g, x, y) = pair(p)?;
            let z = criteria::canonical_adjustment_set(&g, &x, &y)?;
            if cli.json {
                emit_json(&json!({ "canonical_set": z }))?;
            } else {
                println!("{z}");
            }
            Ok(Outcome::Positive)
        }
        Command::ExistsSet(p) => {
            let (g, x, y) = pair(p)?;
            let z = criteria::canonical_adjustment_set(&g, &x, &y)?;
            let exists = criteria::exists_adjustment_set(&g, &x, &y)?;
            if cli.json {
                emit_json(&json!({ "exists": exists, "canonical_set": z }))?;
            } else if exists {
                println!("true: {z} is a valid adjustment set");
            } else {
                println!("false: no set satisfies the adjustment criterion (canonical candidate {z} fails)");
            }
            Ok(outcome(exists))
        }
        Command::Twin { graph, x } => {
            let g = load(graph)?;
            let t = twin_network(&g, &set(x))?;
            if cli.json {
                emit_json(&json!({
                    "graph": t.graph.to_text(),
                    "merged": t.merged,
                    "exogenous": t.exogenous,
                    "factual_of": t.factual_of,
                    "counterfactual_of": t.counterfactual_of,
                }))?;
            } else {
                print!("{}", t.graph.to_text());
            }
            Ok(Outcome::Positive)
        }
        Command::Project { graph, latent } => {
            let g = load(graph)?;
            let p = covadj::graph::latent_project(&g, &set(latent))?;
            dump_graph(cli, &p)
        }
        Command::Magnify {
            graph,
            edges,
            out_of,
        } => {
            let g = load(graph)?;
            let mut e: Vec<(NodeId, NodeId)> = edges
                .iter()
                .filter(|s| !s.trim().is_empty())
                .map(|s| parse_edge(s))
                .collect::<Result<_>>()?;
            for extra in criteria::edges_out_of(&g, &set(out_of))? {
                if !e.contains(&extra) {
                    e.push(extra);
                }
            }
            dump_graph(cli, &criteria::magnify(&g, &e)?)
        }
        Command::CheckT7(qa) => {
            let (g, q) = query(qa)?;
            let r = theorem7_report(&g, &q)?;
            report_t7(cli, &q, &r)
        }
        Command::Verify {
            query: qa,
            seed,
            trials,
            tol,
        } => {
            let (g, q) = query(qa)?;
            let report = verify_soundness(&g, &q, *trials, *tol, *seed)?;
            if cli.json {
                emit_json(&report)?;
            } else if let Some(v) = &report.violation {
                println!(
                    "FAILED: trial {} (model seed {}) has gap {:.3e} > {:.1e} at {:?}",
                    v.trial, v.seed, v.gap, tol, v.x
                );
            } else {
                println!(
                    "passed: {trials} models, largest cell gap {:.3e} (tolerance {:.1e})",
                    report.max_gap, tol
                );
            }
            Ok(outcome(report.passed()))
        }
        Command::Refute {
            query: qa,
            seed,
            trials,
            delta,
            scm_out,
        } => {
            let (g, q) = query(qa)?;
            let found = search_counterexample(&g, &q, *trials, *delta, *seed)?;
            if let (Some(c), Some(path)) = (&found, scm_out) {
                write_file(path, &serde_json::to_string_pretty(&c.scm)?)?;
            }
            if cli.json {
                emit_json(
                    &json!({ "found": found.is_some(), "trials": trials, "counterexample": found }),
                )?;
            } else {
                match &found {
                    Some(c) => println!(
                        "counterexample at trial {} (model seed {}): total variation {:.4} at {:?}",
                        c.trial, c.seed, c.gap, c.x
                    ),
                    None => println!("no counterexample in {trials} models with gap above {delta}"),
                }
            }
            // finding a counterexample is the negative verdict for the set
            Ok(outcome(found.is_none()))
        }
        Command::Paths {
            graph,
            x,
            y,
            z,
            max_len,
            route,
        } => {
            let g = load(graph)?;
            let z = set(z);
            if let Some(text) = route {
                let r: Route = text.parse()?;
                let p = direct_route(&g, &r)?;
                let open = route_open(&g, &r, &z)?;
                let p_open = !path_blocked(&g, &p, &z)?;
                if cli.json {
                    emit_json(&json!({
                        "route": r.to_string(),
                        "route_open": open,
                        "direct_route": p,
                        "direct_route_open": p_open,
                    }))?;
                } else {
                    println!("direct route: {p}");
                    println!("route open given {z}: {open}; direct route open: {p_open}");
                }
                return Ok(Outcome::Positive);
            }
            let (x, y) = (set(x), set(y));
            if x.is_empty() || y.is_empty() {
                bail!("paths needs -X and -Y, or --route");
            }
            if !x.is_disjoint(&z) || !y.is_disjoint(&z) {
                bail!("the conditioning set overlaps the endpoints");
            }
            let paths = separation::enumerate_paths(&g, &x, &y, max_len.unwrap_or(g.len()))?;
            let mut rows = Vec::new();
            for p in &paths {
                rows.push(json!({
                    "path": p,
                    "causal": p.is_causal(),
                    "backdoor": p.is_backdoor(),
                    "open": !path_blocked(&g, p, &z)?,
                }));
            }
            if cli.json {
                emit_json(&rows)?;
            } else {
                for (p, row) in paths.iter().zip(&rows) {
                    let kind = if p.is_causal() {
                        "causal"
                    } else {
                        "non-causal"
                    };
                    let state = if row["open"] == true {
                        "open"
                    } else {
                        "blocked"
                    };
                    println!("{p}\t{kind}\t{state} given {z}");
                }
            }
            Ok(Outcome::Positive)
        }
    }
}
