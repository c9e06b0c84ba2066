use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};
use starsurg_core::dualize::dual_cap;
use starsurg_core::embedder::{
    check_structure, complement_betti2, complement_euler, enumerate_with, multiplicity_total,
    EnumerateOptions, SearchMode,
};
use starsurg_core::lefschetz::homology;
use starsurg_core::mcg::{
    daisy, equal_with_limit, f_factorization, g_factorization, generalized_lantern, lantern,
    proof_replay, Factorization,
};
use starsurg_core::obstruction::{
    park_chain_fraction, park_chain_recursive, park_parameters, parse_sides,
    single_blowdown_verdict, Outcome, ParkDescriptor,
};
use starsurg_core::plumbing::{make_dgamma, make_p, parse_graph, LinearChain, Side, StarPlumbing};
use starsurg_core::substitution::{reachable, rule_set, MoveSet, ReachBudget, Reachability};
use starsurg_core::{Error, ParseError};

use crate::census::{self, CensusOptions};
use crate::{exit, Cli, Command, Failure, SearchArgs};

type CmdResult = Result<i32, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn parse_failure(path: &Path, e: ParseError) -> Failure {
    Failure::usage(format!("{}:{}: {}", path.display(), e.line, e.message))
}

fn load_graph(path: &Path) -> Result<StarPlumbing, Failure> {
    parse_graph(&read(path)?).map_err(|e| parse_failure(path, e))
}

fn load_factorization(path: &Path) -> Result<Factorization, Failure> {
    read(path)?
        .parse::<Factorization>()
        .map_err(|e| parse_failure(path, e))
}

fn emit(out: &mut dyn Write, json: bool, value: Value, text: &str) -> Result<(), Failure> {
    if json {
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&value).expect("json value")
        )?;
    } else {
        write!(out, "{text}")?;
        if !text.ends_with('\n') {
            writeln!(out)?;
        }
    }
    Ok(())
}

fn options(s: &SearchArgs) -> EnumerateOptions {
    EnumerateOptions {
        mode: if s.fast {
            SearchMode::Fast
        } else {
            SearchMode::Audit
        },
        node_budget: s.node_budget,
    }
}

fn to_cap(g: &StarPlumbing) -> Result<StarPlumbing, Error> {
    match g.side() {
        Side::Cap => Ok(g.clone()),
        Side::Filling => dual_cap(g),
    }
}

fn one_line(g: &StarPlumbing) -> String {
    let arms: Vec<String> = g
        .arms()
        .iter()
        .map(|a| {
            let w: Vec<String> = a.iter().map(i64::to_string).collect();
            format!("({})", w.join(","))
        })
        .collect();
    format!("[{}; {}]", g.center_weight(), arms.join(" "))
}

pub(crate) fn dispatch(cli: &Cli, out: &mut dyn Write) -> CmdResult {
    let json = cli.json;
    match &cli.command {
        Command::Dualize { graph } => {
            let g = load_graph(graph)?;
            let cap = dual_cap(&g).map_err(|e| Failure::in_file(graph, e))?;
            emit(
                out,
                json,
                json!({"graph": g, "cap": cap, "dsl": cap.to_string()}),
                &cap.to_string(),
            )?;
            Ok(exit::OK)
        }
        Command::EnumerateEmbeddings {
            graph,
            search,
            classes,
        } => {
            let g = load_graph(graph)?;
            let cap = to_cap(&g).map_err(|e| Failure::in_file(graph, e))?;
            enumerate_cmd(&cap, search, *classes, json, out)
        }
        Command::Euler {
            graph,
            a,
            b,
            search,
        } => {
            let (filling, cap) = match (graph, a, b) {
                (Some(path), None, None) => {
                    let g = load_graph(path)?;
                    let cap = to_cap(&g).map_err(|e| Failure::in_file(path, e))?;
                    ((g.side() == Side::Filling).then_some(g), cap)
                }
                (None, Some(a), Some(b)) => (Some(make_p(*a, *b)?), make_dgamma(*a, *b)?),
                _ => return Err(Failure::usage("give either a graph file or --a and --b")),
            };
            let e = enumerate_with(&cap, &options(search))?;
            let mut chis = Vec::new();
            for emb in &e.embeddings {
                chis.push(complement_euler(&cap, emb)?);
            }
            let mut text = String::new();
            if let Some(g) = &filling {
                text += &format!("filling chi = {}\n", g.euler_characteristic());
            }
            for (i, (emb, chi)) in e.embeddings.iter().zip(&chis).enumerate() {
                text += &format!(
                    "embedding {}: N = {}, chi = {chi}\n",
                    i + 1,
                    emb.n_exceptional()
                );
            }
            emit(
                out,
                json,
                json!({
                    "filling_euler": filling.as_ref().map(StarPlumbing::euler_characteristic),
                    "complement_euler": chis,
                }),
                &text,
            )?;
            Ok(exit::OK)
        }
        Command::Obstruct { a, b } => {
            let v = single_blowdown_verdict(*a, *b)?;
            emit(out, json, json!(v), &v.to_string())?;
            Ok(match v.outcome {
                Outcome::RuledOut => exit::OK,
                Outcome::Inconclusive => exit::NEGATIVE,
            })
        }
        Command::Park { sides, p, q, chain } => park_cmd(sides, *p, *q, chain, json, out),
        Command::VerifyRelation {
            name,
            p,
            k,
            m,
            n,
            left,
            right,
            word_limit,
        } => {
            let (label, lhs, rhs) = match (name.as_deref(), left, right) {
                (Some(name), None, None) => {
                    let singles =
                        |c: usize| -> Vec<Vec<usize>> { (1..=c).map(|i| vec![i]).collect() };
                    let r = match name {
                        "lantern" => lantern(&[1], &[2], &[3])?,
                        "daisy" => daisy(&singles(p + 1))?,
                        "glantern" => generalized_lantern(*k)?,
                        "fg" => {
                            let f = f_factorization(*m, *n)?;
                            let g = g_factorization(*m, *n)?;
                            starsurg_core::mcg::Relation {
                                name: format!("F({m},{n}) = G({m},{n})"),
                                lhs: f,
                                rhs: g,
                            }
                        }
                        other => return Err(Failure::usage(format!("unknown relation {other:?}"))),
                    };
                    (r.name, r.lhs, r.rhs)
                }
                (None, Some(l), Some(r)) => (
                    format!("{} = {}", l.display(), r.display()),
                    load_factorization(l)?,
                    load_factorization(r)?,
                ),
                _ => return Err(Failure::usage("give --name or two factorization files")),
            };
            let eq = equal_with_limit(&lhs, &rhs, *word_limit)?;
            let verdict = if eq { "equal" } else { "not equal" };
            emit(
                out,
                json,
                json!({"relation": label, "equal": eq, "lhs": lhs, "rhs": rhs}),
                &format!("{label}: {verdict}\n"),
            )?;
            Ok(if eq { exit::OK } else { exit::NEGATIVE })
        }
        Command::ProofReplay { m, n } => {
            let d = proof_replay(*m, *n)?;
            emit(out, json, json!(d), &d.to_string())?;
            Ok(exit::OK)
        }
        Command::SubstSearch {
            rules,
            max_daisy,
            max_depth,
            max_states,
            hurwitz,
            start,
            target,
        } => {
            let s = load_factorization(start)?;
            let t = load_factorization(target)?;
            let rules = rule_set(rules, *max_daisy)?;
            let r = reachable(
                &s,
                &t,
                &rules,
                ReachBudget {
                    max_depth: *max_depth,
                    max_states: *max_states,
                },
                MoveSet { hurwitz: *hurwitz },
            )?;
            let value = match &r {
                Reachability::Reached { path } => json!({"result": "reached", "path": path}),
                Reachability::Exhausted(stats) => json!({
                    "result": "exhausted",
                    "stats": stats,
                    "note": "exhausting the budget is not a proof that no path exists",
                }),
            };
            emit(out, json, value, &r.to_string())?;
            Ok(if r.is_reached() {
                exit::OK
            } else {
                exit::NEGATIVE
            })
        }
        Command::Invariants { factorization } => {
            let f = load_factorization(factorization)?;
            let inv = homology(&f).map_err(|e| Failure::in_file(factorization, e))?;
            emit(out, json, json!(inv), &inv.to_string())?;
            Ok(exit::OK)
        }
        Command::Census {
            family,
            a_range,
            b_range,
            out: path,
            jobs,
            timing,
            search,
        } => {
            let opts = CensusOptions {
                family: family.clone(),
                a_range: census::parse_range(a_range)?,
                b_range: census::parse_range(b_range)?,
                jobs: *jobs,
                timing: *timing,
                enumerate: options(search),
            };
            let lines = census::run(&opts)?;
            match path {
                Some(p) => {
                    let added = census::append_new(p, &lines)?;
                    writeln!(
                        out,
                        "{} records, {added} appended to {}",
                        lines.len(),
                        p.display()
                    )?;
                }
                None => {
                    for l in &lines {
                        writeln!(out, "{l}")?;
                    }
                }
            }
            Ok(exit::OK)
        }
    }
}

fn enumerate_cmd(
    cap: &StarPlumbing,
    search: &SearchArgs,
    classes: bool,
    json: bool,
    out: &mut dyn Write,
) -> CmdResult {
    let e = enumerate_with(cap, &options(search))?;
    let mut text = format!(
        "cap {}: {} embeddings ({} search nodes)\n",
        one_line(cap),
        e.embeddings.len(),
        e.nodes
    );
    let mut records = Vec::new();
    for (i, emb) in e.embeddings.iter().enumerate() {
        let chi = complement_euler(cap, emb)?;
        let b2 = complement_betti2(cap, emb)?;
        let mult = multiplicity_total(cap, emb)?;
        let report = check_structure(cap, emb);
        text += &format!(
            "embedding {}: N = {}, chi = {chi}, b2 = {b2}, multiplicity = {mult}, {}\n",
            i + 1,
            emb.n_exceptional(),
            report.summary()
        );
        if classes {
            for (v, c) in emb.classes() {
                text += &format!("  {v}: {c}\n");
            }
        }
        let cls: Vec<Value> = emb
            .classes()
            .iter()
            .map(|(v, c)| json!({"vertex": v.to_string(), "class": c.to_string()}))
            .collect();
        records.push(json!({
            "n": emb.n_exceptional(),
            "chi": chi,
            "b2": b2,
            "multiplicity": mult.to_string(),
            "lemmas": report.summary(),
            "lemmas_ok": report.all_passed(),
            "classes": cls,
        }));
    }
    emit(
        out,
        json,
        json!({"cap": cap, "nodes": e.nodes, "embeddings": records}),
        &text,
    )?;
    Ok(exit::OK)
}

fn chain_report(chain: &LinearChain, runs: Option<&[u64]>) -> (Value, String) {
    let params = park_parameters(chain);
    let value = json!({
        "runs": runs,
        "weights": chain.weights(),
        "negative_definite": chain.is_negative_definite(),
        "park": params.map(|(p, q)| json!({"p": p, "q": q})),
    });
    let mut text = String::new();
    if let Some(r) = runs {
        text += &format!("runs {r:?}\n");
    }
    text += &format!(
        "{chain}\nnegative definite: {}\n",
        chain.is_negative_definite()
    );
    text += &match params {
        Some((p, q)) => format!(
            "Park chain p = {p}, q = {q}: fraction {}/{}\n",
            p * p,
            p * q - 1
        ),
        None => "not a Park chain\n".to_string(),
    };
    (value, text)
}

fn park_cmd(
    sides: &Option<String>,
    p: Option<i64>,
    q: Option<i64>,
    chain: &Option<String>,
    json: bool,
    out: &mut dyn Write,
) -> CmdResult {
    let mut runs = None;
    let chain = match (sides, p, q, chain) {
        (Some(s), None, None, None) => {
            let sides =
                parse_sides(s).map_err(|e| Failure::usage(format!("--sides: {}", e.message)))?;
            runs = ParkDescriptor::from_sides(&sides).map(|d| d.runs().to_vec());
            park_chain_recursive(&sides)
        }
        (None, Some(p), Some(q), None) => park_chain_fraction(p, q)?,
        (None, None, None, Some(c)) => {
            let ws = c
                .split(',')
                .map(|w| {
                    w.trim()
                        .parse::<i64>()
                        .map_err(|e| Failure::usage(format!("--chain: bad weight {w:?}: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            LinearChain::new(ws)?
        }
        _ => return Err(Failure::usage("give one of --sides, --p/--q or --chain")),
    };
    let (value, text) = chain_report(&chain, runs.as_deref());
    emit(out, json, value, &text)?;
    Ok(if park_parameters(&chain).is_some() {
        exit::OK
    } else {
        exit::NEGATIVE
    })
}
