use std::path::Path;
use std::process::Command;

use starsurg_cli::{exit, run};
use starsurg_core::mcg::{f_factorization, g_factorization, Factorization};
use starsurg_core::plumbing::{make_dgamma, make_p, parse_graph};

fn starsurg(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("starsurg").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn obstruct_exit_codes() {
    let (code, out, _) = starsurg(&["obstruct", "--a", "2", "--b", "3"]);
    assert_eq!(code, exit::OK);
    assert!(out.contains("RuledOut"));
    let (code, out, _) = starsurg(&["obstruct", "--a", "5", "--b", "3"]);
    assert_eq!(code, exit::NEGATIVE);
    assert!(out.contains("Inconclusive"));
    let (code, out, _) = starsurg(&["--json", "obstruct", "--a", "3", "--b", "3"]);
    assert_eq!(code, exit::OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["outcome"], "RuledOut");
}

#[test]
fn named_relations() {
    for args in [
        &["verify-relation", "--name", "lantern"][..],
        &["verify-relation", "--name", "daisy", "--p", "4"],
        &["verify-relation", "--name", "glantern", "--k", "5"],
        &["verify-relation", "--name", "fg", "--m", "2", "--n", "3"],
    ] {
        let (code, out, err) = starsurg(args);
        assert_eq!(code, exit::OK, "{args:?}: {err}");
        assert!(out.contains(": equal"), "{out}");
    }
}

#[test]
fn relation_from_files_and_inequality() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "f.txt",
        &f_factorization(1, 2).unwrap().to_string(),
    );
    let g = write(
        dir.path(),
        "g.txt",
        &g_factorization(1, 2).unwrap().to_string(),
    );
    let (code, _, err) = starsurg(&["verify-relation", &f, &g]);
    assert_eq!(code, exit::OK, "{err}");
    let h = write(dir.path(), "h.txt", "holes 4\ntwist 1,2\n");
    let (code, out, _) = starsurg(&["verify-relation", &f, &h]);
    assert_ne!(code, exit::OK);
    assert!(!out.contains(": equal"));
}

#[test]
fn usage_errors() {
    assert_eq!(starsurg(&[]).0, exit::USAGE);
    assert_eq!(starsurg(&["frobnicate"]).0, exit::USAGE);
    assert_eq!(starsurg(&["obstruct", "--a", "2"]).0, exit::USAGE);
    assert_eq!(starsurg(&["park"]).0, exit::USAGE);
    assert_eq!(starsurg(&["census", "--a-range", "5..2"]).0, exit::USAGE);
    assert_eq!(starsurg(&["census", "--family", "Q"]).0, exit::USAGE);
    let (code, out, _) = starsurg(&["--help"]);
    assert_eq!(code, exit::OK);
    assert!(out.contains("census"));
}

#[test]
fn parse_errors_name_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "bad.graph", "center -3\narm -2\narm -2 oops\n");
    let (code, _, err) = starsurg(&["dualize", &g]);
    assert_eq!(code, exit::USAGE);
    assert!(err.contains("bad.graph:3:"), "{err}");
    let f = write(dir.path(), "bad.fact", "holes 3\n# comment\ntwist 1,9\n");
    let (code, _, err) = starsurg(&["invariants", &f]);
    assert_eq!(code, exit::USAGE);
    assert!(err.contains("bad.fact:3:"), "{err}");
    let (code, _, err) = starsurg(&["dualize", "/nonexistent/graph"]);
    assert_eq!(code, exit::USAGE);
    assert!(err.contains("/nonexistent/graph"));
}

#[test]
fn dualize_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for (a, b) in [(2, 2), (3, 4)] {
        let p = write(dir.path(), "p.graph", &make_p(a, b).unwrap().to_string());
        let (code, out, _) = starsurg(&["dualize", &p]);
        assert_eq!(code, exit::OK);
        let cap = parse_graph(&out).unwrap();
        assert_eq!(cap.to_string(), out);
        assert!(cap.is_isomorphic(&make_dgamma(a, b).unwrap()));
    }
}

#[test]
fn factorization_files_round_trip() {
    for (m, n) in [(1, 1), (2, 3)] {
        for f in [
            f_factorization(m, n).unwrap(),
            g_factorization(m, n).unwrap(),
        ] {
            let text = f.to_string();
            let back: Factorization = text.parse().unwrap();
            assert_eq!(back, f);
            assert_eq!(back.to_string(), text);
        }
    }
}

#[test]
fn enumerate_and_euler() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.graph", &make_p(2, 2).unwrap().to_string());
    let (code, out, _) = starsurg(&["enumerate-embeddings", &p]);
    assert_eq!(code, exit::OK);
    assert!(out.contains("2 embeddings"), "{out}");
    assert!(out.contains("N = 10, chi = 6"));
    assert!(out.contains("N = 6, chi = 2"));
    let (code, out, _) = starsurg(&["--json", "euler", "--a", "2", "--b", "3"]);
    assert_eq!(code, exit::OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["filling_euler"], 9);
    assert_eq!(v["complement_euler"], serde_json::json!([9, 3]));
}

#[test]
fn exhausted_node_budget_is_a_resource_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.graph", &make_p(2, 2).unwrap().to_string());
    let (code, _, err) = starsurg(&["enumerate-embeddings", "--node-budget", "5", &p]);
    assert_eq!(code, exit::RESOURCE);
    assert!(err.contains("exhausted budget"), "{err}");
}

#[test]
fn park_modes() {
    let (code, out, _) = starsurg(&["park", "--sides", "LR"]);
    assert_eq!(code, exit::OK);
    assert!(out.contains("chain -2 -5 -3"));
    let (code, out, _) = starsurg(&["park", "--p", "5", "--q", "3"]);
    assert_eq!(code, exit::OK);
    assert!(out.contains("chain -2 -5 -3"));
    assert_eq!(starsurg(&["park", "--chain", "-5,-2"]).0, exit::OK);
    assert_eq!(starsurg(&["park", "--chain", "-2,-3"]).0, exit::NEGATIVE);
}

#[test]
fn substitution_search_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "f.txt",
        &f_factorization(1, 1).unwrap().to_string(),
    );
    let g = write(
        dir.path(),
        "g.txt",
        &g_factorization(1, 1).unwrap().to_string(),
    );
    let (code, out, err) = starsurg(&["--json", "subst-search", "--rules", "lantern", &f, &g]);
    assert_eq!(code, exit::OK, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["result"], "reached");
    assert_eq!(v["path"].as_array().unwrap().len(), 1);

    let f = write(
        dir.path(),
        "f22.txt",
        &f_factorization(2, 2).unwrap().to_string(),
    );
    let g = write(
        dir.path(),
        "g22.txt",
        &g_factorization(2, 2).unwrap().to_string(),
    );
    let (code, out, _) = starsurg(&["subst-search", &f, &g]);
    assert_eq!(code, exit::NEGATIVE);
    assert!(out.contains("not a proof"));

    let (code, out, _) = starsurg(&["--json", "proof-replay", "--m", "2", "--n", "1"]);
    assert_eq!(code, exit::OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(!v["steps"].as_array().unwrap().is_empty());
}

#[test]
fn invariants_of_g() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(
        dir.path(),
        "g.txt",
        &g_factorization(2, 3).unwrap().to_string(),
    );
    let (code, out, _) = starsurg(&["--json", "invariants", &g]);
    assert_eq!(code, exit::OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["b1"], 0);
    assert_eq!(v["torsion"], serde_json::json!(["5"]));
}

#[test]
fn census_appends_only_new_records() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("census.ndjson");
    let out_str = out_path.to_str().unwrap();
    let args = [
        "census",
        "--a-range",
        "2..3",
        "--b-range",
        "2..3",
        "--out",
        out_str,
    ];
    let (code, msg, _) = starsurg(&args);
    assert_eq!(code, exit::OK);
    assert!(msg.contains("4 appended"), "{msg}");
    let first = std::fs::read(&out_path).unwrap();
    let (_, msg, _) = starsurg(&args);
    assert!(msg.contains("0 appended"), "{msg}");
    assert_eq!(std::fs::read(&out_path).unwrap(), first);

    let text = String::from_utf8(first).unwrap();
    let recs: Vec<serde_json::Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let cells: Vec<(i64, i64)> = recs
        .iter()
        .map(|r| (r["a"].as_i64().unwrap(), r["b"].as_i64().unwrap()))
        .collect();
    assert_eq!(cells, [(2, 2), (2, 3), (3, 2), (3, 3)]);
    for r in &recs {
        assert_eq!(r["version"], starsurg_cli::VERSION);
        assert_eq!(r["error"], serde_json::Value::Null);
        assert_eq!(r["embedding_count"], 2);
        assert!(r.get("millis").is_none());
    }
    assert_eq!(recs[3]["verdict"], "RuledOut");
}

#[test]
fn census_flags_failed_cells_and_continues() {
    let (code, out, _) = starsurg(&[
        "census",
        "--a-range",
        "2",
        "--b-range",
        "2..3",
        "--node-budget",
        "5",
    ]);
    assert_eq!(code, exit::OK);
    let recs: Vec<serde_json::Value> = out
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(recs.len(), 2);
    for r in &recs {
        assert!(r["error"].as_str().unwrap().contains("exhausted budget"));
        assert!(r["verdict"].is_string());
        assert!(r["g_invariants"].is_object());
    }
}

#[test]
fn binary_reads_budget_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.graph", &make_p(2, 2).unwrap().to_string());
    let bin = env!("CARGO_BIN_EXE_starsurg");
    let status = Command::new(bin)
        .args(["enumerate-embeddings", &p])
        .env("STARSURG_NODE_BUDGET", "5")
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(exit::RESOURCE));
    let ok = Command::new(bin)
        .args(["obstruct", "--a", "2", "--b", "2"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(exit::OK));
}
