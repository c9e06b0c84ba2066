//! Grid runs over the `P_(a,b)` family, written as newline-delimited JSON.

use std::collections::HashSet;
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::ops::RangeInclusive;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use starsurg_core::dualize::dual_cap;
use starsurg_core::embedder::{
    check_structure, complement_betti2, complement_euler, enumerate_with, multiplicity_total,
    EnumerateOptions,
};
use starsurg_core::lefschetz::{homology, FillingInvariants};
use starsurg_core::mcg::{f_factorization, g_factorization};
use starsurg_core::obstruction::single_blowdown_verdict;
use starsurg_core::plumbing::make_p;

use crate::{Failure, VERSION};

#[derive(Clone, Debug)]
pub struct CensusOptions {
    pub family: String,
    pub a_range: RangeInclusive<i64>,
    pub b_range: RangeInclusive<i64>,
    /// Worker threads; 0 lets rayon decide.
    pub jobs: usize,
    pub timing: bool,
    pub enumerate: EnumerateOptions,
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingSummary {
    pub n: usize,
    pub chi: i64,
    pub b2: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusRecord {
    pub version: &'static str,
    pub family: String,
    pub a: i64,
    pub b: i64,
    /// SHA-256 of the filling graph's DSL text.
    pub graph_hash: String,
    pub filling_euler: i64,
    pub embedding_count: Option<usize>,
    pub embeddings: Vec<EmbeddingSummary>,
    pub lemmas_ok: Option<bool>,
    pub multiplicity: Option<String>,
    pub f_invariants: Option<FillingInvariants>,
    pub g_invariants: Option<FillingInvariants>,
    pub verdict: Option<String>,
    /// Set when some stage failed; the other fields hold what was computed.
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u128>,
}

/// `a..b` and `a..=b` are both inclusive; a single number is a one-point range.
pub fn parse_range(s: &str) -> Result<RangeInclusive<i64>, Failure> {
    let bad = || Failure::usage(format!("bad range {s:?}, expected like 2..5"));
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (lo, hi.strip_prefix('=').unwrap_or(hi)),
        None => (s, s),
    };
    let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn record(a: i64, b: i64, opts: &CensusOptions) -> Result<CensusRecord, Failure> {
    let started = Instant::now();
    let p = make_p(a, b)?;
    let mut rec = CensusRecord {
        version: VERSION,
        family: "P".into(),
        a,
        b,
        graph_hash: sha256_hex(p.to_string().as_bytes()),
        filling_euler: p.euler_characteristic(),
        embedding_count: None,
        embeddings: Vec::new(),
        lemmas_ok: None,
        multiplicity: None,
        f_invariants: None,
        g_invariants: None,
        verdict: None,
        error: None,
        millis: None,
    };
    let mut errors = Vec::new();
    let embedding_stage = || -> starsurg_core::Result<_> {
        let cap = dual_cap(&p)?;
        let found = enumerate_with(&cap, &opts.enumerate)?.embeddings;
        let mut rows = Vec::new();
        let mut ok = true;
        let mut mult = None;
        for e in &found {
            rows.push(EmbeddingSummary {
                n: e.n_exceptional(),
                chi: complement_euler(&cap, e)?,
                b2: complement_betti2(&cap, e)?,
            });
            ok &= check_structure(&cap, e).all_passed();
            let m = multiplicity_total(&cap, e)?.to_string();
            match &mult {
                None => mult = Some(m),
                Some(prev) if *prev != m => mult = Some("varies".into()),
                _ => {}
            }
        }
        Ok((rows, ok, mult))
    };
    match embedding_stage() {
        Ok((rows, ok, mult)) => {
            rec.embedding_count = Some(rows.len());
            rec.embeddings = rows;
            rec.lemmas_ok = Some(ok);
            rec.multiplicity = mult;
        }
        Err(e) => errors.push(format!("embeddings: {e}")),
    }
    if a >= 1 && b >= 1 {
        let (m, n) = (a as usize, b as usize);
        match f_factorization(m, n).and_then(|f| homology(&f)) {
            Ok(inv) => rec.f_invariants = Some(inv),
            Err(e) => errors.push(format!("F invariants: {e}")),
        }
        match g_factorization(m, n).and_then(|g| homology(&g)) {
            Ok(inv) => rec.g_invariants = Some(inv),
            Err(e) => errors.push(format!("G invariants: {e}")),
        }
    }
    match single_blowdown_verdict(a, b) {
        Ok(v) => rec.verdict = Some(v.outcome.to_string()),
        Err(e) => errors.push(format!("verdict: {e}")),
    }
    if !errors.is_empty() {
        rec.error = Some(errors.join("; "));
    }
    if opts.timing {
        rec.millis = Some(started.elapsed().as_millis());
    }
    Ok(rec)
}

/// One JSON line per cell, ordered by `(a, b)` whatever the worker count.
pub fn run(opts: &CensusOptions) -> Result<Vec<String>, Failure> {
    if !opts.family.eq_ignore_ascii_case("P") {
        return Err(Failure::usage(format!(
            "unknown family {:?}; only P is supported",
            opts.family
        )));
    }
    let cells: Vec<(i64, i64)> = opts
        .a_range
        .clone()
        .flat_map(|a| opts.b_range.clone().map(move |b| (a, b)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Failure::usage(format!("thread pool: {e}")))?;
    let records: Vec<Result<CensusRecord, Failure>> =
        pool.install(|| cells.par_iter().map(|&(a, b)| record(a, b, opts)).collect());
    records
        .into_iter()
        .map(|r| r.map(|r| serde_json::to_string(&r).expect("record serializes")))
        .collect()
}

/// Appends the lines not already present in `path`; returns how many were added.
pub fn append_new(path: &Path, lines: &[String]) -> Result<usize, Failure> {
    let mut seen = HashSet::new();
    if path.exists() {
        let file = std::fs::File::open(path)?;
        for line in BufReader::new(file).lines() {
            seen.insert(sha256_hex(line?.as_bytes()));
        }
    }
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut added = 0;
    for l in lines {
        if seen.insert(sha256_hex(l.as_bytes())) {
            writeln!(file, "{l}")?;
            added += 1;
        }
    }
    Ok(added)
}
