//! Post-hoc audit of the structural facts every cap embedding satisfies.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::One;
use serde::Serialize;

use super::CapEmbedding;
use crate::homlattice::ExcLabel;
use crate::plumbing::{StarPlumbing, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Lemma {
    /// Depth-1 classes are `h - Σe`, deeper ones `e_p - Σe`.
    Homform,
    /// Two depth-1 classes share exactly one `-1` label.
    Mixing,
    /// The `+1` label at depth 2 is a `-1` label at depth 1, and the only shared one.
    First,
    /// Neighbours at depth `>= 2` hand a `+1` label to each other in at least one direction.
    Consecutive,
    /// No label carries `+1` in two classes.
    Pos,
    /// Non-adjacent classes sharing a label do so through a `+1` label.
    Share2,
}

impl Lemma {
    pub const ALL: [Lemma; 6] = [
        Lemma::Homform,
        Lemma::Mixing,
        Lemma::First,
        Lemma::Consecutive,
        Lemma::Pos,
        Lemma::Share2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::Homform => "homform",
            Lemma::Mixing => "mixing",
            Lemma::First => "first",
            Lemma::Consecutive => "consecutive",
            Lemma::Pos => "pos",
            Lemma::Share2 => "share2",
        }
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaCheck {
    pub lemma: Lemma,
    /// False when the cap has no configuration the lemma talks about.
    pub applicable: bool,
    pub passed: bool,
    pub witnesses: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub checks: Vec<LemmaCheck>,
}

impl StructureReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, lemma: Lemma) -> &LemmaCheck {
        self.checks
            .iter()
            .find(|c| c.lemma == lemma)
            .expect("every lemma is checked")
    }

    pub fn failed(&self) -> impl Iterator<Item = &LemmaCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// One-line summary such as `mixing:pass first:n/a pos:FAIL`.
    pub fn summary(&self) -> String {
        self.checks
            .iter()
            .map(|c| {
                let state = match (c.applicable, c.passed) {
                    (false, _) => "n/a",
                    (true, true) => "pass",
                    (true, false) => "FAIL",
                };
                format!("{}:{}", c.lemma, state)
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// `+1` and `-1` parts of a class, as far as they exist.
struct Parts {
    plus: BTreeSet<ExcLabel>,
    minus: BTreeSet<ExcLabel>,
}

impl Parts {
    fn support(&self) -> BTreeSet<&ExcLabel> {
        self.plus.iter().chain(&self.minus).collect()
    }

    fn single_plus(&self) -> Option<&ExcLabel> {
        (self.plus.len() == 1).then(|| self.plus.iter().next().unwrap())
    }
}

fn show(labels: impl IntoIterator<Item = impl fmt::Display>) -> String {
    labels
        .into_iter()
        .map(|l| l.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Evaluates each structural lemma on `emb`. Works on any assignment; an
/// assignment that is not an embedding simply fails some checks.
pub fn check_structure(cap: &StarPlumbing, emb: &CapEmbedding) -> StructureReport {
    let mut parts: BTreeMap<Vertex, Parts> = BTreeMap::new();
    let mut homform = Vec::new();
    for v in cap.vertices().into_iter().filter(|v| !v.is_center()) {
        let Some(c) = emb.class_of(v) else {
            homform.push(format!("{v} has no class"));
            continue;
        };
        let mut p = Parts {
            plus: BTreeSet::new(),
            minus: BTreeSet::new(),
        };
        let mut odd = Vec::new();
        for (l, x) in c.exceptional_terms() {
            if x.is_one() {
                p.plus.insert(l.clone());
            } else if (-x).is_one() {
                p.minus.insert(l.clone());
            } else {
                odd.push(format!("{x}{l}"));
            }
        }
        let expected_h = if v.depth == 1 { 1 } else { 0 };
        let expected_plus = if v.depth == 1 { 0 } else { 1 };
        if *c.h() != expected_h.into() || p.plus.len() != expected_plus || !odd.is_empty() {
            homform.push(format!("{v} has class {c}"));
        }
        parts.insert(v, p);
    }

    let depth1: Vec<Vertex> = parts.keys().copied().filter(|v| v.depth == 1).collect();
    let mut mixing = Vec::new();
    for (i, u) in depth1.iter().enumerate() {
        for v in &depth1[i + 1..] {
            let shared: Vec<_> = parts[u].minus.intersection(&parts[v].minus).collect();
            if shared.len() != 1 {
                mixing.push(format!("{u} and {v} share [{}]", show(shared)));
            }
        }
    }

    let mut first = Vec::new();
    let mut first_applicable = false;
    let mut consecutive = Vec::new();
    let mut consecutive_applicable = false;
    for (j0, arm) in cap.arms().iter().enumerate() {
        let at = |d: usize| parts.get(&Vertex::new(j0 + 1, d));
        if arm.len() >= 2 {
            first_applicable = true;
            if let (Some(c1), Some(c2)) = (at(1), at(2)) {
                let shared = c1.support().intersection(&c2.support()).count();
                match c2.single_plus() {
                    Some(p) if c1.minus.contains(p) && shared == 1 => {}
                    _ => first.push(format!(
                        "arm {}: depth 1 and 2 share [{}]",
                        j0 + 1,
                        show(c1.support().intersection(&c2.support()))
                    )),
                }
            }
        }
        for d in 2..arm.len() {
            consecutive_applicable = true;
            let (Some(ci), Some(cn)) = (at(d), at(d + 1)) else {
                continue;
            };
            let (Some(pi), Some(pn)) = (ci.single_plus(), cn.single_plus()) else {
                consecutive.push(format!("arm {} depth {d}: missing +1 label", j0 + 1));
                continue;
            };
            let forward = cn.minus.contains(pi);
            let backward = ci.minus.contains(pn);
            let shared_minus = ci.minus.intersection(&cn.minus).count();
            let expected = if forward && backward { 1 } else { 0 };
            if !(forward || backward) || pi == pn || shared_minus != expected {
                consecutive.push(format!(
                    "arm {} depths {d},{}: forward={forward} backward={backward} shared -1 labels={shared_minus}",
                    j0 + 1,
                    d + 1
                ));
            }
        }
    }

    let mut pos = Vec::new();
    let mut owner: BTreeMap<&ExcLabel, Vertex> = BTreeMap::new();
    for (v, p) in &parts {
        for l in &p.plus {
            if let Some(u) = owner.insert(l, *v) {
                pos.push(format!("{l} is +1 in {u} and {v}"));
            }
        }
    }

    let mut share2 = Vec::new();
    let mut share2_applicable = false;
    let verts: Vec<Vertex> = parts.keys().copied().collect();
    for (i, u) in verts.iter().enumerate() {
        for v in &verts[i + 1..] {
            let neighbours = u.arm == v.arm && u.depth.abs_diff(v.depth) == 1;
            if neighbours || (u.depth == 1 && v.depth == 1) {
                continue;
            }
            share2_applicable = true;
            let (pu, pv) = (&parts[u], &parts[v]);
            if pu.support().is_disjoint(&pv.support()) {
                continue;
            }
            let one = pu.single_plus().is_some_and(|p| pv.minus.contains(p));
            let two = pv.single_plus().is_some_and(|p| pu.minus.contains(p));
            let shared_minus = pu.minus.intersection(&pv.minus).count();
            let ok = match (one, two) {
                (true, true) => shared_minus == 2,
                (true, false) | (false, true) => shared_minus == 1,
                (false, false) => false,
            };
            if !ok {
                share2.push(format!(
                    "{u} and {v}: (1)={one} (2)={two} shared -1 labels={shared_minus}"
                ));
            }
        }
    }

    let any_arm = !parts.is_empty();
    let check = |lemma, applicable, witnesses: Vec<String>| LemmaCheck {
        lemma,
        applicable,
        passed: witnesses.is_empty(),
        witnesses,
    };
    let any_deeper = parts.keys().any(|v| v.depth > 1);
    StructureReport {
        checks: vec![
            check(Lemma::Homform, any_arm, homform),
            check(Lemma::Mixing, depth1.len() >= 2, mixing),
            check(Lemma::First, first_applicable, first),
            check(Lemma::Consecutive, consecutive_applicable, consecutive),
            check(Lemma::Pos, any_deeper, pos),
            check(Lemma::Share2, share2_applicable, share2),
        ],
    }
}
