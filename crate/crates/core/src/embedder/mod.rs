//! Homological embeddings of cap plumbings into blown-up projective planes.

mod canonical;
mod search;
mod structure;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::homlattice::{adjunction_defect, pairing, ExcLabel, LatticeClass};
use crate::plumbing::{Side, StarPlumbing, Vertex};

use canonical::{Compact, Key, Layout, Row};

pub use structure::{check_structure, Lemma, LemmaCheck, StructureReport};

/// Assignment of a lattice class to every vertex of a cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapEmbedding {
    classes: Vec<(Vertex, LatticeClass)>,
}

impl CapEmbedding {
    pub fn new(classes: Vec<(Vertex, LatticeClass)>) -> Self {
        CapEmbedding { classes }
    }

    pub fn classes(&self) -> &[(Vertex, LatticeClass)] {
        &self.classes
    }

    pub fn class_of(&self, v: Vertex) -> Option<&LatticeClass> {
        self.classes.iter().find(|(u, _)| *u == v).map(|(_, c)| c)
    }

    /// Distinct labels with a nonzero coefficient somewhere.
    pub fn labels(&self) -> BTreeSet<ExcLabel> {
        self.classes
            .iter()
            .flat_map(|(_, c)| c.support().cloned())
            .collect()
    }

    /// `N`, the number of distinct exceptional classes used.
    pub fn n_exceptional(&self) -> usize {
        self.labels().len()
    }

    pub fn relabel(&self, f: impl Fn(&ExcLabel) -> ExcLabel) -> CapEmbedding {
        CapEmbedding {
            classes: self
                .classes
                .iter()
                .map(|(v, c)| (*v, c.relabel(&f)))
                .collect(),
        }
    }

    pub fn remap_vertices(&self, f: impl Fn(Vertex) -> Vertex) -> CapEmbedding {
        CapEmbedding {
            classes: self
                .classes
                .iter()
                .map(|(v, c)| (f(*v), c.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for CapEmbedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, c) in &self.classes {
            writeln!(f, "{v}: {c}")?;
        }
        Ok(())
    }
}

/// Explains why `emb` is not an embedding of `cap`, if it is not.
pub fn validate(cap: &StarPlumbing, emb: &CapEmbedding) -> std::result::Result<(), String> {
    if cap.side() != Side::Cap {
        return Err("graph is not a cap".into());
    }
    let verts = cap.vertices();
    if emb.classes.len() != verts.len() {
        return Err(format!(
            "{} classes for {} vertices",
            emb.classes.len(),
            verts.len()
        ));
    }
    let mut classes = Vec::with_capacity(verts.len());
    for &v in &verts {
        classes.push(emb.class_of(v).ok_or_else(|| format!("{v} has no class"))?);
    }
    if *classes[0] != LatticeClass::line() {
        return Err(format!("center has class {}, expected h", classes[0]));
    }
    for (&v, c) in verts.iter().zip(&classes).skip(1) {
        let want_h = if v.depth == 1 {
            BigInt::one()
        } else {
            BigInt::zero()
        };
        if *c.h() != want_h {
            return Err(format!("{v} has h-coefficient {}", c.h()));
        }
        let plus = c
            .exceptional_terms()
            .filter(|(_, x)| x.is_positive())
            .count();
        let want_plus = usize::from(v.depth > 1);
        let shaped = plus == want_plus && c.exceptional_terms().all(|(_, x)| x.abs().is_one());
        if !shaped {
            return Err(format!("{v} has class {c}, not of the required shape"));
        }
        if !adjunction_defect(c).is_zero() {
            return Err(format!("{v} has nonzero adjunction defect"));
        }
    }
    let q = cap.intersection_matrix();
    for i in 0..verts.len() {
        for j in i..verts.len() {
            let got = pairing(classes[i], classes[j]);
            if got != BigInt::from(q[i][j]) {
                return Err(format!(
                    "{}·{} = {got}, expected {}",
                    verts[i], verts[j], q[i][j]
                ));
            }
        }
    }
    Ok(())
}

pub fn is_valid_embedding(cap: &StarPlumbing, emb: &CapEmbedding) -> bool {
    validate(cap, emb).is_ok()
}

fn require_valid(cap: &StarPlumbing, emb: &CapEmbedding) -> Result<()> {
    validate(cap, emb).map_err(Error::InvalidEmbedding)
}

/// Euler characteristic of the complement, `2 + N - |cap|`.
pub fn complement_euler(cap: &StarPlumbing, emb: &CapEmbedding) -> Result<i64> {
    require_valid(cap, emb)?;
    Ok(2 + emb.n_exceptional() as i64 - cap.vertex_count() as i64)
}

/// Second Betti number of the complement, which has `b_1 = b_3 = 0`.
pub fn complement_betti2(cap: &StarPlumbing, emb: &CapEmbedding) -> Result<i64> {
    Ok(complement_euler(cap, emb)? - 1)
}

/// Sum of `|coefficient|` over all exceptional terms of all classes.
pub fn multiplicity_total(cap: &StarPlumbing, emb: &CapEmbedding) -> Result<BigInt> {
    require_valid(cap, emb)?;
    Ok(emb
        .classes
        .iter()
        .flat_map(|(_, c)| c.exceptional_terms().map(|(_, x)| x.abs()))
        .sum())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SearchMode {
    /// Prunes only by the pairing constraints.
    #[default]
    Audit,
    /// Also refuses a `+1` label already used with `+1`.
    Fast,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerateOptions {
    pub mode: SearchMode,
    /// Maximum number of search nodes before giving up with `Error::SearchBudget`.
    pub node_budget: u64,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            mode: SearchMode::Audit,
            node_budget: 50_000_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    pub embeddings: Vec<CapEmbedding>,
    pub nodes: u64,
    /// Solutions found before quotienting by swaps of identical arms.
    pub raw_solutions: usize,
}

/// All embeddings of `cap` up to relabeling (and swapping identical arms), in
/// canonical labeling `e1, e2, …`, sorted by decreasing `N`.
pub fn enumerate(cap: &StarPlumbing) -> Result<Vec<CapEmbedding>> {
    Ok(enumerate_with(cap, &EnumerateOptions::default())?.embeddings)
}

pub fn enumerate_with(cap: &StarPlumbing, opts: &EnumerateOptions) -> Result<Enumeration> {
    if cap.side() != Side::Cap {
        return Err(Error::WrongSide { expected: "cap" });
    }
    let layout = Layout::new(cap);
    let outcome = search::search(cap, opts.mode == SearchMode::Fast, opts.node_budget)?;
    let raw_solutions = outcome.solutions.len();

    // Keys iterate in increasing order, so the first member of each class is
    // its least key.
    let mut reps: Vec<(Key, Compact, _)> = Vec::new();
    for (key, compact) in outcome.solutions {
        let profile = compact.profile(&layout);
        let known = reps
            .iter()
            .any(|(_, c, p)| *p == profile && canonical::equivalent(&layout, c, &compact));
        if !known {
            reps.push((key, compact, profile));
        }
    }
    reps.sort_by(|(ka, ..), (kb, ..)| kb.len().cmp(&ka.len()).then_with(|| ka.cmp(kb)));
    let embeddings = reps
        .iter()
        .map(|(key, ..)| from_compact(cap, &Compact::from_key(key)))
        .collect();
    Ok(Enumeration {
        embeddings,
        nodes: outcome.nodes,
        raw_solutions,
    })
}

/// Whether two embeddings of `cap` agree up to relabeling and swapping identical arms.
pub fn equivalent_embeddings(
    cap: &StarPlumbing,
    a: &CapEmbedding,
    b: &CapEmbedding,
) -> Result<bool> {
    require_valid(cap, a)?;
    require_valid(cap, b)?;
    let layout = Layout::new(cap);
    Ok(canonical::equivalent(
        &layout,
        &to_compact(cap, a),
        &to_compact(cap, b),
    ))
}

fn from_compact(cap: &StarPlumbing, c: &Compact) -> CapEmbedding {
    let mut classes = vec![(Vertex::CENTER, LatticeClass::line())];
    let label = |l: u32| ExcLabel::Index(l as u64 + 1);
    for (v, row) in cap.vertices().into_iter().skip(1).zip(&c.rows) {
        let mut class = match row.plus {
            Some(p) => LatticeClass::exceptional(label(p)),
            None => LatticeClass::line(),
        };
        for &m in &row.minus {
            class.add_exc(label(m), -BigInt::one());
        }
        classes.push((v, class));
    }
    CapEmbedding::new(classes)
}

/// Requires a valid embedding.
fn to_compact(cap: &StarPlumbing, emb: &CapEmbedding) -> Compact {
    let labels: Vec<ExcLabel> = emb.labels().into_iter().collect();
    let index = |l: &ExcLabel| labels.binary_search(l).expect("label listed") as u32;
    let rows = cap
        .vertices()
        .into_iter()
        .skip(1)
        .map(|v| {
            let c = emb.class_of(v).expect("valid embedding");
            let mut row = Row {
                plus: None,
                minus: Vec::new(),
            };
            for (l, x) in c.exceptional_terms() {
                if x.is_positive() {
                    row.plus = Some(index(l));
                } else {
                    row.minus.push(index(l));
                }
            }
            row
        })
        .collect();
    Compact {
        n_labels: labels.len() as u32,
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dualize::{canonical_embedding, dual_cap};
    use crate::plumbing::{make_dgamma, make_p};

    fn cls(s: &str) -> LatticeClass {
        s.parse().unwrap()
    }

    /// The embedding of `DΓ_{a,b}` from a line arrangement, built by hand.
    fn line_arrangement(a: u64, b: u64) -> CapEmbedding {
        let mut classes = vec![(Vertex::CENTER, cls("h"))];
        let g = |i: u64, j: u64| ExcLabel::Pair(i, j);
        // rows i and columns j of an a×b grid meet in e(i,j)
        for i in 1..=a {
            let mut c = LatticeClass::line();
            c.add_exc(ExcLabel::Index(0), -BigInt::one());
            for j in 1..=b {
                c.add_exc(g(i, j), -BigInt::one());
            }
            classes.push((Vertex::new(i as usize, 1), c));
        }
        let mut c = LatticeClass::line();
        c.add_exc(ExcLabel::Index(0), -BigInt::one());
        c.add_exc(ExcLabel::Index(1), -BigInt::one());
        classes.push((Vertex::new(a as usize + 1, 1), c));
        for j in 1..=b {
            let mut c = LatticeClass::line();
            c.add_exc(ExcLabel::Index(1), -BigInt::one());
            for i in 1..=a {
                c.add_exc(g(i, j), -BigInt::one());
            }
            classes.push((Vertex::new(a as usize + 1 + j as usize, 1), c));
        }
        CapEmbedding::new(classes)
    }

    #[test]
    fn validator_examples() {
        let g = make_p(2, 2).unwrap();
        let cap = make_dgamma(2, 2).unwrap();
        let emb = canonical_embedding(&g).unwrap();
        // dual_cap puts the (-1) leaf last; move it to the middle
        let k = cap.arm_count();
        let moved = emb.remap_vertices(|v| match v.arm {
            0 => v,
            a if a == k => Vertex::new(3, v.depth),
            a if a >= 3 => Vertex::new(a + 1, v.depth),
            _ => v,
        });
        assert!(
            validate(&cap, &moved).is_ok(),
            "{:?}",
            validate(&cap, &moved)
        );
        let swapped = moved.relabel(|l| match l {
            ExcLabel::Index(1) => ExcLabel::Pair(1, 1),
            ExcLabel::Pair(1, 1) => ExcLabel::Index(1),
            other => other.clone(),
        });
        assert!(is_valid_embedding(&cap, &swapped));
        let mut classes = moved.classes().to_vec();
        let first = classes[1].1.support().next().unwrap().clone();
        classes[1].1.add_exc(first, BigInt::from(2));
        let broken = CapEmbedding::new(classes);
        assert!(!is_valid_embedding(&cap, &broken));
        assert!(!is_valid_embedding(&g, &emb));
    }

    #[test]
    fn line_arrangement_is_an_embedding() {
        for (a, b) in [(2, 2), (2, 3), (3, 4)] {
            let cap = make_dgamma(a as i64, b as i64).unwrap();
            let emb = line_arrangement(a, b);
            assert!(validate(&cap, &emb).is_ok(), "{:?}", validate(&cap, &emb));
            assert_eq!(emb.n_exceptional() as u64, a * b + 2);
            assert_eq!(
                complement_euler(&cap, &emb).unwrap(),
                (a * b) as i64 - a as i64 - b as i64 + 2
            );
        }
    }

    #[test]
    fn two_embeddings_of_dgamma_22() {
        let cap = make_dgamma(2, 2).unwrap();
        let embs = enumerate(&cap).unwrap();
        assert_eq!(embs.len(), 2);
        assert_eq!(embs[0].n_exceptional(), 10);
        assert_eq!(embs[1].n_exceptional(), 6);
        assert_eq!(complement_euler(&cap, &embs[0]).unwrap(), 6);
        assert_eq!(complement_euler(&cap, &embs[1]).unwrap(), 2);
        assert_eq!(complement_betti2(&cap, &embs[1]).unwrap(), 1);
        for e in &embs {
            assert_eq!(multiplicity_total(&cap, e).unwrap(), BigInt::from(14));
            assert!(check_structure(&cap, e).all_passed());
        }
        assert!(equivalent_embeddings(&cap, &embs[1], &line_arrangement(2, 2)).unwrap());
        let canon = canonical_embedding(&make_p(2, 2).unwrap()).unwrap();
        let cap_d = dual_cap(&make_p(2, 2).unwrap()).unwrap();
        let in_order = enumerate(&cap_d).unwrap();
        assert!(equivalent_embeddings(&cap_d, &in_order[0], &canon).unwrap());
    }

    #[test]
    fn canonical_labels_follow_first_use() {
        let cap = make_dgamma(2, 2).unwrap();
        let embs = enumerate(&cap).unwrap();
        assert_eq!(
            embs[1].class_of(Vertex::new(1, 1)).unwrap().to_string(),
            "h - e1 - e2 - e3"
        );
        for e in &embs {
            let n = e.n_exceptional() as u64;
            assert_eq!(e.labels(), (1..=n).map(ExcLabel::Index).collect());
        }
    }

    #[test]
    fn fast_mode_agrees_with_audit_mode() {
        let g = StarPlumbing::new(-5, vec![vec![-3, -2], vec![-2], vec![-2]]).unwrap();
        let cap = dual_cap(&g).unwrap();
        let audit = enumerate(&cap).unwrap();
        let fast = enumerate_with(
            &cap,
            &EnumerateOptions {
                mode: SearchMode::Fast,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(audit, fast.embeddings);
    }

    #[test]
    fn budget_is_reported() {
        let cap = make_dgamma(3, 3).unwrap();
        let err = enumerate_with(
            &cap,
            &EnumerateOptions {
                node_budget: 10,
                ..Default::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::SearchBudget { .. }));
        assert!(err.is_resource());
    }

    #[test]
    fn rejects_filling_side() {
        let g = make_p(2, 2).unwrap();
        assert_eq!(
            enumerate(&g).unwrap_err(),
            Error::WrongSide { expected: "cap" }
        );
    }

    #[test]
    fn mixing_failure_is_witnessed() {
        let cap = StarPlumbing::cap(vec![vec![-2], vec![-2]]).unwrap();
        let emb = CapEmbedding::new(vec![
            (Vertex::CENTER, cls("h")),
            (Vertex::new(1, 1), cls("h - e1 - e2 - e3")),
            (Vertex::new(2, 1), cls("h - e1 - e2 - e4")),
        ]);
        let report = check_structure(&cap, &emb);
        let mixing = report.get(Lemma::Mixing);
        assert!(!mixing.passed);
        assert_eq!(mixing.witnesses.len(), 1);
        assert!(report.get(Lemma::Homform).passed);
    }

    #[test]
    fn canonical_embedding_passes_consecutive() {
        for arms in [
            vec![vec![-3, -2], vec![-2], vec![-2]],
            vec![vec![-3, -2], vec![-4], vec![-2]],
        ] {
            let g = StarPlumbing::new(-5, arms).unwrap();
            let cap = dual_cap(&g).unwrap();
            let emb = canonical_embedding(&g).unwrap();
            let report = check_structure(&cap, &emb);
            assert!(report.get(Lemma::First).applicable);
            assert!(report.all_passed(), "{}", report.summary());
        }
        let g = StarPlumbing::new(-5, vec![vec![-3, -2], vec![-4], vec![-2]]).unwrap();
        let report = check_structure(&dual_cap(&g).unwrap(), &canonical_embedding(&g).unwrap());
        assert!(report.get(Lemma::Consecutive).applicable);
    }
}
