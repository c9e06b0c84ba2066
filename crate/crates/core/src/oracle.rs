//! Slow reference implementations used to cross-check the fast code paths.
//!
//! Nothing here is tuned; everything is generate-and-test over the definitions.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::embedder::CapEmbedding;
use crate::error::Result;
use crate::homlattice::{adjunction_defect, pairing, ExcLabel, LatticeClass};
use crate::plumbing::{determinant, StarPlumbing, Vertex};

/// Embeddings of `cap` by plain generate-and-test over label choices.
///
/// Labels are introduced in increasing order (a fresh label is always the next
/// unused index), every partial assignment is checked against the pairings
/// with earlier vertices, and results are deduplicated by the least sorted
/// column matrix over all permutations of identical arms.
pub fn brute_force_enumerate(cap: &StarPlumbing) -> Result<Vec<CapEmbedding>> {
    let verts = cap.vertices();
    let q = cap.intersection_matrix();
    let mut found: Vec<Vec<LatticeClass>> = Vec::new();
    let mut classes = vec![LatticeClass::line()];
    brute_rec(cap, &verts, &q, &mut classes, 0, &mut found);

    let perms = arm_symmetries(cap);
    let mut keys: BTreeSet<(std::cmp::Reverse<usize>, Vec<Vec<u8>>)> = BTreeSet::new();
    for sol in &found {
        let best = perms
            .iter()
            .map(|perm| sorted_columns(cap, sol, perm))
            .min()
            .expect("identity permutation");
        keys.insert((std::cmp::Reverse(best.len()), best));
    }
    Ok(keys
        .into_iter()
        .map(|(_, key)| embedding_from_columns(&verts, &key))
        .collect())
}

fn brute_rec(
    cap: &StarPlumbing,
    verts: &[Vertex],
    q: &[Vec<i64>],
    classes: &mut Vec<LatticeClass>,
    n: u64,
    found: &mut Vec<Vec<LatticeClass>>,
) {
    let idx = classes.len();
    if idx == verts.len() {
        found.push(classes.clone());
        return;
    }
    let v = verts[idx];
    let w = cap.weight(v).expect("vertex of cap");
    let existing: Vec<u64> = (1..=n).collect();
    let mut try_class = |class: LatticeClass, used: u64, classes: &mut Vec<LatticeClass>| {
        let fits = adjunction_defect(&class).is_zero()
            && pairing(&class, &class) == BigInt::from(w)
            && (0..idx).all(|i| pairing(&class, &classes[i]) == BigInt::from(q[i][idx]));
        if fits {
            classes.push(class);
            brute_rec(cap, verts, q, classes, used, found);
            classes.pop();
        }
    };
    let minus = |class: &mut LatticeClass, labels: &[u64]| {
        for &l in labels {
            class.add_exc(ExcLabel::Index(l), -BigInt::one());
        }
    };
    if v.depth == 1 {
        let s = 1 - w;
        if s < 0 {
            return;
        }
        let s = s as u64;
        for j in 0..=s.min(n) {
            for subset in combinations(&existing, j as usize) {
                let mut class = LatticeClass::line();
                minus(&mut class, &subset);
                let fresh: Vec<u64> = (n + 1..=n + s - j).collect();
                minus(&mut class, &fresh);
                try_class(class, n + s - j, classes);
            }
        }
    } else {
        let s = -w - 1;
        if s < 0 {
            return;
        }
        let s = s as u64;
        for p in 1..=n + 1 {
            let p_fresh = u64::from(p == n + 1);
            let others: Vec<u64> = existing.iter().copied().filter(|&l| l != p).collect();
            for j in 0..=s.min(others.len() as u64) {
                for subset in combinations(&others, j as usize) {
                    let mut class = LatticeClass::exceptional(ExcLabel::Index(p));
                    minus(&mut class, &subset);
                    let start = n + p_fresh + 1;
                    let fresh: Vec<u64> = (start..start + s - j).collect();
                    minus(&mut class, &fresh);
                    try_class(class, n + p_fresh + s - j, classes);
                }
            }
        }
    }
}

fn combinations(items: &[u64], k: usize) -> Vec<Vec<u64>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

/// Permutations of arm indices that only exchange arms with equal weights.
fn arm_symmetries(cap: &StarPlumbing) -> Vec<Vec<usize>> {
    let k = cap.arm_count();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    let mut used = vec![false; k];
    fn rec(cap: &StarPlumbing, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let t = cur.len();
        if t == used.len() {
            out.push(cur.clone());
            return;
        }
        for s in 0..used.len() {
            if !used[s] && cap.arms()[s] == cap.arms()[t] {
                used[s] = true;
                cur.push(s);
                rec(cap, cur, used, out);
                cur.pop();
                used[s] = false;
            }
        }
    }
    rec(cap, &mut cur, &mut used, &mut out);
    out
}

fn sorted_columns(cap: &StarPlumbing, sol: &[LatticeClass], perm: &[usize]) -> Vec<Vec<u8>> {
    // class index of vertex (arm j, depth d) in `sol`
    let mut offsets = vec![1usize];
    for arm in cap.arms() {
        offsets.push(offsets.last().unwrap() + arm.len());
    }
    let mut rows: Vec<&LatticeClass> = Vec::new();
    for &src in perm {
        for d in 0..cap.arms()[src].len() {
            rows.push(&sol[offsets[src] + d]);
        }
    }
    let labels: BTreeSet<&ExcLabel> = rows.iter().flat_map(|c| c.support()).collect();
    let mut cols: Vec<Vec<u8>> = labels
        .into_iter()
        .map(|l| {
            rows.iter()
                .map(|c| {
                    let x = c.coeff(l);
                    if x.is_one() {
                        0
                    } else if x == -BigInt::one() {
                        1
                    } else {
                        2
                    }
                })
                .collect()
        })
        .collect();
    cols.sort();
    cols
}

fn embedding_from_columns(verts: &[Vertex], key: &[Vec<u8>]) -> CapEmbedding {
    let mut classes = vec![(Vertex::CENTER, LatticeClass::line())];
    for (r, &v) in verts.iter().enumerate().skip(1) {
        let mut class = if v.depth == 1 {
            LatticeClass::line()
        } else {
            LatticeClass::zero()
        };
        for (l, col) in key.iter().enumerate() {
            let c = match col[r - 1] {
                0 => 1,
                1 => -1,
                _ => 0,
            };
            class.add_exc(ExcLabel::Index(l as u64 + 1), BigInt::from(c));
        }
        classes.push((v, class));
    }
    CapEmbedding::new(classes)
}

/// Side of the newest exceptional sphere to blow up next.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlowupSide {
    /// Towards the zero-section.
    Left,
    /// Towards the infinity-section.
    Right,
}

/// Result of running the fiber blow-up construction.
#[derive(Clone, Debug)]
pub struct BlowupResult {
    pub filling: StarPlumbing,
    pub cap: StarPlumbing,
    pub embedding: CapEmbedding,
}

/// Runs the blow-up construction on `CP^2 # -CP^2` with one tracked fiber per
/// entry of `fibers`. Each fiber is first blown up where it meets the
/// infinity-section; every further step blows up the newest exceptional
/// sphere where it meets its left or right neighbour. Steps that would touch a
/// section are skipped. Fibers are cut at their newest exceptional sphere.
pub fn blowup_construction(fibers: &[Vec<BlowupSide>]) -> Result<BlowupResult> {
    let e_inf = ExcLabel::Name("inf".into());
    let mut cap_arms = Vec::new();
    let mut fill_arms = Vec::new();
    let mut classes = vec![(Vertex::CENTER, LatticeClass::line())];
    for (j, steps) in fibers.iter().enumerate() {
        let mut fresh = 0u64;
        let mut new_label = || {
            fresh += 1;
            ExcLabel::Name(format!("f{}_{}", j + 1, fresh))
        };
        // (class, square) along the fiber, zero-section side first
        let mut fiber = LatticeClass::line();
        fiber.add_exc(e_inf.clone(), -BigInt::one());
        let x = new_label();
        fiber.add_exc(x.clone(), -BigInt::one());
        let mut chain = vec![(fiber, -1i64), (LatticeClass::exceptional(x), -1)];
        let mut newest = 1usize;
        for step in steps {
            let (a, b) = match step {
                BlowupSide::Left => (newest - 1, newest),
                BlowupSide::Right if newest + 1 < chain.len() => (newest, newest + 1),
                BlowupSide::Right => continue,
            };
            let x = new_label();
            for i in [a, b] {
                chain[i].0.add_exc(x.clone(), -BigInt::one());
                chain[i].1 -= 1;
            }
            chain.insert(b, (LatticeClass::exceptional(x), -1));
            newest = b;
        }
        let cap_arm: Vec<i64> = chain[..newest].iter().map(|(_, w)| *w).collect();
        let fill_arm: Vec<i64> = chain[newest + 1..].iter().rev().map(|(_, w)| *w).collect();
        for (d, (c, _)) in chain[..newest].iter().enumerate() {
            classes.push((Vertex::new(j + 1, d + 1), c.clone()));
        }
        cap_arms.push(cap_arm);
        if !fill_arm.is_empty() {
            fill_arms.push(fill_arm);
        }
    }
    let center = -1 - fibers.len() as i64;
    Ok(BlowupResult {
        filling: StarPlumbing::new(center, fill_arms)?,
        cap: StarPlumbing::cap(cap_arms)?,
        embedding: CapEmbedding::new(classes),
    })
}

/// Invariant factors of an integer matrix as ratios of determinantal divisors
/// (gcds of all `k×k` minors). Zero divisors are dropped with everything after.
pub fn invariant_factors_by_minors(m: &[Vec<i64>]) -> Vec<BigInt> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut out = Vec::new();
    for k in 1..=rows.min(cols) {
        let mut d = BigInt::zero();
        let rs: Vec<u64> = (0..rows as u64).collect();
        let cs: Vec<u64> = (0..cols as u64).collect();
        for r in combinations(&rs, k) {
            for c in combinations(&cs, k) {
                let minor: Vec<Vec<BigInt>> = r
                    .iter()
                    .map(|&i| {
                        c.iter()
                            .map(|&j| BigInt::from(m[i as usize][j as usize]))
                            .collect()
                    })
                    .collect();
                d = d.gcd(&determinant(&minor));
            }
        }
        if d.is_zero() {
            break;
        }
        out.push(&d / &prev);
        prev = d;
    }
    out
}
