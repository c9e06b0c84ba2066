use serde::Serialize;

use super::{equal, ConvexTwist, Factorization};
use crate::error::{Error, Result};

/// Two factorizations that should define the same mapping class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub name: String,
    pub lhs: Factorization,
    pub rhs: Factorization,
}

impl Relation {
    pub fn holes(&self) -> usize {
        self.lhs.holes()
    }

    pub fn verify(&self) -> Result<bool> {
        equal(&self.lhs, &self.rhs)
    }

    pub fn reversed(&self) -> Relation {
        Relation {
            name: format!("{}^-1", self.name),
            lhs: self.rhs.clone(),
            rhs: self.lhs.clone(),
        }
    }
}

fn union(groups: &[&[usize]]) -> Vec<usize> {
    let mut all: Vec<usize> = groups.iter().flat_map(|g| g.iter().copied()).collect();
    all.sort_unstable();
    all
}

fn twist(holes: &[usize]) -> ConvexTwist {
    ConvexTwist::positive(holes.iter().copied()).expect("validated groups")
}

/// Groups must be nonempty, pairwise disjoint and listed counterclockwise:
/// reading the sorted groups in order visits the holes in cyclic order.
fn check_groups(groups: &[Vec<usize>]) -> Result<usize> {
    let mut seq = Vec::new();
    for g in groups {
        if g.is_empty() {
            return Err(Error::InvalidInput("empty hole group".into()));
        }
        if g.contains(&0) {
            return Err(Error::InvalidInput("holes are numbered from 1".into()));
        }
        let mut s = g.clone();
        s.sort_unstable();
        if s.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(format!("repeated hole in group {g:?}")));
        }
        seq.extend(s);
    }
    let mut sorted = seq.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("hole groups overlap".into()));
    }
    let descents = (0..seq.len())
        .filter(|&i| seq[i] > seq[(i + 1) % seq.len()])
        .count();
    if descents > 1 {
        return Err(Error::InvalidInput(format!(
            "hole groups {groups:?} are not in counterclockwise order"
        )));
    }
    Ok(*sorted.last().expect("nonempty"))
}

/// `φ_{A∪B∪C} φ_A φ_B φ_C = φ_{A∪B} φ_{A∪C} φ_{B∪C}`.
pub fn lantern(a: &[usize], b: &[usize], c: &[usize]) -> Result<Relation> {
    let n = check_groups(&[a.to_vec(), b.to_vec(), c.to_vec()])?;
    let lhs = vec![twist(&union(&[a, b, c])), twist(a), twist(b), twist(c)];
    let rhs = vec![
        twist(&union(&[a, b])),
        twist(&union(&[a, c])),
        twist(&union(&[b, c])),
    ];
    Ok(Relation {
        name: "lantern".into(),
        lhs: Factorization::new(n, lhs)?,
        rhs: Factorization::new(n, rhs)?,
    })
}

/// Daisy relation on groups `B_0, …, B_p`, `p ≥ 2`.
pub fn daisy(groups: &[Vec<usize>]) -> Result<Relation> {
    if groups.len() < 3 {
        return Err(Error::InvalidInput("daisy needs p >= 2 petals".into()));
    }
    let n = check_groups(groups)?;
    let p = groups.len() - 1;
    let refs: Vec<&[usize]> = groups.iter().map(Vec::as_slice).collect();
    let mut lhs = vec![twist(&union(&refs))];
    lhs.push(ConvexTwist::new(refs[0].iter().copied(), p as i64 - 1)?);
    lhs.extend(refs[1..].iter().map(|g| twist(g)));
    let mut rhs: Vec<ConvexTwist> = refs[1..]
        .iter()
        .map(|g| twist(&union(&[refs[0], g])))
        .collect();
    rhs.push(twist(&union(&refs[1..])));
    Ok(Relation {
        name: format!("daisy{p}"),
        lhs: Factorization::new(n, lhs)?,
        rhs: Factorization::new(n, rhs)?,
    })
}

/// `φ_{1..k} φ_1^{k-2} ⋯ φ_k^{k-2} = Π_{i<j} φ_{i,j}` (lexicographic), `k ≥ 3`.
pub fn generalized_lantern(k: usize) -> Result<Relation> {
    if k < 3 {
        return Err(Error::InvalidInput(
            "generalized lantern needs k >= 3".into(),
        ));
    }
    let mut lhs = vec![twist(&(1..=k).collect::<Vec<_>>())];
    for i in 1..=k {
        lhs.push(ConvexTwist::new([i], k as i64 - 2)?);
    }
    let rhs = pairs(&(1..=k).collect::<Vec<_>>());
    Ok(Relation {
        name: format!("glantern{k}"),
        lhs: Factorization::new(k, lhs)?,
        rhs: Factorization::new(k, rhs)?,
    })
}

pub(super) fn pairs(holes: &[usize]) -> Vec<ConvexTwist> {
    let mut out = Vec::new();
    for (i, &x) in holes.iter().enumerate() {
        for &y in &holes[i + 1..] {
            out.push(twist(&[x, y]));
        }
    }
    out
}

fn check_mn(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidInput("m and n must be at least 1".into()));
    }
    Ok(())
}

/// Holes `A_i = i`, `B = m+1`, `C_j = m+1+j`.
pub fn f_factorization(m: usize, n: usize) -> Result<Factorization> {
    check_mn(m, n)?;
    let total = m + n + 1;
    let mut word = vec![twist(&(1..=total).collect::<Vec<_>>())];
    for a in 1..=m {
        word.push(ConvexTwist::new([a], n as i64)?);
    }
    word.push(twist(&[m + 1]));
    for c in m + 2..=total {
        word.push(ConvexTwist::new([c], m as i64)?);
    }
    Factorization::monodromy(total, word)
}

pub fn g_factorization(m: usize, n: usize) -> Result<Factorization> {
    check_mn(m, n)?;
    let total = m + n + 1;
    let b = m + 1;
    let mut word = vec![twist(&(1..=b).collect::<Vec<_>>())];
    for a in 1..=m {
        for c in b + 1..=total {
            word.push(twist(&[a, c]));
        }
    }
    word.push(twist(&(b..=total).collect::<Vec<_>>()));
    Factorization::monodromy(total, word)
}

pub fn verify_fg(m: usize, n: usize) -> Result<bool> {
    equal(&f_factorization(m, n)?, &g_factorization(m, n)?)
}
