//! Concave caps of dually-positive star plumbings.
//!
//! Each arm of the filling graph with negative continued fraction `p/q`
//! contributes a cap arm with fraction `p/(p-q)`. Every one of the `-e_0 - 1`
//! tracked fibers that carries no filling arm becomes a single (-1) leaf.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::embedder::CapEmbedding;
use crate::error::{Error, Result};
use crate::homlattice::{ExcLabel, LatticeClass};
use crate::plumbing::{StarPlumbing, Vertex};

/// A Hirzebruch–Jung string `(a_1, …, a_s)` with `p/q = a_1 - 1/(a_2 - … - 1/a_s)`.
///
/// Entries are `>= 2`, except for the one-element string `(1)` which stands for
/// a fiber blown up once.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HjString(Vec<i64>);

impl HjString {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        let ok = entries == [1] || (!entries.is_empty() && entries.iter().all(|&a| a >= 2));
        if !ok {
            return Err(Error::InvalidInput(format!(
                "not a Hirzebruch-Jung string: {entries:?}"
            )));
        }
        Ok(HjString(entries))
    }

    /// The string of a chain of weights, i.e. the weights negated.
    pub fn from_weights(weights: &[i64]) -> Result<Self> {
        Self::new(weights.iter().map(|w| -w).collect())
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn to_weights(&self) -> Vec<i64> {
        self.0.iter().map(|a| -a).collect()
    }

    pub fn is_once_blown(&self) -> bool {
        self.0 == [1]
    }

    /// The fraction `(p, q)` this string expands. `(1)` evaluates to `(1, 1)`.
    pub fn value(&self) -> (i64, i64) {
        hj_value(&self.0)
    }
}

impl fmt::Display for HjString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Evaluates a continued fraction from the tail: `(p, q) <- (a·p - q, p)`.
pub fn hj_value(entries: &[i64]) -> (i64, i64) {
    let mut p = 1i64;
    let mut q = 0i64;
    for &a in entries.iter().rev() {
        let next = a
            .checked_mul(p)
            .and_then(|x| x.checked_sub(q))
            .expect("continued fraction value overflows i64");
        q = p;
        p = next;
    }
    (p, q)
}

/// Expands `p/q` (with `p > q >= 1`, coprime) into its unique string of entries `>= 2`.
pub fn hj_expand(p: i64, q: i64) -> Result<HjString> {
    if !(p > q && q >= 1) {
        return Err(Error::InvalidInput(format!(
            "need p > q >= 1, got p={p}, q={q}"
        )));
    }
    if p.gcd(&q) != 1 {
        return Err(Error::InvalidInput(format!("gcd({p},{q}) != 1")));
    }
    let (mut p, mut q) = (p, q);
    let mut out = Vec::new();
    while q > 0 {
        let a = (p + q - 1) / q;
        out.push(a);
        let r = a * q - p;
        p = q;
        q = r;
    }
    HjString::new(out)
}

/// Dual string: `p/q` maps to `p/(p-q)`. An involution.
pub fn hj_dual(s: &HjString) -> Result<HjString> {
    if s.is_once_blown() {
        return Err(Error::InvalidInput(
            "the once-blown string (1) has no dual string".into(),
        ));
    }
    let (p, q) = s.value();
    hj_expand(p, p - q)
}

/// Cap graph of a dually-positive star: center +1, the dual of each filling arm
/// (in order), then `-e_0 - 1 - k` single (-1) leaves.
pub fn dual_cap(g: &StarPlumbing) -> Result<StarPlumbing> {
    g.require_dually_positive()?;
    let fibers = (-g.center_weight() - 1) as usize;
    let mut arms = Vec::with_capacity(fibers);
    for arm in g.arms() {
        arms.push(hj_dual(&HjString::from_weights(arm)?)?.to_weights());
    }
    arms.extend((g.arm_count()..fibers).map(|_| vec![-1]));
    StarPlumbing::cap(arms)
}

/// The shared exceptional class `e_1` of the canonical embedding.
pub fn canonical_shared_label() -> ExcLabel {
    ExcLabel::Index(1)
}

/// Homological embedding of `dual_cap(g)` whose complement is the plumbing `g`.
///
/// The center gets `h`. A depth-1 vertex of weight `w` in arm `j` gets
/// `h - e1 - e(j,1) - … - e(j,-w)`; a deeper vertex of weight `w` gets its
/// parent's last label minus `-w-1` fresh labels of its arm.
pub fn canonical_embedding(g: &StarPlumbing) -> Result<CapEmbedding> {
    let cap = dual_cap(g)?;
    let e1 = canonical_shared_label();
    let mut classes = vec![(Vertex::CENTER, LatticeClass::line())];
    for (j0, arm) in cap.arms().iter().enumerate() {
        let j = (j0 + 1) as u64;
        let mut next = 1u64;
        let mut fresh = |count: i64| -> Vec<ExcLabel> {
            let labels = (0..count)
                .map(|t| ExcLabel::Pair(j, next + t as u64))
                .collect();
            next += count as u64;
            labels
        };
        let mut parent_last: Option<ExcLabel> = None;
        for (i0, &w) in arm.iter().enumerate() {
            let (class, labels) = if i0 == 0 {
                let labels = fresh(-w);
                let mut c = LatticeClass::line();
                c.add_exc(e1.clone(), (-1).into());
                for l in &labels {
                    c.add_exc(l.clone(), (-1).into());
                }
                (c, labels)
            } else {
                let plus = parent_last.clone().ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "arm {j} vertex at depth {i0} has no label to hand to its child"
                    ))
                })?;
                let labels = fresh(-w - 1);
                let mut c = LatticeClass::exceptional(plus);
                for l in &labels {
                    c.add_exc(l.clone(), (-1).into());
                }
                (c, labels)
            };
            parent_last = labels.last().cloned();
            classes.push((Vertex::new(j0 + 1, i0 + 1), class));
        }
    }
    Ok(CapEmbedding::new(classes))
}
