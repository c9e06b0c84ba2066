//! Symbolic replay of the F = G argument: expand the big twists with the
//! generalized lantern relation, then match the two words by commuting twists.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use super::relations::{f_factorization, g_factorization, pairs};
use super::{act, curves_commute, ConvexTwist, Factorization, MappingClassNF};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StepKind {
    /// Replace a twist by its generalized lantern expansion.
    Expand,
    /// Swap two adjacent commuting twists.
    Commute,
    /// Combine adjacent powers of one twist.
    Merge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ReplaySide {
    F,
    G,
}

#[derive(Clone, Debug, Serialize)]
pub struct Step {
    pub kind: StepKind,
    pub side: ReplaySide,
    pub note: String,
    /// The word after this step.
    pub word: Factorization,
}

#[derive(Clone, Debug, Serialize)]
pub struct Derivation {
    pub m: usize,
    pub n: usize,
    pub f: Factorization,
    pub g: Factorization,
    pub steps: Vec<Step>,
    /// The common word both sides reach.
    pub meeting: Factorization,
}

impl Derivation {
    pub fn count(&self, kind: StepKind) -> usize {
        self.steps.iter().filter(|s| s.kind == kind).count()
    }
}

pub fn inline(word: &[ConvexTwist]) -> String {
    word.iter()
        .map(|t| {
            let h: Vec<String> = t.holes().iter().map(usize::to_string).collect();
            if t.power() == 1 {
                h.join(",")
            } else {
                format!("{}^{}", h.join(","), t.power())
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F({},{}) = {}", self.m, self.n, inline(self.f.word()))?;
        writeln!(f, "G({},{}) = {}", self.m, self.n, inline(self.g.word()))?;
        for (i, s) in self.steps.iter().enumerate() {
            writeln!(f, "{:>4} {:?} {:?}: {}", i + 1, s.side, s.kind, s.note)?;
            if s.kind != StepKind::Commute {
                writeln!(f, "       {}", inline(s.word.word()))?;
            }
        }
        write!(f, "meet: {}", inline(self.meeting.word()))
    }
}

struct Replayer {
    holes: usize,
    steps: Vec<Step>,
    commute_cache: HashMap<(ConvexTwist, ConvexTwist), bool>,
    expand_checked: HashSet<Vec<usize>>,
}

impl Replayer {
    fn record(
        &mut self,
        kind: StepKind,
        side: ReplaySide,
        note: String,
        word: &[ConvexTwist],
    ) -> Result<()> {
        let word = Factorization::new(self.holes, word.to_vec())?;
        self.steps.push(Step {
            kind,
            side,
            note,
            word,
        });
        Ok(())
    }

    fn twist_nf(&self, t: &ConvexTwist) -> Result<MappingClassNF> {
        act(&Factorization::new(self.holes, vec![t.clone()])?)
    }

    /// The predicate decides, the action confirms.
    fn commutes(&mut self, a: &ConvexTwist, b: &ConvexTwist) -> Result<bool> {
        let key = (a.clone(), b.clone());
        if let Some(&c) = self.commute_cache.get(&key) {
            return Ok(c);
        }
        let pred = curves_commute(a.holes(), b.holes());
        if pred {
            let (x, y) = (self.twist_nf(a)?, self.twist_nf(b)?);
            if x.then(&y) != y.then(&x) {
                return Err(Error::NoCommutationPath(format!(
                    "({a}) and ({b}) pass the disjointness test but do not commute"
                )));
            }
        }
        self.commute_cache.insert(key, pred);
        Ok(pred)
    }

    /// Generalized lantern: `φ_S = Π φ_i^{-(k-2)} · Π_{i<j} φ_{ij}`, `k = |S| ≥ 3`.
    fn expansion(&mut self, t: &ConvexTwist) -> Result<Vec<ConvexTwist>> {
        let s = t.holes();
        let k = s.len();
        let mut out = Vec::new();
        for &h in s {
            out.push(ConvexTwist::new([h], -(k as i64 - 2))?);
        }
        out.extend(pairs(s));
        if !self.expand_checked.contains(s) {
            let lhs = self.twist_nf(t)?;
            let rhs = act(&Factorization::new(self.holes, out.clone())?)?;
            if lhs != rhs {
                return Err(Error::InvalidInput(format!(
                    "generalized lantern expansion of {t} does not hold"
                )));
            }
            self.expand_checked.insert(s.to_vec());
        }
        Ok(out)
    }

    fn expand_at(
        &mut self,
        side: ReplaySide,
        word: &mut Vec<ConvexTwist>,
        idx: usize,
    ) -> Result<()> {
        let t = word[idx].clone();
        if t.holes().len() < 3 || t.power() != 1 {
            return Ok(());
        }
        let exp = self.expansion(&t)?;
        let len = exp.len();
        word.splice(idx..=idx, exp);
        self.record(
            StepKind::Expand,
            side,
            format!("expand {t} into {len} twists"),
            word,
        )
    }

    fn swap(&mut self, side: ReplaySide, word: &mut [ConvexTwist], i: usize) -> Result<()> {
        let (a, b) = (word[i].clone(), word[i + 1].clone());
        if !self.commutes(&a, &b)? {
            return Err(Error::NoCommutationPath(format!(
                "({a}) and ({b}) do not commute"
            )));
        }
        word.swap(i, i + 1);
        self.record(StepKind::Commute, side, format!("({a}) <-> ({b})"), word)
    }

    /// Moves boundary-parallel twists to the front sorted by hole and merges powers.
    fn gather_singletons(&mut self, side: ReplaySide, word: &mut Vec<ConvexTwist>) -> Result<()> {
        let mut placed = 0;
        loop {
            // next singleton at or after `placed`, smallest hole first, leftmost on ties
            let next = (placed..word.len())
                .filter(|&i| word[i].holes().len() == 1)
                .min_by_key(|&i| (word[i].holes()[0], i));
            let Some(mut i) = next else { break };
            while i > placed {
                self.swap(side, word, i - 1)?;
                i -= 1;
            }
            placed += 1;
        }
        let mut i = 0;
        while i + 1 < word.len() {
            if word[i].holes().len() == 1 && word[i].same_curve(&word[i + 1]) {
                let p = word[i].power() + word[i + 1].power();
                let note = format!("({}) ({}) -> power {p}", word[i], word[i + 1]);
                if p == 0 {
                    word.drain(i..=i + 1);
                } else {
                    word[i] = word[i].with_power(p)?;
                    word.remove(i + 1);
                }
                self.record(StepKind::Merge, side, note, word)?;
            } else {
                i += 1;
            }
        }
        Ok(())
    }

    /// Turns `from` into `to` by adjacent swaps of commuting twists.
    fn align(
        &mut self,
        side: ReplaySide,
        from: &mut [ConvexTwist],
        to: &[ConvexTwist],
    ) -> Result<()> {
        if from.len() != to.len() {
            return Err(Error::NoCommutationPath(format!(
                "words have lengths {} and {}",
                from.len(),
                to.len()
            )));
        }
        for pos in 0..to.len() {
            let Some(mut j) = (pos..from.len()).find(|&j| from[j] == to[pos]) else {
                return Err(Error::NoCommutationPath(format!(
                    "({}) missing after position {pos}",
                    to[pos]
                )));
            };
            while j > pos {
                self.swap(side, from, j - 1)?;
                j -= 1;
            }
        }
        Ok(())
    }
}

/// Replays the rewriting of `F(m,n)` and `G(m,n)` into a common word.
pub fn proof_replay(m: usize, n: usize) -> Result<Derivation> {
    let f = f_factorization(m, n)?;
    let g = g_factorization(m, n)?;
    let holes = f.holes();
    let mut r = Replayer {
        holes,
        steps: Vec::new(),
        commute_cache: HashMap::new(),
        expand_checked: HashSet::new(),
    };

    let mut fw = f.word().to_vec();
    r.expand_at(ReplaySide::F, &mut fw, 0)?;
    r.gather_singletons(ReplaySide::F, &mut fw)?;

    let mut gw = g.word().to_vec();
    let last = gw.len() - 1;
    r.expand_at(ReplaySide::G, &mut gw, last)?;
    r.expand_at(ReplaySide::G, &mut gw, 0)?;
    r.gather_singletons(ReplaySide::G, &mut gw)?;

    r.align(ReplaySide::G, &mut gw, &fw)?;
    debug_assert_eq!(gw, fw);
    Ok(Derivation {
        m,
        n,
        f,
        g,
        steps: r.steps,
        meeting: Factorization::new(holes, fw)?,
    })
}
