//! Monodromy substitution as rewriting of positive factorizations.
//!
//! Words are handled expanded (one unit twist per letter). Two words are
//! identified when they differ by swapping adjacent twists about disjoint
//! curves; the representative is the lexicographically least such word.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mcg::{
    act, curves_commute, daisy, equal, generalized_lantern, lantern, ConvexTwist, Factorization,
    MappingClassNF, Relation,
};

/// A verified relation used as a rewrite rule on its template surface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rewrite {
    pub name: String,
    lhs: Factorization,
    rhs: Factorization,
}

impl Rewrite {
    pub fn new(name: impl Into<String>, lhs: Factorization, rhs: Factorization) -> Result<Self> {
        let name = name.into();
        if !lhs.is_positive() || !rhs.is_positive() {
            return Err(Error::InvalidInput(format!("rule {name} is not positive")));
        }
        if !equal(&lhs, &rhs)? {
            return Err(Error::MonodromyMismatch(format!(
                "rule {name}: the two sides differ"
            )));
        }
        Ok(Rewrite {
            name,
            lhs: lhs.expanded(),
            rhs: rhs.expanded(),
        })
    }

    pub fn from_relation(r: &Relation) -> Result<Self> {
        Self::new(r.name.clone(), r.lhs.clone(), r.rhs.clone())
    }

    pub fn lhs(&self) -> &Factorization {
        &self.lhs
    }

    pub fn rhs(&self) -> &Factorization {
        &self.rhs
    }

    pub fn template_holes(&self) -> usize {
        self.lhs.holes()
    }

    pub fn reversed(&self) -> Rewrite {
        Rewrite {
            name: format!("{}^-1", self.name),
            lhs: self.rhs.clone(),
            rhs: self.lhs.clone(),
        }
    }
}

/// Rules by name: `lantern`, `daisy` (all `p` in `2..=max_daisy`), `daisyP`,
/// `glanternK`. Comma separated.
pub fn rule_set(names: &str, max_daisy: usize) -> Result<Vec<Rewrite>> {
    let singles = |k: usize| -> Vec<Vec<usize>> { (1..=k).map(|i| vec![i]).collect() };
    let mut out = Vec::new();
    for name in names.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if name == "lantern" {
            out.push(Rewrite::from_relation(&lantern(&[1], &[2], &[3])?)?);
        } else if name == "daisy" {
            for p in 2..=max_daisy {
                out.push(Rewrite::from_relation(&daisy(&singles(p + 1))?)?);
            }
        } else if let Some(p) = name
            .strip_prefix("daisy")
            .and_then(|s| s.parse::<usize>().ok())
        {
            out.push(Rewrite::from_relation(&daisy(&singles(p + 1))?)?);
        } else if let Some(k) = name
            .strip_prefix("glantern")
            .and_then(|s| s.parse::<usize>().ok())
        {
            out.push(Rewrite::from_relation(&generalized_lantern(k)?)?);
        } else {
            return Err(Error::InvalidInput(format!("unknown rule {name:?}")));
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidInput("empty rule set".into()));
    }
    Ok(out)
}

/// An instance of a rule's left side inside a word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Occurrence {
    /// Template hole `i + 1` goes to target hole `injection[i]`.
    pub injection: Vec<usize>,
    /// Position in the expanded word of each letter of the left side.
    pub positions: Vec<usize>,
    /// The expanded word's positions rearranged by commutations so that the
    /// matched letters form the window `start..start + positions.len()`.
    pub arranged: Vec<usize>,
    pub start: usize,
}

/// Order-preserving maps of `1..=t` into the circle `1..=n`.
pub fn circular_injections(t: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if t == 0 || t > n {
        return out;
    }
    let mut subset: Vec<usize> = (1..=t).collect();
    loop {
        for r in 0..t {
            out.push((0..t).map(|i| subset[(i + r) % t]).collect());
        }
        // next t-subset in lexicographic order
        let Some(i) = (0..t).rev().find(|&i| subset[i] < n - (t - 1 - i)) else {
            break;
        };
        subset[i] += 1;
        for j in i + 1..t {
            subset[j] = subset[j - 1] + 1;
        }
    }
    out
}

fn is_circular_injection(inj: &[usize], n: usize) -> bool {
    if inj.is_empty() || inj.iter().any(|&h| h == 0 || h > n) {
        return false;
    }
    let mut sorted = inj.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return false;
    }
    let descents = (0..inj.len())
        .filter(|&i| inj[i] > inj[(i + 1) % inj.len()])
        .count();
    descents <= 1
}

fn relabel(t: &ConvexTwist, inj: &[usize]) -> ConvexTwist {
    ConvexTwist::new(t.holes().iter().map(|&h| inj[h - 1]), t.power()).expect("injective")
}

fn commute(a: &ConvexTwist, b: &ConvexTwist) -> bool {
    a == b || curves_commute(a.holes(), b.holes())
}

/// Whether the letters at `sel` (pattern order) can be brought together in
/// that order by commutations; returns the rearranged position list and the
/// window start.
fn gather(word: &[ConvexTwist], sel: &[usize]) -> Option<(Vec<usize>, usize)> {
    let (first, last) = (*sel.iter().min()?, *sel.iter().max()?);
    for (x, &i) in sel.iter().enumerate() {
        if sel[x + 1..]
            .iter()
            .any(|&j| j < i && !commute(&word[i], &word[j]))
        {
            return None;
        }
    }
    let mut left = Vec::new();
    let mut right: Vec<usize> = Vec::new();
    for i in first..=last {
        if sel.contains(&i) {
            continue;
        }
        // leftward it passes earlier matched letters and earlier right-movers
        let ok_left = sel
            .iter()
            .filter(|&&s| s < i)
            .all(|&s| commute(&word[s], &word[i]))
            && right.iter().all(|&r| commute(&word[r], &word[i]));
        if ok_left {
            left.push(i);
        } else if sel
            .iter()
            .filter(|&&s| s > i)
            .all(|&s| commute(&word[s], &word[i]))
        {
            right.push(i);
        } else {
            return None;
        }
    }
    let mut arranged: Vec<usize> = (0..first).collect();
    arranged.extend(&left);
    let start = arranged.len();
    arranged.extend(sel);
    arranged.extend(&right);
    arranged.extend(last + 1..word.len());
    Some((arranged, start))
}

/// All occurrences of `r`'s left side in `f` under circular injections of the
/// template holes, visiting at most `budget` partial matches.
pub fn find_occurrences(f: &Factorization, r: &Rewrite, budget: u64) -> Result<Vec<Occurrence>> {
    if !f.is_positive() {
        return Err(Error::InvalidInput(
            "occurrences are searched in positive factorizations".into(),
        ));
    }
    let word = f.expanded().word().to_vec();
    let mut nodes = 0u64;
    let mut out = Vec::new();
    for inj in circular_injections(r.template_holes(), f.holes()) {
        let pattern: Vec<ConvexTwist> = r.lhs.word().iter().map(|t| relabel(t, &inj)).collect();
        // cheap multiset filter
        let mut need: HashMap<&ConvexTwist, usize> = HashMap::new();
        for t in &pattern {
            *need.entry(t).or_default() += 1;
        }
        if need
            .iter()
            .any(|(t, &c)| word.iter().filter(|w| w == t).count() < c)
        {
            continue;
        }
        let mut sel = Vec::with_capacity(pattern.len());
        match_rec(&word, &pattern, &mut sel, &mut nodes, budget, &mut |sel| {
            if let Some((arranged, start)) = gather(&word, sel) {
                out.push(Occurrence {
                    injection: inj.clone(),
                    positions: sel.to_vec(),
                    arranged,
                    start,
                });
            }
        })?;
    }
    Ok(out)
}

fn match_rec(
    word: &[ConvexTwist],
    pattern: &[ConvexTwist],
    sel: &mut Vec<usize>,
    nodes: &mut u64,
    budget: u64,
    emit: &mut dyn FnMut(&[usize]),
) -> Result<()> {
    *nodes += 1;
    if *nodes > budget {
        return Err(Error::SearchBudget { explored: *nodes });
    }
    let k = sel.len();
    if k == pattern.len() {
        emit(sel);
        return Ok(());
    }
    // copies of one letter keep their order under commutation
    let from = (0..k)
        .rev()
        .find(|&j| pattern[j] == pattern[k])
        .map_or(0, |j| sel[j] + 1);
    for i in from..word.len() {
        if word[i] != pattern[k] || sel.contains(&i) {
            continue;
        }
        // earlier pattern letters sitting to the right must commute past it
        if sel.iter().any(|&s| s > i && !commute(&word[s], &word[i])) {
            continue;
        }
        sel.push(i);
        match_rec(word, pattern, sel, nodes, budget, emit)?;
        sel.pop();
    }
    Ok(())
}

fn check_occurrence(word: &[ConvexTwist], n: usize, occ: &Occurrence, r: &Rewrite) -> Result<()> {
    let bad = |m: &str| Err(Error::InvalidOccurrence(m.into()));
    if occ.injection.len() != r.template_holes() || !is_circular_injection(&occ.injection, n) {
        return bad("hole map is not an order-preserving circular injection");
    }
    let mut seen = vec![false; word.len()];
    if occ.arranged.len() != word.len() {
        return bad("rearrangement has the wrong length");
    }
    for &i in &occ.arranged {
        if i >= word.len() || std::mem::replace(&mut seen[i], true) {
            return bad("rearrangement is not a permutation");
        }
    }
    for x in 0..occ.arranged.len() {
        for y in x + 1..occ.arranged.len() {
            let (i, j) = (occ.arranged[x], occ.arranged[y]);
            if i > j && !commute(&word[i], &word[j]) {
                return bad("rearrangement swaps twists that do not commute");
            }
        }
    }
    let len = r.lhs.word().len();
    if occ.start + len > word.len() {
        return bad("window runs past the end of the word");
    }
    for (k, t) in r.lhs.word().iter().enumerate() {
        if word[occ.arranged[occ.start + k]] != relabel(t, &occ.injection) {
            return bad("window does not match the rule");
        }
    }
    Ok(())
}

/// Replaces the occurrence's window by the relabeled right side. The result is
/// an expanded word; its total monodromy is checked against `f`.
pub fn apply(f: &Factorization, occ: &Occurrence, r: &Rewrite) -> Result<Factorization> {
    let word = f.expanded().word().to_vec();
    check_occurrence(&word, f.holes(), occ, r)?;
    let result = splice(&word, occ, r);
    let g = Factorization::new(f.holes(), result)?;
    if act(&g)? != act(f)? {
        return Err(Error::MonodromyMismatch(format!(
            "applying {} changed the monodromy",
            r.name
        )));
    }
    Ok(g)
}

fn splice(word: &[ConvexTwist], occ: &Occurrence, r: &Rewrite) -> Vec<ConvexTwist> {
    let len = r.lhs.word().len();
    let mut out: Vec<ConvexTwist> = occ.arranged[..occ.start]
        .iter()
        .map(|&i| word[i].clone())
        .collect();
    out.extend(r.rhs.word().iter().map(|t| relabel(t, &occ.injection)));
    out.extend(
        occ.arranged[occ.start + len..]
            .iter()
            .map(|&i| word[i].clone()),
    );
    out
}

/// Lexicographically least word reachable by swapping adjacent commuting twists.
pub fn canonical_word(word: &[ConvexTwist]) -> Vec<ConvexTwist> {
    let mut rest: Vec<ConvexTwist> = word.to_vec();
    let mut out = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        let mut best: Option<usize> = None;
        for i in 0..rest.len() {
            if best.is_some_and(|b| rest[b] <= rest[i]) {
                continue;
            }
            if rest[..i].iter().all(|x| commute(x, &rest[i])) {
                best = Some(i);
            }
        }
        out.push(rest.remove(best.expect("first letter is always movable")));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ReachBudget {
    pub max_depth: usize,
    pub max_states: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MoveSet {
    /// Also allow Hurwitz moves `a·b -> b·(b⁻¹ab)` and `a·b -> (aba⁻¹)·a` on
    /// adjacent letters when the conjugated curve is again convex.
    pub hurwitz: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathStep {
    /// Rule name (`name^-1` when applied right to left) or `hurwitz`.
    pub rule: String,
    pub injection: Vec<usize>,
    pub word: Factorization,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExhaustStats {
    pub explored: usize,
    pub depth_reached: usize,
    pub state_limit_hit: bool,
    pub depth_limit_hit: bool,
    /// Occurrence searches cut short by their own node budget.
    pub truncated_matches: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Reachability {
    Reached { path: Vec<PathStep> },
    Exhausted(ExhaustStats),
}

impl Reachability {
    pub fn is_reached(&self) -> bool {
        matches!(self, Reachability::Reached { .. })
    }
}

impl fmt::Display for Reachability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reachability::Reached { path } => {
                writeln!(f, "reached in {} steps", path.len())?;
                for (i, s) in path.iter().enumerate() {
                    let inj: Vec<String> = s.injection.iter().map(usize::to_string).collect();
                    writeln!(
                        f,
                        "{:>3} {} [{}]: {}",
                        i + 1,
                        s.rule,
                        inj.join(","),
                        crate::mcg::inline(s.word.word())
                    )?;
                }
                Ok(())
            }
            Reachability::Exhausted(s) => write!(
                f,
                "exhausted: {} states explored, depth {} reached{}{}; \
                 this is not a proof that no path exists",
                s.explored,
                s.depth_reached,
                if s.state_limit_hit {
                    ", state limit hit"
                } else {
                    ""
                },
                if s.depth_limit_hit {
                    ", depth limit hit"
                } else {
                    ""
                },
            ),
        }
    }
}

/// Per-state cap on partial matches while looking for rule occurrences.
pub const MATCH_BUDGET: u64 = 200_000;

struct Hurwitz {
    holes: usize,
    convex: HashMap<MappingClassNF, ConvexTwist>,
    cache: HashMap<(ConvexTwist, ConvexTwist, bool), Option<ConvexTwist>>,
}

impl Hurwitz {
    fn new(holes: usize) -> Result<Self> {
        let mut convex = HashMap::new();
        for s in 1..(1usize << holes) {
            let t = ConvexTwist::positive((1..=holes).filter(|h| s & (1 << (h - 1)) != 0))?;
            convex.insert(act(&Factorization::new(holes, vec![t.clone()])?)?, t);
        }
        Ok(Hurwitz {
            holes,
            convex,
            cache: HashMap::new(),
        })
    }

    /// `right`: `a·b -> b·c` with `c = b⁻¹ab`; otherwise `a·b -> c·a` with `c = aba⁻¹`.
    fn conjugate(
        &mut self,
        a: &ConvexTwist,
        b: &ConvexTwist,
        right: bool,
    ) -> Result<Option<ConvexTwist>> {
        let key = (a.clone(), b.clone(), right);
        if let Some(c) = self.cache.get(&key) {
            return Ok(c.clone());
        }
        let word = if right {
            vec![b.inverse(), a.clone(), b.clone()]
        } else {
            vec![a.clone(), b.clone(), a.inverse()]
        };
        let nf = act(&Factorization::new(self.holes, word)?)?;
        let c = self.convex.get(&nf).cloned();
        self.cache.insert(key, c.clone());
        Ok(c)
    }
}

struct Node {
    word: Vec<ConvexTwist>,
    parent: usize,
    step: Option<(String, Vec<usize>)>,
    depth: usize,
}

/// Breadth-first search from `start` towards `target` over canonical positive
/// words, applying every rule in both directions.
pub fn reachable(
    start: &Factorization,
    target: &Factorization,
    rules: &[Rewrite],
    budget: ReachBudget,
    moves: MoveSet,
) -> Result<Reachability> {
    if budget.max_states == 0 {
        return Err(Error::BadBudget("max_states must be positive".into()));
    }
    if rules.is_empty() && !moves.hurwitz {
        return Err(Error::BadBudget("no rules to apply".into()));
    }
    if !start.is_positive() || !target.is_positive() {
        return Err(Error::InvalidInput(
            "search runs on positive factorizations".into(),
        ));
    }
    if !equal(start, target)? {
        return Err(Error::MonodromyMismatch(
            "start and target have different total monodromy".into(),
        ));
    }
    let n = start.holes();
    let mut both: Vec<Rewrite> = Vec::new();
    for r in rules {
        both.push(r.clone());
        both.push(r.reversed());
    }
    let mut hurwitz = if moves.hurwitz {
        Some(Hurwitz::new(n)?)
    } else {
        None
    };

    let goal = canonical_word(target.expanded().word());
    let first = canonical_word(start.expanded().word());
    let mut nodes = vec![Node {
        word: first.clone(),
        parent: usize::MAX,
        step: None,
        depth: 0,
    }];
    let mut index: HashMap<Vec<ConvexTwist>, usize> = HashMap::from([(first, 0)]);
    let mut queue = VecDeque::from([0usize]);
    let mut stats = ExhaustStats {
        explored: 0,
        depth_reached: 0,
        state_limit_hit: false,
        depth_limit_hit: false,
        truncated_matches: 0,
    };

    let path_to = |nodes: &[Node], mut i: usize| -> Result<Vec<PathStep>> {
        let mut path = Vec::new();
        while let Some((rule, injection)) = nodes[i].step.clone() {
            path.push(PathStep {
                rule,
                injection,
                word: Factorization::new(n, nodes[i].word.clone())?,
            });
            i = nodes[i].parent;
        }
        path.reverse();
        Ok(path)
    };

    if nodes[0].word == goal {
        return Ok(Reachability::Reached { path: vec![] });
    }
    while let Some(cur) = queue.pop_front() {
        stats.explored += 1;
        let depth = nodes[cur].depth;
        stats.depth_reached = stats.depth_reached.max(depth);
        if depth >= budget.max_depth {
            stats.depth_limit_hit = true;
            continue;
        }
        let word = nodes[cur].word.clone();
        let f = Factorization::new(n, word.clone())?;
        let mut next: Vec<(Vec<ConvexTwist>, String, Vec<usize>)> = Vec::new();
        for r in &both {
            let occs = match find_occurrences(&f, r, MATCH_BUDGET) {
                Ok(o) => o,
                Err(Error::SearchBudget { .. }) => {
                    stats.truncated_matches += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            for occ in occs {
                let g = apply(&f, &occ, r)?;
                next.push((canonical_word(g.word()), r.name.clone(), occ.injection));
            }
        }
        if let Some(h) = hurwitz.as_mut() {
            for i in 0..word.len().saturating_sub(1) {
                let (a, b) = (&word[i], &word[i + 1]);
                if commute(a, b) {
                    continue;
                }
                for right in [true, false] {
                    if let Some(c) = h.conjugate(a, b, right)? {
                        let mut w = word.clone();
                        if right {
                            w[i] = b.clone();
                            w[i + 1] = c;
                        } else {
                            w[i] = c;
                            w[i + 1] = a.clone();
                        }
                        next.push((canonical_word(&w), "hurwitz".into(), vec![i + 1]));
                    }
                }
            }
        }
        for (w, rule, inj) in next {
            if index.contains_key(&w) {
                continue;
            }
            if nodes.len() >= budget.max_states {
                stats.state_limit_hit = true;
                break;
            }
            let id = nodes.len();
            index.insert(w.clone(), id);
            let hit = w == goal;
            nodes.push(Node {
                word: w,
                parent: cur,
                step: Some((rule, inj)),
                depth: depth + 1,
            });
            if hit {
                return Ok(Reachability::Reached {
                    path: path_to(&nodes, id)?,
                });
            }
            queue.push_back(id);
        }
        if stats.state_limit_hit {
            break;
        }
    }
    Ok(Reachability::Exhausted(stats))
}
