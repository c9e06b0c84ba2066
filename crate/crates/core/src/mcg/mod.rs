//! Mapping classes of the `n`-holed disk generated by twists about convex curves.
//!
//! Holes sit on a circle concentric with the boundary. Hole `i` is doubled into
//! punctures `2i-1, 2i`, and a mapping class is recorded by its action on the
//! free group `π_1` of the `2n`-punctured disk, based on the outer boundary in
//! the gap between hole `n` and hole 1. The twist about the curve around the
//! holes `S` conjugates each generator of a puncture inside by the loop around
//! that curve and fixes the rest. Boundary twists
//! about single holes act as full twists of their puncture pairs, so they are
//! not lost.

pub mod free;
mod relations;
mod replay;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, ParseError, Result};
use free::Word;

pub use relations::{
    daisy, f_factorization, g_factorization, generalized_lantern, lantern, verify_fg, Relation,
};
pub use replay::{inline, proof_replay, Derivation, ReplaySide, Step, StepKind};

/// Default cap on the total number of letters across all generator images.
pub const DEFAULT_WORD_LIMIT: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HoledDisk {
    n: usize,
}

impl HoledDisk {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput(
                "a holed disk needs at least one hole".into(),
            ));
        }
        Ok(HoledDisk { n })
    }

    pub fn holes(&self) -> usize {
        self.n
    }
}

/// `φ_S^p`: the `p`-th power of the positive twist about the convex curve around `S`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ConvexTwist {
    holes: Vec<usize>,
    power: i64,
}

impl ConvexTwist {
    pub fn new(holes: impl IntoIterator<Item = usize>, power: i64) -> Result<Self> {
        let set: BTreeSet<usize> = holes.into_iter().collect();
        if set.is_empty() {
            return Err(Error::InvalidInput(
                "a twist needs at least one hole".into(),
            ));
        }
        if set.contains(&0) {
            return Err(Error::InvalidInput("holes are numbered from 1".into()));
        }
        if power == 0 {
            return Err(Error::InvalidInput("twist power must be nonzero".into()));
        }
        Ok(ConvexTwist {
            holes: set.into_iter().collect(),
            power,
        })
    }

    /// Positive twist about the curve around `holes`.
    pub fn positive(holes: impl IntoIterator<Item = usize>) -> Result<Self> {
        Self::new(holes, 1)
    }

    pub fn holes(&self) -> &[usize] {
        &self.holes
    }

    pub fn power(&self) -> i64 {
        self.power
    }

    pub fn inverse(&self) -> ConvexTwist {
        ConvexTwist {
            holes: self.holes.clone(),
            power: -self.power,
        }
    }

    pub fn with_power(&self, power: i64) -> Result<ConvexTwist> {
        ConvexTwist::new(self.holes.iter().copied(), power)
    }

    pub fn contains(&self, hole: usize) -> bool {
        self.holes.binary_search(&hole).is_ok()
    }

    pub fn max_hole(&self) -> usize {
        *self.holes.last().expect("nonempty")
    }

    /// Same curve, powers ignored.
    pub fn same_curve(&self, other: &ConvexTwist) -> bool {
        self.holes == other.holes
    }
}

impl fmt::Display for ConvexTwist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let holes: Vec<String> = self.holes.iter().map(usize::to_string).collect();
        write!(f, "twist {}", holes.join(","))?;
        if self.power != 1 {
            write!(f, " ^ {}", self.power)?;
        }
        Ok(())
    }
}

/// Whether the convex curves around `s` and `t` can be made disjoint: one set
/// contains the other, or they are disjoint and `t` lies in a single gap of `s`
/// along the circle.
pub fn curves_commute(s: &[usize], t: &[usize]) -> bool {
    let subset = |a: &[usize], b: &[usize]| a.iter().all(|x| b.binary_search(x).is_ok());
    if subset(s, t) || subset(t, s) {
        return true;
    }
    if s.iter().any(|x| t.binary_search(x).is_ok()) {
        return false;
    }
    let gap = |x: &usize| s.partition_point(|y| y < x) % s.len();
    let first = gap(&t[0]);
    t.iter().all(|x| gap(x) == first)
}

/// An ordered product of convex twists, leftmost applied first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Factorization {
    holes: usize,
    word: Vec<ConvexTwist>,
}

impl Factorization {
    pub fn new(holes: usize, word: Vec<ConvexTwist>) -> Result<Self> {
        HoledDisk::new(holes)?;
        if let Some(t) = word.iter().find(|t| t.max_hole() > holes) {
            return Err(Error::InvalidInput(format!(
                "{t} uses a hole beyond the {holes}-holed disk"
            )));
        }
        Ok(Factorization { holes, word })
    }

    /// A monodromy factorization: all powers positive.
    pub fn monodromy(holes: usize, word: Vec<ConvexTwist>) -> Result<Self> {
        let f = Self::new(holes, word)?;
        if !f.is_positive() {
            return Err(Error::InvalidInput(
                "monodromy factorizations use positive twists only".into(),
            ));
        }
        Ok(f)
    }

    pub fn holes(&self) -> usize {
        self.holes
    }

    pub fn surface(&self) -> HoledDisk {
        HoledDisk { n: self.holes }
    }

    pub fn word(&self) -> &[ConvexTwist] {
        &self.word
    }

    pub fn is_positive(&self) -> bool {
        self.word.iter().all(|t| t.power > 0)
    }

    /// Number of twists counted with multiplicity, `Σ |power|`.
    pub fn length(&self) -> u64 {
        self.word.iter().map(|t| t.power.unsigned_abs()).sum()
    }

    /// Same mapping class word, one twist per unit power.
    pub fn expanded(&self) -> Factorization {
        let word = self
            .word
            .iter()
            .flat_map(|t| {
                let unit = t.with_power(t.power.signum()).expect("nonzero");
                std::iter::repeat(unit).take(t.power.unsigned_abs() as usize)
            })
            .collect();
        Factorization {
            holes: self.holes,
            word,
        }
    }

    pub fn then(&self, other: &Factorization) -> Result<Factorization> {
        if self.holes != other.holes {
            return Err(Error::SurfaceMismatch {
                left: self.holes,
                right: other.holes,
            });
        }
        let mut word = self.word.clone();
        word.extend(other.word.iter().cloned());
        Ok(Factorization {
            holes: self.holes,
            word,
        })
    }

    /// The inverse mapping class: reversed word with inverted twists.
    pub fn inverse(&self) -> Factorization {
        Factorization {
            holes: self.holes,
            word: self.word.iter().rev().map(ConvexTwist::inverse).collect(),
        }
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "holes {}", self.holes)?;
        for t in &self.word {
            writeln!(f, "{t}")?;
        }
        Ok(())
    }
}

impl FromStr for Factorization {
    type Err = ParseError;

    /// Text format: optional `holes <n>` line, then one `twist 1,3,4 ^ 2` per
    /// line (the power is optional). `#` starts a comment. Without a `holes`
    /// line the surface has as many holes as the largest one mentioned.
    fn from_str(text: &str) -> std::result::Result<Self, ParseError> {
        let mut holes: Option<usize> = None;
        let mut word = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: String| ParseError::new(line_no, m);
            if let Some(rest) = line.strip_prefix("holes") {
                if holes.is_some() || !word.is_empty() {
                    return Err(err("`holes` must come once, before any twist".into()));
                }
                let n = rest
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| err(format!("bad hole count {:?}: {e}", rest.trim())))?;
                holes = Some(n);
                continue;
            }
            let Some(rest) = line.strip_prefix("twist") else {
                return Err(err(format!("expected `twist` or `holes`, found {line:?}")));
            };
            let (set, power) = match rest.split_once('^') {
                Some((s, p)) => {
                    let p = p
                        .trim()
                        .parse::<i64>()
                        .map_err(|e| err(format!("bad power {:?}: {e}", p.trim())))?;
                    (s, p)
                }
                None => (rest, 1),
            };
            let set: Vec<usize> = set
                .split(',')
                .map(|h| {
                    h.trim()
                        .parse::<usize>()
                        .map_err(|e| err(format!("bad hole {:?}: {e}", h.trim())))
                })
                .collect::<std::result::Result<_, _>>()?;
            let twist = ConvexTwist::new(set, power).map_err(|e| err(e.to_string()))?;
            word.push((line_no, twist));
        }
        let n = holes.unwrap_or_else(|| word.iter().map(|(_, t)| t.max_hole()).max().unwrap_or(1));
        if let Some((line_no, t)) = word.iter().find(|(_, t)| t.max_hole() > n) {
            return Err(ParseError::new(
                *line_no,
                format!("{t} uses a hole beyond the {n}-holed disk"),
            ));
        }
        Factorization::new(n, word.into_iter().map(|(_, t)| t).collect())
            .map_err(|e| ParseError::new(1, e.to_string()))
    }
}

/// Images of the `2n` free generators under a mapping class.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MappingClassNF {
    holes: usize,
    images: Vec<Word>,
}

impl MappingClassNF {
    pub fn identity(holes: usize) -> Self {
        MappingClassNF {
            holes,
            images: (1..=2 * holes as i32).map(|k| vec![k]).collect(),
        }
    }

    pub fn holes(&self) -> usize {
        self.holes
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.holes)
    }

    pub fn total_letters(&self) -> usize {
        self.images.iter().map(Vec::len).sum()
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &MappingClassNF) -> MappingClassNF {
        MappingClassNF {
            holes: self.holes,
            images: self
                .images
                .iter()
                .map(|w| free::substitute(w, &other.images))
                .collect(),
        }
    }

    /// `self` followed by a twist, rewriting only the letters the twist moves.
    fn then_twist(&self, twist: &ConvexTwist) -> MappingClassNF {
        let inside = doubled(twist);
        let conj: Vec<(Word, Word)> = conjugators(&inside)
            .into_iter()
            .map(|w| {
                let wp = free::power(&w, twist.power * TWIST_SIGN);
                let wm = free::inverse(&wp);
                (wp, wm)
            })
            .collect();
        let images = self
            .images
            .iter()
            .map(|img| {
                let mut out = Vec::with_capacity(img.len());
                for &l in img {
                    match inside.binary_search(&(l.unsigned_abs() as usize)) {
                        Ok(i) => {
                            free::extend_reduced(&mut out, &conj[i].0);
                            free::push_reduced(&mut out, l);
                            free::extend_reduced(&mut out, &conj[i].1);
                        }
                        Err(_) => free::push_reduced(&mut out, l),
                    }
                }
                out
            })
            .collect();
        MappingClassNF {
            holes: self.holes,
            images,
        }
    }
}

// A positive (right-handed) twist conjugates by `W^{-1}` in this basis.
const TWIST_SIGN: i64 = -1;

/// The loop around the convex curve through the punctures `inside`, based
/// along the arc of each inside puncture in turn.
///
/// The arc to each puncture leaves the base point clockwise and stays outside
/// the circle of holes, so seen from the base point the punctures read
/// `2n, …, 1` left to right and a consecutive block `a..=b` has loop
/// `x_a ⋯ x_b`. A convex curve passes over the skipped punctures on the far
/// side from the arcs, which is where the inverse letters come from.
fn conjugators(inside: &[usize]) -> Vec<Word> {
    let (a, b) = (inside[0], *inside.last().expect("nonempty"));
    let skipped = |p: &usize| inside.binary_search(p).is_err();
    inside
        .iter()
        .map(|&s| {
            let mut w = Vec::new();
            for p in (a + 1..s).rev().filter(skipped) {
                free::push_reduced(&mut w, -(p as i32));
            }
            for p in a..=b {
                free::push_reduced(&mut w, p as i32);
            }
            for p in (s + 1..b).rev().filter(skipped) {
                free::push_reduced(&mut w, -(p as i32));
            }
            w
        })
        .collect()
}

impl fmt::Display for MappingClassNF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, img) in self.images.iter().enumerate() {
            let letters: Vec<String> = img
                .iter()
                .map(|&l| {
                    if l > 0 {
                        format!("x{l}")
                    } else {
                        format!("X{}", -l)
                    }
                })
                .collect();
            writeln!(f, "x{} -> {}", k + 1, letters.join(" "))?;
        }
        Ok(())
    }
}

fn doubled(t: &ConvexTwist) -> Vec<usize> {
    t.holes.iter().flat_map(|&h| [2 * h - 1, 2 * h]).collect()
}

pub fn twist_automorphism(holes: usize, twist: &ConvexTwist) -> Result<MappingClassNF> {
    HoledDisk::new(holes)?;
    if twist.max_hole() > holes {
        return Err(Error::InvalidInput(format!(
            "{twist} uses a hole beyond the {holes}-holed disk"
        )));
    }
    let nf = MappingClassNF::identity(holes).then_twist(twist);
    debug_assert!(nf.then_twist(&twist.inverse()).is_identity());
    Ok(nf)
}

pub fn act(f: &Factorization) -> Result<MappingClassNF> {
    act_with_limit(f, DEFAULT_WORD_LIMIT)
}

pub fn act_with_limit(f: &Factorization, limit: usize) -> Result<MappingClassNF> {
    let mut nf = MappingClassNF::identity(f.holes);
    for t in &f.word {
        nf = nf.then_twist(t);
        let letters = nf.total_letters();
        if letters > limit {
            return Err(Error::WordLength { letters, limit });
        }
    }
    Ok(nf)
}

/// Entry `(i, j)` counts (with power) the twists whose curve encloses holes `i` and `j`.
pub fn linking_matrix(f: &Factorization) -> Vec<Vec<i64>> {
    let n = f.holes;
    let mut m = vec![vec![0i64; n]; n];
    for t in &f.word {
        for &i in &t.holes {
            for &j in &t.holes {
                m[i - 1][j - 1] += t.power;
            }
        }
    }
    m
}

/// Equality in the mapping class group.
pub fn equal(f: &Factorization, g: &Factorization) -> Result<bool> {
    equal_with_limit(f, g, DEFAULT_WORD_LIMIT)
}

pub fn equal_with_limit(f: &Factorization, g: &Factorization, limit: usize) -> Result<bool> {
    if f.holes != g.holes {
        return Err(Error::SurfaceMismatch {
            left: f.holes,
            right: g.holes,
        });
    }
    if linking_matrix(f) != linking_matrix(g) {
        return Ok(false);
    }
    Ok(act_with_limit(f, limit)? == act_with_limit(g, limit)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tw(holes: &[usize], p: i64) -> ConvexTwist {
        ConvexTwist::new(holes.iter().copied(), p).unwrap()
    }

    fn fact(n: usize, word: &[(&[usize], i64)]) -> Factorization {
        Factorization::new(n, word.iter().map(|(h, p)| tw(h, *p)).collect()).unwrap()
    }

    #[test]
    fn single_hole_twist_is_a_full_twist() {
        let nf = twist_automorphism(1, &tw(&[1], 1)).unwrap();
        assert_eq!(nf.images()[0], vec![-2, 1, 2]);
        assert_eq!(nf.images()[1], vec![-2, -1, 2, 1, 2]);
        assert!(!nf.is_identity());
    }

    #[test]
    fn powers_are_distinct() {
        for n in 1..=4 {
            for s in 1..(1usize << n) {
                let holes: Vec<usize> = (1..=n).filter(|h| s & (1 << (h - 1)) != 0).collect();
                let forms: Vec<MappingClassNF> = (-3..=3)
                    .filter(|&p| p != 0)
                    .map(|p| twist_automorphism(n, &tw(&holes, p)).unwrap())
                    .collect();
                for (i, a) in forms.iter().enumerate() {
                    assert!(!a.is_identity());
                    for b in &forms[i + 1..] {
                        assert_ne!(a, b);
                    }
                }
            }
        }
    }

    #[test]
    fn boundary_twist_is_central() {
        for n in 1..=5 {
            let all: Vec<usize> = (1..=n).collect();
            let d = fact(n, &[(&all, 1)]);
            for s in 1..(1usize << n) {
                let holes: Vec<usize> = (1..=n).filter(|h| s & (1 << (h - 1)) != 0).collect();
                let t = fact(n, &[(&holes, 1)]);
                assert!(equal(&d.then(&t).unwrap(), &t.then(&d).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn commutation_predicate_matches_the_action() {
        let n = 5;
        let subsets: Vec<Vec<usize>> = (1..(1usize << n))
            .map(|s| (1..=n).filter(|h| s & (1 << (h - 1)) != 0).collect())
            .collect();
        for s in &subsets {
            for t in &subsets {
                let a = fact(n, &[(s, 1), (t, 1)]);
                let b = fact(n, &[(t, 1), (s, 1)]);
                assert_eq!(curves_commute(s, t), equal(&a, &b).unwrap(), "{s:?} {t:?}");
            }
        }
        assert!(!curves_commute(&[1, 3], &[2, 4]));
        assert!(curves_commute(&[1, 4], &[2, 3]));
        assert!(curves_commute(&[2, 3], &[1, 4]));
    }

    #[test]
    fn inverse_word_cancels() {
        let f = fact(
            4,
            &[
                (&[1, 3], 2),
                (&[2, 3, 4], -1),
                (&[4], 1),
                (&[1, 2, 3, 4], 3),
            ],
        );
        assert!(act(&f.then(&f.inverse()).unwrap()).unwrap().is_identity());
        assert!(act(&fact(3, &[])).unwrap().is_identity());
    }

    #[test]
    fn distinct_linking_short_circuits() {
        let a = fact(2, &[(&[1], 1), (&[2], 1)]);
        let b = fact(2, &[(&[1, 2], 1)]);
        assert!(!equal(&a, &b).unwrap());
        assert_eq!(linking_matrix(&b), vec![vec![1, 1], vec![1, 1]]);
        assert!(matches!(
            equal(&a, &fact(3, &[])),
            Err(Error::SurfaceMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn word_guard() {
        let f = fact(3, &[(&[1, 2], 50), (&[2, 3], 50), (&[1, 3], 50)]);
        let err = act_with_limit(&f, 1000).unwrap_err();
        assert!(matches!(err, Error::WordLength { limit: 1000, .. }));
    }

    #[test]
    fn text_format() {
        let f: Factorization =
            "# lantern lhs\nholes 3\ntwist 1,2,3\ntwist 1\ntwist 2 ^ 1\ntwist 3 ^ -2\n"
                .parse()
                .unwrap();
        assert_eq!(f.holes(), 3);
        assert_eq!(f.word()[3], tw(&[3], -2));
        assert_eq!(f.to_string().parse::<Factorization>().unwrap(), f);
        let implicit: Factorization = "twist 1,4".parse().unwrap();
        assert_eq!(implicit.holes(), 4);
        let err = "holes 2\ntwist 1,3\n".parse::<Factorization>().unwrap_err();
        assert_eq!(err.line, 2);
        let err = "twist 1\nrotate 2\n".parse::<Factorization>().unwrap_err();
        assert_eq!(err.line, 2);
        assert!("twist 1 ^ 0".parse::<Factorization>().is_err());
        assert!("twist".parse::<Factorization>().is_err());
    }

    fn arb_fact(n: usize) -> impl Strategy<Value = Factorization> {
        let twist = (1usize..(1 << n), prop_oneof![Just(1i64), Just(-1), Just(2)]).prop_map(
            move |(s, p)| ConvexTwist::new((1..=n).filter(|h| s & (1 << (h - 1)) != 0), p).unwrap(),
        );
        prop::collection::vec(twist, 0..6).prop_map(move |w| Factorization::new(n, w).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

        #[test]
        fn composition_is_associative(f in arb_fact(3), g in arb_fact(3), h in arb_fact(3)) {
            let (a, b, c) = (act(&f).unwrap(), act(&g).unwrap(), act(&h).unwrap());
            prop_assert_eq!(a.then(&b).then(&c), a.then(&b.then(&c)));
            prop_assert_eq!(act(&f.then(&g).unwrap()).unwrap(), a.then(&b));
        }

        #[test]
        fn equal_implies_same_linking(f in arb_fact(3), g in arb_fact(3), t in arb_fact(3)) {
            if equal(&f, &g).unwrap() {
                prop_assert_eq!(linking_matrix(&f), linking_matrix(&g));
            }
            prop_assert!(equal(&f, &f).unwrap());
            let ft = f.then(&t).unwrap();
            let fe = f.expanded().then(&t).unwrap();
            prop_assert!(equal(&ft, &fe).unwrap());
        }
    }
}
