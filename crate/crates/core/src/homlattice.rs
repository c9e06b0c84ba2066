//! Second homology of a blown-up projective plane.
//!
//! A class is `d·h + Σ c_l·e_l` where `h` is the line class (`h·h = 1`) and the
//! `e_l` are exceptional classes (`e_l·e_l = -1`), pairwise orthogonal. The
//! first Chern class of the standard symplectic form is `3h - Σ e_l`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::ParseError;

/// Name of an exceptional class.
///
/// Ordering is total: plain indices sort before index pairs, which sort before
/// free-form names.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExcLabel {
    Index(u64),
    Pair(u64, u64),
    Name(String),
}

impl fmt::Display for ExcLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExcLabel::Index(i) => write!(f, "e{i}"),
            ExcLabel::Pair(i, j) => write!(f, "e({i},{j})"),
            ExcLabel::Name(s) => write!(f, "e[{s}]"),
        }
    }
}

impl From<u64> for ExcLabel {
    fn from(i: u64) -> Self {
        ExcLabel::Index(i)
    }
}

/// An element of `H_2(CP^2 # N(-CP^2))`. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeClass {
    h: BigInt,
    exc: BTreeMap<ExcLabel, BigInt>,
}

impl LatticeClass {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The line class `h`.
    pub fn line() -> Self {
        LatticeClass {
            h: BigInt::one(),
            exc: BTreeMap::new(),
        }
    }

    pub fn exceptional(label: impl Into<ExcLabel>) -> Self {
        let mut exc = BTreeMap::new();
        exc.insert(label.into(), BigInt::one());
        LatticeClass {
            h: BigInt::zero(),
            exc,
        }
    }

    /// Builds `h_coeff·h + Σ c·e_label` from small integers. Repeated labels add up.
    pub fn from_coeffs<L, I>(h_coeff: i64, terms: I) -> Self
    where
        L: Into<ExcLabel>,
        I: IntoIterator<Item = (L, i64)>,
    {
        let mut class = LatticeClass {
            h: BigInt::from(h_coeff),
            exc: BTreeMap::new(),
        };
        for (label, c) in terms {
            class.add_exc(label.into(), BigInt::from(c));
        }
        class
    }

    pub fn h(&self) -> &BigInt {
        &self.h
    }

    pub fn coeff(&self, label: &ExcLabel) -> BigInt {
        self.exc.get(label).cloned().unwrap_or_default()
    }

    /// Nonzero exceptional coefficients in label order.
    pub fn exceptional_terms(&self) -> impl Iterator<Item = (&ExcLabel, &BigInt)> {
        self.exc.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &ExcLabel> {
        self.exc.keys()
    }

    pub fn is_zero(&self) -> bool {
        self.h.is_zero() && self.exc.is_empty()
    }

    pub fn set_h(&mut self, h: BigInt) {
        self.h = h;
    }

    pub fn add_exc(&mut self, label: ExcLabel, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.exc.entry(label.clone()).or_default();
        *entry += c;
        if entry.is_zero() {
            self.exc.remove(&label);
        }
    }

    /// Applies a relabeling of exceptional classes. Labels mapped together add.
    pub fn relabel(&self, f: impl Fn(&ExcLabel) -> ExcLabel) -> Self {
        let mut out = LatticeClass {
            h: self.h.clone(),
            exc: BTreeMap::new(),
        };
        for (l, c) in &self.exc {
            out.add_exc(f(l), c.clone());
        }
        out
    }

    pub fn self_intersection(&self) -> BigInt {
        pairing(self, self)
    }

    pub fn c1_pairing(&self) -> BigInt {
        c1_pairing(self)
    }

    pub fn adjunction_defect(&self) -> BigInt {
        adjunction_defect(self)
    }
}

/// Intersection form `diag(+1, -1, …, -1)`.
pub fn pairing(x: &LatticeClass, y: &LatticeClass) -> BigInt {
    let (small, large) = if x.exc.len() <= y.exc.len() {
        (x, y)
    } else {
        (y, x)
    };
    let mut total = &x.h * &y.h;
    for (l, c) in &small.exc {
        if let Some(d) = large.exc.get(l) {
            total -= c * d;
        }
    }
    total
}

pub fn self_intersection(x: &LatticeClass) -> BigInt {
    pairing(x, x)
}

/// Evaluation of `c_1 = 3h - Σ e_l`, i.e. `3·d + Σ c_l` for `x = d·h + Σ c_l·e_l`.
pub fn c1_pairing(x: &LatticeClass) -> BigInt {
    let mut total = BigInt::from(3) * &x.h;
    for c in x.exc.values() {
        total += c;
    }
    total
}

/// `⟨c_1, x⟩ - x·x - 2`; zero for the class of an embedded symplectic sphere.
pub fn adjunction_defect(x: &LatticeClass) -> BigInt {
    c1_pairing(x) - self_intersection(x) - BigInt::from(2)
}

impl Add for &LatticeClass {
    type Output = LatticeClass;
    fn add(self, rhs: &LatticeClass) -> LatticeClass {
        let mut out = self.clone();
        out.h += &rhs.h;
        for (l, c) in &rhs.exc {
            out.add_exc(l.clone(), c.clone());
        }
        out
    }
}

impl Neg for &LatticeClass {
    type Output = LatticeClass;
    fn neg(self) -> LatticeClass {
        LatticeClass {
            h: -&self.h,
            exc: self.exc.iter().map(|(l, c)| (l.clone(), -c)).collect(),
        }
    }
}

impl Sub for &LatticeClass {
    type Output = LatticeClass;
    fn sub(self, rhs: &LatticeClass) -> LatticeClass {
        self + &(-rhs)
    }
}

impl Mul<&LatticeClass> for &BigInt {
    type Output = LatticeClass;
    fn mul(self, rhs: &LatticeClass) -> LatticeClass {
        if self.is_zero() {
            return LatticeClass::zero();
        }
        LatticeClass {
            h: self * &rhs.h,
            exc: rhs.exc.iter().map(|(l, c)| (l.clone(), self * c)).collect(),
        }
    }
}

impl fmt::Display for LatticeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        let mut term = |f: &mut fmt::Formatter<'_>, c: &BigInt, sym: &dyn fmt::Display| {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            if mag.is_one() {
                write!(f, "{sym}")
            } else {
                write!(f, "{mag}{sym}")
            }
        };
        if !self.h.is_zero() {
            term(f, &self.h, &"h")?;
        }
        for (l, c) in &self.exc {
            term(f, c, l)?;
        }
        Ok(())
    }
}

impl FromStr for LatticeClass {
    type Err = ParseError;

    /// Parses the rendering produced by `Display`, e.g. `h - e1 - e(2,3)`.
    /// Whitespace is insignificant.
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let compact: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = |m: String| ParseError::new(1, m);
        if compact.is_empty() {
            return Err(err("empty class".into()));
        }
        if compact == ['0'] {
            return Ok(LatticeClass::zero());
        }
        let mut out = LatticeClass::zero();
        let mut i = 0;
        while i < compact.len() {
            let mut sign = BigInt::one();
            match compact[i] {
                '+' => i += 1,
                '-' => {
                    sign = -sign;
                    i += 1
                }
                _ if i > 0 => return Err(err(format!("expected '+' or '-' at offset {i}"))),
                _ => {}
            }
            let start = i;
            while i < compact.len() && compact[i].is_ascii_digit() {
                i += 1;
            }
            let coeff = if i > start {
                let digits: String = compact[start..i].iter().collect();
                digits
                    .parse::<BigInt>()
                    .map_err(|e| err(format!("bad coefficient {digits:?}: {e}")))?
            } else {
                BigInt::one()
            };
            let coeff = sign * coeff;
            match compact.get(i) {
                Some('h') => {
                    i += 1;
                    out.h += coeff;
                }
                Some('e') => {
                    i += 1;
                    let (label, next) = parse_label(&compact, i).map_err(err)?;
                    i = next;
                    out.add_exc(label, coeff);
                }
                Some(c) => return Err(err(format!("unexpected {c:?} at offset {i}"))),
                None => return Err(err("dangling coefficient".into())),
            }
        }
        Ok(out)
    }
}

fn parse_u64(chars: &[char], mut i: usize) -> Result<(u64, usize), String> {
    let start = i;
    while i < chars.len() && chars[i].is_ascii_digit() {
        i += 1;
    }
    if i == start {
        return Err(format!("expected a number at offset {start}"));
    }
    let digits: String = chars[start..i].iter().collect();
    digits
        .parse()
        .map(|v| (v, i))
        .map_err(|e| format!("bad label index {digits:?}: {e}"))
}

fn parse_label(chars: &[char], i: usize) -> Result<(ExcLabel, usize), String> {
    match chars.get(i) {
        Some('(') => {
            let (a, j) = parse_u64(chars, i + 1)?;
            if chars.get(j) != Some(&',') {
                return Err(format!("expected ',' at offset {j}"));
            }
            let (b, k) = parse_u64(chars, j + 1)?;
            if chars.get(k) != Some(&')') {
                return Err(format!("expected ')' at offset {k}"));
            }
            Ok((ExcLabel::Pair(a, b), k + 1))
        }
        Some('[') => {
            let close = chars[i..]
                .iter()
                .position(|&c| c == ']')
                .ok_or_else(|| "unterminated label name".to_string())?;
            let name: String = chars[i + 1..i + close].iter().collect();
            if name.is_empty() {
                return Err("empty label name".into());
            }
            Ok((ExcLabel::Name(name), i + close + 1))
        }
        _ => {
            let (a, j) = parse_u64(chars, i)?;
            Ok((ExcLabel::Index(a), j))
        }
    }
}
