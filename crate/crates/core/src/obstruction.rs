//! Rational blow-down candidates and the divisibility obstruction for
//! replacing `P_{a,b}` by its alternate filling in a single blow-down.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::Serialize;

use crate::dualize::{hj_expand, hj_value};
use crate::error::{Error, ParseError, Result};
use crate::plumbing::{make_p, LinearChain};

/// Which edge at the (-1) vertex the next blow-up uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ParkSide {
    /// Counterclockwise edge.
    L,
    /// Clockwise edge.
    R,
}

/// Parses strings such as `LRRL` (case-insensitive). The empty string is the base case.
pub fn parse_sides(s: &str) -> std::result::Result<Vec<ParkSide>, ParseError> {
    s.trim()
        .chars()
        .enumerate()
        .map(|(i, c)| match c.to_ascii_uppercase() {
            'L' => Ok(ParkSide::L),
            'R' => Ok(ParkSide::R),
            other => Err(ParseError::new(
                1,
                format!("expected L or R at offset {i}, found {other:?}"),
            )),
        })
        .collect()
}

/// Run lengths `(m_1, …, m_n)` of a sides sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ParkDescriptor {
    m: Vec<u64>,
}

impl ParkDescriptor {
    pub fn new(m: Vec<u64>) -> Result<Self> {
        if m.is_empty() || m.contains(&0) {
            return Err(Error::InvalidInput(format!(
                "run lengths must be a nonempty list of positive integers, got {m:?}"
            )));
        }
        Ok(ParkDescriptor { m })
    }

    /// Maximal runs of equal sides. `None` for the empty sequence.
    pub fn from_sides(sides: &[ParkSide]) -> Option<Self> {
        let mut m: Vec<u64> = Vec::new();
        let mut prev = None;
        for &s in sides {
            if prev == Some(s) {
                *m.last_mut().unwrap() += 1;
            } else {
                m.push(1);
            }
            prev = Some(s);
        }
        (!m.is_empty()).then_some(ParkDescriptor { m })
    }

    pub fn runs(&self) -> &[u64] {
        &self.m
    }

    /// Sides starting on the counterclockwise edge.
    pub fn sides(&self) -> Vec<ParkSide> {
        let mut out = Vec::new();
        for (i, &len) in self.m.iter().enumerate() {
            let s = if i % 2 == 0 { ParkSide::L } else { ParkSide::R };
            out.extend(std::iter::repeat(s).take(len as usize));
        }
        out
    }

    /// `-4-m_1, -2-m_2, …, -2-m_n` padded with (-2)'s, sorted ascending.
    pub fn weight_multiset(&self) -> Vec<i64> {
        let total: u64 = self.m.iter().sum();
        let mut w: Vec<i64> = self
            .m
            .iter()
            .enumerate()
            .map(|(i, &m)| if i == 0 { -4 - m as i64 } else { -2 - m as i64 })
            .collect();
        w.extend(std::iter::repeat(-2).take(1 + total as usize - self.m.len()));
        w.sort_unstable();
        w
    }
}

/// Chain obtained from the cyclic graph `(-4) = (-1)` by blowing up along the
/// chosen edges at the (-1) vertex and then deleting it.
pub fn park_chain_recursive(sides: &[ParkSide]) -> LinearChain {
    // the cycle read from the (-1) vertex's L-neighbour round to its R-neighbour
    let mut cycle: Vec<i64> = vec![-4];
    for s in sides {
        match s {
            ParkSide::L => {
                cycle[0] -= 1;
                cycle.push(-2);
            }
            ParkSide::R => {
                *cycle.last_mut().unwrap() -= 1;
                cycle.insert(0, -2);
            }
        }
    }
    LinearChain::new(cycle).expect("nonempty chain")
}

/// The chain with continued fraction `p^2/(pq-1)`.
pub fn park_chain_fraction(p: i64, q: i64) -> Result<LinearChain> {
    if !(p >= 2 && p > q && q >= 1 && p.gcd(&q) == 1) {
        return Err(Error::InvalidInput(format!(
            "need p > q >= 1, p >= 2, gcd(p,q) = 1; got p={p}, q={q}"
        )));
    }
    let p2 = p
        .checked_mul(p)
        .ok_or_else(|| Error::InvalidInput("p too large".into()))?;
    LinearChain::new(hj_expand(p2, p * q - 1)?.to_weights())
}

/// `(p, q)` with `p^2/(pq-1)` equal to the chain's continued fraction, if any.
pub fn park_parameters(chain: &LinearChain) -> Option<(i64, i64)> {
    let entries: Vec<i64> = chain.weights().iter().map(|w| -w).collect();
    if entries.iter().any(|&a| a < 2) {
        return None;
    }
    let (num, den) = hj_value(&entries);
    let p = (num as f64).sqrt().round() as i64;
    let p = (p - 1..=p + 1).find(|&r| r >= 2 && r * r == num)?;
    if (den + 1) % p != 0 {
        return None;
    }
    let q = (den + 1) / p;
    (q >= 1 && q < p && p.gcd(&q) == 1).then_some((p, q))
}

/// Whether `a + b` divides `ab + 1`.
pub fn divisibility_criterion(a: i64, b: i64) -> bool {
    (a * b + 1) % (a + b) == 0
}

/// Whether every weight `w` has `w + 2` divisible by `modulus`; a sphere of
/// square `w` can only sit in `P_{a,b}` when this holds for `modulus = a + b`.
pub fn weight_filter(weights: &[i64], modulus: i64) -> Result<bool> {
    if modulus < 4 {
        return Err(Error::InvalidInput(format!(
            "modulus must be at least 4, got {modulus}"
        )));
    }
    Ok(weights.iter().all(|w| (w + 2) % modulus == 0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Outcome {
    RuledOut,
    Inconclusive,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::RuledOut => "RuledOut",
            Outcome::Inconclusive => "Inconclusive",
        })
    }
}

impl FromStr for Outcome {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "RuledOut" => Ok(Outcome::RuledOut),
            "Inconclusive" => Ok(Outcome::Inconclusive),
            _ => Err(Error::InvalidInput(format!("unknown outcome {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub a: i64,
    pub b: i64,
    pub outcome: Outcome,
    pub certificate: Vec<String>,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict (a={}, b={}): {}", self.a, self.b, self.outcome)?;
        for line in &self.certificate {
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

/// Decides whether a single rational blow-down can turn `P_{a,b}` into its
/// alternate filling, using only necessary conditions. `RuledOut` is a proof;
/// `Inconclusive` only means the filters do not apply.
pub fn single_blowdown_verdict(a: i64, b: i64) -> Result<Verdict> {
    let p = make_p(a, b)?;
    let modulus = a + b;
    let chi_p = p.euler_characteristic();
    let chi_alt = a * b - a - b + 2;
    let size = chi_p - chi_alt;
    let mut cert = vec![
        format!("chi(P) = {chi_p}, chi(alternate) = {chi_alt}: the blown-down graph has {size} = ab vertices"),
        format!("every sphere S in P_(a,b) has [S]^2 + 2 divisible by a+b = {modulus}"),
    ];

    for w in [-3, -4] {
        let passes = weight_filter(&[w], modulus)?;
        cert.push(format!(
            "star families with a ({w}) sphere: {}",
            if passes {
                "not excluded"
            } else {
                "excluded, (w+2) is not divisible by a+b"
            }
        ));
        debug_assert!(!passes);
    }

    let six_passes = weight_filter(&[-6], modulus)?;
    let six_size_ok = size >= 5;
    let six = match (six_passes, six_size_ok) {
        (false, _) => "excluded, -6+2 = -4 is not divisible by a+b".to_string(),
        (true, false) => format!("excluded, needs 5+q = {size} vertices with q >= 0"),
        (true, true) => "not excluded".to_string(),
    };
    cert.push(format!(
        "star family with a (-6) sphere and 5+q vertices: {six}"
    ));

    let linear_excluded = !divisibility_criterion(a, b);
    let outcome = if linear_excluded && !(six_passes && six_size_ok) {
        cert.push(format!(
            "linear family (-4-m_1, -2-m_2, ..., -2-m_n, -2...): 1 + sum m_j = {size} and a+b divides 2 + sum m_j = ab+1 = {}; but {} mod {modulus} = {}, excluded",
            a * b + 1,
            a * b + 1,
            (a * b + 1) % modulus
        ));
        Outcome::RuledOut
    } else {
        cert.push(format!(
            "linear family not excluded: ab+1 = {} = {} * {modulus}",
            a * b + 1,
            (a * b + 1) / modulus
        ));
        Outcome::Inconclusive
    };
    Ok(Verdict {
        a,
        b,
        outcome,
        certificate: cert,
    })
}
