//! Weighted star-shaped and linear plumbing graphs.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};

/// Which side of the contact boundary a star graph describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Convex side; the star surgery cuts this piece out.
    Filling,
    /// Concave cap with central weight +1.
    Cap,
}

/// Address of a vertex in a star graph. The center is `(0, 0)`; arm vertices
/// use 1-based arm indices and depth `>= 1`, depth 1 being adjacent to the center.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub arm: usize,
    pub depth: usize,
}

impl Vertex {
    pub const CENTER: Vertex = Vertex { arm: 0, depth: 0 };

    pub fn new(arm: usize, depth: usize) -> Self {
        Vertex { arm, depth }
    }

    pub fn is_center(&self) -> bool {
        self.depth == 0
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vertex({},{})", self.arm, self.depth)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StarPlumbing {
    center_weight: i64,
    arms: Vec<Vec<i64>>,
}

impl StarPlumbing {
    pub fn new(center_weight: i64, arms: Vec<Vec<i64>>) -> Result<Self> {
        if let Some(i) = arms.iter().position(|a| a.is_empty()) {
            return Err(Error::InvalidInput(format!("arm {} is empty", i + 1)));
        }
        Ok(StarPlumbing {
            center_weight,
            arms,
        })
    }

    /// A cap-side star: central weight +1.
    pub fn cap(arms: Vec<Vec<i64>>) -> Result<Self> {
        Self::new(1, arms)
    }

    pub fn center_weight(&self) -> i64 {
        self.center_weight
    }

    pub fn arms(&self) -> &[Vec<i64>] {
        &self.arms
    }

    pub fn arm_count(&self) -> usize {
        self.arms.len()
    }

    pub fn side(&self) -> Side {
        if self.center_weight == 1 {
            Side::Cap
        } else {
            Side::Filling
        }
    }

    pub fn vertex_count(&self) -> usize {
        1 + self.arms.iter().map(Vec::len).sum::<usize>()
    }

    /// Center first, then each arm in order, outward.
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut out = Vec::with_capacity(self.vertex_count());
        out.push(Vertex::CENTER);
        for (j, arm) in self.arms.iter().enumerate() {
            out.extend((1..=arm.len()).map(|i| Vertex::new(j + 1, i)));
        }
        out
    }

    /// All weights in [`vertices`](Self::vertices) order.
    pub fn weights(&self) -> Vec<i64> {
        std::iter::once(self.center_weight)
            .chain(self.arms.iter().flatten().copied())
            .collect()
    }

    pub fn weight(&self, v: Vertex) -> Option<i64> {
        if v.is_center() {
            return Some(self.center_weight);
        }
        self.arms
            .get(v.arm.checked_sub(1)?)?
            .get(v.depth - 1)
            .copied()
    }

    pub fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        if u.is_center() || v.is_center() {
            let other = if u.is_center() { v } else { u };
            return !other.is_center() && other.depth == 1;
        }
        u.arm == v.arm && u.depth.abs_diff(v.depth) == 1
    }

    /// Symmetric matrix with the weights on the diagonal and 1 on edges, in
    /// [`vertices`](Self::vertices) order.
    pub fn intersection_matrix(&self) -> Vec<Vec<i64>> {
        let vs = self.vertices();
        vs.iter()
            .map(|&u| {
                vs.iter()
                    .map(|&v| {
                        if u == v {
                            self.weight(u).unwrap()
                        } else {
                            i64::from(self.adjacent(u, v))
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// `e_0 <= -k - 1` and every arm weight `<= -2`.
    pub fn is_dually_positive(&self) -> Result<bool> {
        if self.side() == Side::Cap {
            return Err(Error::WrongSide {
                expected: "filling-side",
            });
        }
        let k = self.arms.len() as i64;
        Ok(self.center_weight <= -k - 1 && self.arms.iter().flatten().all(|&w| w <= -2))
    }

    pub(crate) fn require_dually_positive(&self) -> Result<()> {
        if self.is_dually_positive()? {
            Ok(())
        } else {
            Err(Error::NotDuallyPositive(
                self.to_string().trim_end().replace('\n', "; "),
            ))
        }
    }

    /// Euler characteristic of the plumbed 4-manifold: `1 + #vertices`.
    pub fn euler_characteristic(&self) -> i64 {
        1 + self.vertex_count() as i64
    }

    pub fn is_negative_definite(&self) -> bool {
        is_negative_definite(&self.intersection_matrix())
    }

    /// Arms sorted, so two stars are isomorphic as weighted graphs exactly when
    /// their canonical forms are equal.
    pub fn canonical(&self) -> StarPlumbing {
        let mut arms = self.arms.clone();
        arms.sort();
        StarPlumbing {
            center_weight: self.center_weight,
            arms,
        }
    }

    pub fn is_isomorphic(&self, other: &StarPlumbing) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn with_arms_permuted(&self, order: &[usize]) -> Result<StarPlumbing> {
        let mut seen = vec![false; self.arms.len()];
        if order.len() != self.arms.len() {
            return Err(Error::InvalidInput(
                "arm permutation has wrong length".into(),
            ));
        }
        for &i in order {
            if i >= seen.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidInput("not a permutation of the arms".into()));
            }
        }
        Ok(StarPlumbing {
            center_weight: self.center_weight,
            arms: order.iter().map(|&i| self.arms[i].clone()).collect(),
        })
    }
}

/// The filling graph `Γ_{a,b}`: center `-(a+b+2)`, `a` arms of `b-1` (-2)'s and
/// `b` arms of `a-1` (-2)'s.
pub fn make_p(a: i64, b: i64) -> Result<StarPlumbing> {
    check_family(a, b)?;
    let mut arms = Vec::new();
    arms.extend((0..a).map(|_| vec![-2; (b - 1) as usize]));
    arms.extend((0..b).map(|_| vec![-2; (a - 1) as usize]));
    StarPlumbing::new(-(a + b + 2), arms)
}

/// The cap graph `DΓ_{a,b}`: center +1 with `a` leaves of weight `-b`, one (-1)
/// leaf, then `b` leaves of weight `-a`.
pub fn make_dgamma(a: i64, b: i64) -> Result<StarPlumbing> {
    check_family(a, b)?;
    let mut arms = Vec::new();
    arms.extend((0..a).map(|_| vec![-b]));
    arms.push(vec![-1]);
    arms.extend((0..b).map(|_| vec![-a]));
    StarPlumbing::cap(arms)
}

fn check_family(a: i64, b: i64) -> Result<()> {
    if a < 2 || b < 2 {
        return Err(Error::InvalidInput(format!(
            "family parameters must be >= 2, got a={a}, b={b}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinearChain {
    weights: Vec<i64>,
}

impl LinearChain {
    pub fn new(weights: Vec<i64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidInput("a linear chain needs a vertex".into()));
        }
        Ok(LinearChain { weights })
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn reversed(&self) -> LinearChain {
        let mut w = self.weights.clone();
        w.reverse();
        LinearChain { weights: w }
    }

    pub fn intersection_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.weights.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            self.weights[i]
                        } else {
                            i64::from(i.abs_diff(j) == 1)
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn is_negative_definite(&self) -> bool {
        is_negative_definite(&self.intersection_matrix())
    }
}

impl fmt::Display for LinearChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chain")?;
        for w in &self.weights {
            write!(f, " {w}")?;
        }
        Ok(())
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination with row pivoting.
pub fn determinant(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = 1i32;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[k][k] * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Leading principal minors `D_1, …, D_n`.
pub fn leading_minors(m: &[Vec<i64>]) -> Vec<BigInt> {
    (1..=m.len())
        .map(|k| {
            let sub: Vec<Vec<BigInt>> = m[..k]
                .iter()
                .map(|row| row[..k].iter().map(|&x| BigInt::from(x)).collect())
                .collect();
            determinant(&sub)
        })
        .collect()
}

/// Sylvester's criterion for negative definiteness: `(-1)^k D_k > 0`.
pub fn is_negative_definite(m: &[Vec<i64>]) -> bool {
    leading_minors(m).iter().enumerate().all(|(i, d)| {
        if i % 2 == 0 {
            d.is_negative()
        } else {
            d.is_positive()
        }
    })
}

impl fmt::Display for StarPlumbing {
    /// Renders the graph DSL.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "center {}", self.center_weight)?;
        for arm in &self.arms {
            write!(f, "arm")?;
            for w in arm {
                write!(f, " {w}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// One item of a graph DSL document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphItem {
    Star(StarPlumbing),
    Chain(LinearChain),
}

fn parse_weights<'a>(
    line_no: usize,
    tokens: impl Iterator<Item = &'a str>,
) -> std::result::Result<Vec<i64>, ParseError> {
    tokens
        .map(|t| {
            t.parse::<i64>()
                .map_err(|_| ParseError::new(line_no, format!("malformed weight {t:?}")))
        })
        .collect()
}

/// Parses a graph DSL document: a `center <w>` line opens a star graph and
/// following `arm <w1> <w2> ...` lines attach arms to it; `chain <w1> ...`
/// lines stand alone. `#` starts a comment.
pub fn parse_document(text: &str) -> std::result::Result<Vec<GraphItem>, ParseError> {
    let mut items = Vec::new();
    let mut current: Option<(i64, Vec<Vec<i64>>)> = None;
    let flush = |current: &mut Option<(i64, Vec<Vec<i64>>)>, items: &mut Vec<GraphItem>| {
        if let Some((c, arms)) = current.take() {
            items.push(GraphItem::Star(StarPlumbing {
                center_weight: c,
                arms,
            }));
        }
    };
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let keyword = tokens.next().unwrap();
        match keyword {
            "center" => {
                let ws = parse_weights(line_no, tokens)?;
                if ws.len() != 1 {
                    return Err(ParseError::new(line_no, "center takes exactly one weight"));
                }
                flush(&mut current, &mut items);
                current = Some((ws[0], Vec::new()));
            }
            "arm" => {
                let ws = parse_weights(line_no, tokens)?;
                if ws.is_empty() {
                    return Err(ParseError::new(line_no, "arm needs at least one weight"));
                }
                match current.as_mut() {
                    Some((_, arms)) => arms.push(ws),
                    None => return Err(ParseError::new(line_no, "arm before any center line")),
                }
            }
            "chain" => {
                let ws = parse_weights(line_no, tokens)?;
                if ws.is_empty() {
                    return Err(ParseError::new(line_no, "chain needs at least one weight"));
                }
                flush(&mut current, &mut items);
                items.push(GraphItem::Chain(LinearChain { weights: ws }));
            }
            other => {
                return Err(ParseError::new(
                    line_no,
                    format!("unknown keyword {other:?}"),
                ));
            }
        }
    }
    flush(&mut current, &mut items);
    Ok(items)
}

/// All star graphs in a DSL document; chains are rejected.
pub fn parse_graphs(text: &str) -> std::result::Result<Vec<StarPlumbing>, ParseError> {
    let mut out = Vec::new();
    for item in parse_document(text)? {
        match item {
            GraphItem::Star(g) => out.push(g),
            GraphItem::Chain(_) => {
                return Err(ParseError::new(0, "expected star graphs, found a chain"))
            }
        }
    }
    Ok(out)
}

/// Exactly one star graph.
pub fn parse_graph(text: &str) -> std::result::Result<StarPlumbing, ParseError> {
    let mut gs = parse_graphs(text)?;
    match gs.len() {
        1 => Ok(gs.pop().unwrap()),
        n => Err(ParseError::new(0, format!("expected one graph, found {n}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn star(c: i64, arms: &[&[i64]]) -> StarPlumbing {
        StarPlumbing::new(c, arms.iter().map(|a| a.to_vec()).collect()).unwrap()
    }

    #[test]
    fn dual_positivity() {
        assert!(star(-5, &[&[-2], &[-2], &[-2]])
            .is_dually_positive()
            .unwrap());
        assert!(!star(-4, &[&[-2], &[-2], &[-2], &[-2]])
            .is_dually_positive()
            .unwrap());
        assert!(!star(-5, &[&[-2, -1]]).is_dually_positive().unwrap());
        assert!(make_p(2, 2).unwrap().is_dually_positive().unwrap());
        assert!(matches!(
            make_dgamma(2, 2).unwrap().is_dually_positive(),
            Err(Error::WrongSide { .. })
        ));
        for a in 2..=6 {
            for b in 2..=6 {
                assert!(make_p(a, b).unwrap().is_dually_positive().unwrap());
            }
        }
    }

    #[test]
    fn euler_characteristics() {
        assert_eq!(make_p(2, 2).unwrap().euler_characteristic(), 6);
        assert_eq!(make_p(2, 3).unwrap().euler_characteristic(), 9);
        assert_eq!(make_p(3, 2).unwrap().euler_characteristic(), 9);
        assert_eq!(star(-1, &[]).euler_characteristic(), 2);
        for a in 2..=6 {
            for b in 2..=6 {
                let p = make_p(a, b).unwrap();
                assert_eq!(p.euler_characteristic(), 2 * a * b - a - b + 2);
                assert_eq!(p.vertex_count() as i64, a * (b - 1) + b * (a - 1) + 1);
            }
        }
    }

    #[test]
    fn p_family_shape() {
        let p = make_p(2, 2).unwrap();
        assert_eq!(p.center_weight(), -6);
        assert_eq!(p.arms(), &[vec![-2], vec![-2], vec![-2], vec![-2]]);
        assert!(make_p(1, 3).is_err());
        assert!(make_dgamma(2, 1).is_err());
    }

    #[test]
    fn dgamma_shape() {
        let d = make_dgamma(2, 2).unwrap();
        let leaves: Vec<i64> = d.arms().iter().map(|a| a[0]).collect();
        assert_eq!(leaves, vec![-2, -2, -1, -2, -2]);
        let d = make_dgamma(2, 3).unwrap();
        let leaves: Vec<i64> = d.arms().iter().map(|a| a[0]).collect();
        assert_eq!(leaves, vec![-3, -3, -1, -2, -2, -2]);
        assert_eq!(d.side(), Side::Cap);
        for a in 2..=6 {
            for b in 2..=6 {
                assert_eq!(make_dgamma(a, b).unwrap().vertex_count() as i64, a + b + 2);
            }
        }
    }

    #[test]
    fn matrices() {
        assert_eq!(star(-4, &[]).intersection_matrix(), vec![vec![-4]]);
        let c = LinearChain::new(vec![-2, -2]).unwrap();
        assert_eq!(c.intersection_matrix(), vec![vec![-2, 1], vec![1, -2]]);
        let m = make_dgamma(2, 2).unwrap().intersection_matrix();
        assert_eq!(m[0].iter().skip(1).filter(|&&x| x == 1).count(), 5);
        let g = star(-3, &[&[-2, -3]]);
        assert_eq!(
            g.intersection_matrix(),
            vec![vec![-3, 1, 0], vec![1, -2, 1], vec![0, 1, -3]]
        );
    }

    #[test]
    fn negative_definiteness() {
        let chain = |w: &[i64]| LinearChain::new(w.to_vec()).unwrap();
        assert!(chain(&[-2]).is_negative_definite());
        assert!(chain(&[-1]).is_negative_definite());
        assert!(!chain(&[0]).is_negative_definite());
        assert!(chain(&[-5, -2]).is_negative_definite());
        assert_eq!(
            leading_minors(&chain(&[-5, -2]).intersection_matrix()),
            vec![BigInt::from(-5), BigInt::from(9)]
        );
        assert!(!chain(&[-1, -1]).is_negative_definite());
        assert!(!make_dgamma(2, 2).unwrap().is_negative_definite());
        for a in 2..=6 {
            for b in 2..=6 {
                assert!(make_p(a, b).unwrap().is_negative_definite());
            }
        }
    }

    #[test]
    fn determinant_needs_pivoting() {
        let m = vec![
            vec![BigInt::from(0), BigInt::from(1)],
            vec![BigInt::from(1), BigInt::from(0)],
        ];
        assert_eq!(determinant(&m), BigInt::from(-1));
    }

    #[test]
    fn dsl_parse_and_errors() {
        let text = "# P_{2,2}\ncenter -6\narm -2\narm -2 # inline\n\narm -2\narm -2\n";
        assert_eq!(parse_graph(text).unwrap(), make_p(2, 2).unwrap());
        let err = parse_graph("center -6\narm -2 x\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(parse_graph("arm -2\n").unwrap_err().line, 1);
        assert_eq!(parse_graph("center 1 2\n").unwrap_err().line, 1);
        assert_eq!(parse_graph("center 1\nleaf -2\n").unwrap_err().line, 2);
        let two = "center -3\narm -2\ncenter 1\narm -2\n";
        assert_eq!(parse_graphs(two).unwrap().len(), 2);
        assert!(parse_graph(two).is_err());
        let items = parse_document("chain -5 -2\n").unwrap();
        assert_eq!(
            items,
            vec![GraphItem::Chain(LinearChain::new(vec![-5, -2]).unwrap())]
        );
    }

    #[test]
    fn isomorphism_ignores_arm_order() {
        let g = star(1, &[&[-2], &[-1], &[-3, -2]]);
        let h = star(1, &[&[-3, -2], &[-2], &[-1]]);
        assert!(g.is_isomorphic(&h));
        assert_ne!(g, h);
        assert_eq!(g.with_arms_permuted(&[2, 0, 1]).unwrap(), h);
        assert!(g.with_arms_permuted(&[0, 0, 1]).is_err());
    }

    proptest! {
        #[test]
        fn dsl_round_trip(c in -8i64..=2, arms in prop::collection::vec(prop::collection::vec(-6i64..=-1, 1..4), 0..5)) {
            let g = StarPlumbing::new(c, arms).unwrap();
            prop_assert_eq!(parse_graph(&g.to_string()).unwrap(), g);
        }

        #[test]
        fn dually_positive_graphs_are_negative_definite(
            k in 0usize..5, slack in 0i64..3,
            arms in prop::collection::vec(prop::collection::vec(-5i64..=-2, 1..4), 5)
        ) {
            let arms: Vec<Vec<i64>> = arms.into_iter().take(k).collect();
            let g = StarPlumbing::new(-(k as i64) - 1 - slack, arms).unwrap();
            prop_assert!(g.is_dually_positive().unwrap());
            prop_assert!(g.is_negative_definite());
        }
    }
}
