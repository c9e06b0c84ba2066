//! Invariants of the filling described by a positive planar factorization.
//!
//! On a planar page the class of a convex curve is the sum of the hole classes
//! it encloses, so `H_1` of the total space is `Z^n` modulo the hole-incidence
//! vectors of the vanishing cycles.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mcg::{equal, Factorization};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FillingInvariants {
    pub euler: i64,
    pub b1: usize,
    /// Invariant factors greater than 1, in divisibility order.
    #[serde(serialize_with = "ser_bigints")]
    pub torsion: Vec<BigInt>,
}

fn ser_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl fmt::Display for FillingInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t: Vec<String> = self.torsion.iter().map(BigInt::to_string).collect();
        write!(
            f,
            "chi = {}, b1 = {}, torsion = [{}]",
            self.euler,
            self.b1,
            t.join(", ")
        )
    }
}

/// `(1 - n) + length`.
pub fn euler_char(f: &Factorization) -> Result<i64> {
    if !f.is_positive() {
        return Err(Error::InvalidInput(
            "Euler characteristic needs a positive factorization".into(),
        ));
    }
    Ok(1 - f.holes() as i64 + f.length() as i64)
}

/// Rows of 0/1 hole-incidence vectors, one per twist.
pub fn incidence_matrix(f: &Factorization) -> Vec<Vec<i64>> {
    f.word()
        .iter()
        .map(|t| {
            let mut row = vec![0i64; f.holes()];
            for &h in t.holes() {
                row[h - 1] = 1;
            }
            row
        })
        .collect()
}

pub fn homology(f: &Factorization) -> Result<FillingInvariants> {
    let euler = euler_char(f)?;
    let m = incidence_matrix(f);
    let factors = invariant_factors(&m);
    Ok(FillingInvariants {
        euler,
        b1: f.holes() - factors.len(),
        torsion: factors.into_iter().filter(|d| !d.is_one()).collect(),
    })
}

/// Identical total monodromy gives identical boundary open books.
pub fn boundary_open_book_equal(f: &Factorization, g: &Factorization) -> Result<bool> {
    equal(f, g)
}

/// Nonzero invariant factors of an integer matrix (Smith normal form diagonal),
/// all positive, each dividing the next.
pub fn invariant_factors(m: &[Vec<i64>]) -> Vec<BigInt> {
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        // pivot: smallest nonzero entry in the remaining block
        let Some((pr, pc)) = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !a[i][j].is_zero())
            .min_by(|&(i, j), &(k, l)| a[i][j].abs().cmp(&a[k][l].abs()))
        else {
            break;
        };
        a.swap(t, pr);
        for row in a.iter_mut() {
            row.swap(t, pc);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..cols {
                    let s = &q * &a[t][j];
                    a[i][j] -= s;
                }
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for row in a.iter_mut().skip(t) {
                    let s = &q * &row[t];
                    row[j] -= s;
                }
                if !a[t][j].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }
        diag.push(a[t][t].abs());
    }
    // diagonal to Smith form: replace pairs by (gcd, lcm)
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            let g = diag[i].gcd(&diag[j]);
            let l = diag[i].lcm(&diag[j]);
            diag[i] = g;
            diag[j] = l;
        }
    }
    diag
}
