//! Free group words over `x_1, …, x_r`; letter `k` is `x_k`, `-k` its inverse.

pub type Word = Vec<i32>;

/// Appends `letter`, cancelling against the last letter when possible.
#[inline]
pub fn push_reduced(w: &mut Word, letter: i32) {
    if w.last() == Some(&-letter) {
        w.pop();
    } else {
        w.push(letter);
    }
}

pub fn extend_reduced(w: &mut Word, letters: &[i32]) {
    for &l in letters {
        push_reduced(w, l);
    }
}

pub fn reduce(w: &[i32]) -> Word {
    let mut out = Vec::with_capacity(w.len());
    extend_reduced(&mut out, w);
    out
}

pub fn inverse(w: &[i32]) -> Word {
    w.iter().rev().map(|l| -l).collect()
}

/// `w^p` for any integer `p`, reduced.
pub fn power(w: &[i32], p: i64) -> Word {
    let base = if p < 0 { inverse(w) } else { w.to_vec() };
    let mut out = Vec::new();
    for _ in 0..p.unsigned_abs() {
        extend_reduced(&mut out, &base);
    }
    out
}

/// Replaces each letter `x_k` by `images[k-1]` (and inverses by inverses).
pub fn substitute(w: &[i32], images: &[Word]) -> Word {
    let mut out = Vec::new();
    for &l in w {
        let img = &images[(l.unsigned_abs() - 1) as usize];
        if l > 0 {
            extend_reduced(&mut out, img);
        } else {
            for &m in img.iter().rev() {
                push_reduced(&mut out, -m);
            }
        }
    }
    out
}
