//! Compact 0/±1 form of a cap embedding, column-canonical keys and the
//! equivalence test under label permutations and swaps of identical arms.
//!
//! Rows are the non-center vertices in `StarPlumbing::vertices` order. A key is
//! the sorted list of label columns, each column being a code per row
//! (`+1 -> 0`, `-1 -> 1`, `0 -> 2`). Sorting columns numbers the labels by
//! first use, and two compacts are label-equivalent iff their keys agree.

use std::ops::Range;

use crate::plumbing::StarPlumbing;

pub(crate) const PLUS: u8 = 0;
pub(crate) const MINUS: u8 = 1;
pub(crate) const ZERO: u8 = 2;

pub(crate) type Key = Vec<Vec<u8>>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Row {
    pub plus: Option<u32>,
    pub minus: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Compact {
    pub n_labels: u32,
    pub rows: Vec<Row>,
}

/// Row ranges of the arms and which arms carry identical weights.
#[derive(Clone, Debug)]
pub(crate) struct Layout {
    pub arms: Vec<Range<usize>>,
    pub group: Vec<usize>,
    pub depth: Vec<usize>,
    pub rows: usize,
}

impl Layout {
    pub fn new(cap: &StarPlumbing) -> Self {
        let mut arms = Vec::new();
        let mut group = Vec::new();
        let mut depth = Vec::new();
        let mut start = 0;
        for (j, arm) in cap.arms().iter().enumerate() {
            arms.push(start..start + arm.len());
            depth.extend(1..=arm.len());
            start += arm.len();
            let g = cap.arms()[..j]
                .iter()
                .position(|other| other == arm)
                .map_or(j, |i| group[i]);
            group.push(g);
        }
        Layout {
            arms,
            group,
            depth,
            rows: start,
        }
    }

    pub fn arm_of_row(&self, r: usize) -> usize {
        self.arms
            .iter()
            .position(|a| a.contains(&r))
            .expect("row in range")
    }
}

impl Compact {
    fn columns_over(&self, rows: &[usize]) -> Vec<Vec<u8>> {
        let mut cols = vec![vec![ZERO; rows.len()]; self.n_labels as usize];
        for (i, &r) in rows.iter().enumerate() {
            let row = &self.rows[r];
            if let Some(p) = row.plus {
                cols[p as usize][i] = PLUS;
            }
            for &m in &row.minus {
                cols[m as usize][i] = MINUS;
            }
        }
        cols
    }

    fn sorted_columns_over(&self, rows: &[usize]) -> Vec<Vec<u8>> {
        let mut cols = self.columns_over(rows);
        cols.sort_unstable();
        cols
    }

    pub fn key(&self) -> Key {
        let all: Vec<usize> = (0..self.rows.len()).collect();
        self.sorted_columns_over(&all)
    }

    pub fn from_key(key: &Key) -> Compact {
        let n_rows = key.first().map_or(0, Vec::len);
        let mut rows = vec![
            Row {
                plus: None,
                minus: Vec::new()
            };
            n_rows
        ];
        for (l, col) in key.iter().enumerate() {
            for (r, &c) in col.iter().enumerate() {
                match c {
                    PLUS => rows[r].plus = Some(l as u32),
                    MINUS => rows[r].minus.push(l as u32),
                    _ => {}
                }
            }
        }
        Compact {
            n_labels: key.len() as u32,
            rows,
        }
    }

    /// Rows of arm `perm[t]` become the rows of arm `t`.
    #[cfg(test)]
    pub fn permute_arms(&self, layout: &Layout, perm: &[usize]) -> Compact {
        let mut rows = Vec::with_capacity(self.rows.len());
        for &src in perm {
            rows.extend(self.rows[layout.arms[src].clone()].iter().cloned());
        }
        Compact {
            n_labels: self.n_labels,
            rows,
        }
    }

    /// Invariant under label permutations and swaps of identical arms.
    pub fn profile(&self, layout: &Layout) -> (u32, Vec<Vec<(usize, usize, u8)>>) {
        let mut per_label: Vec<Vec<(usize, usize, u8)>> = vec![Vec::new(); self.n_labels as usize];
        for (r, row) in self.rows.iter().enumerate() {
            let tag = |code| (layout.group[layout.arm_of_row(r)], layout.depth[r], code);
            if let Some(p) = row.plus {
                per_label[p as usize].push(tag(PLUS));
            }
            for &m in &row.minus {
                per_label[m as usize].push(tag(MINUS));
            }
        }
        for v in &mut per_label {
            v.sort_unstable();
        }
        per_label.sort_unstable();
        (self.n_labels, per_label)
    }
}

/// Whether `a` and `b` differ by a label permutation composed with a
/// permutation of identical arms.
pub(crate) fn equivalent(layout: &Layout, a: &Compact, b: &Compact) -> bool {
    if a.n_labels != b.n_labels || a.rows.len() != b.rows.len() {
        return false;
    }
    let k = layout.arms.len();
    let mut used = vec![false; k];
    let mut assign = Vec::with_capacity(k);
    arm_match(layout, a, b, &mut used, &mut assign)
}

fn arm_match(
    layout: &Layout,
    a: &Compact,
    b: &Compact,
    used: &mut [bool],
    assign: &mut Vec<usize>,
) -> bool {
    let t = assign.len();
    if t == layout.arms.len() {
        return true;
    }
    let rows_b: Vec<usize> = (0..layout.arms[t].end).collect();
    let cols_b = b.sorted_columns_over(&rows_b);
    for src in 0..layout.arms.len() {
        if used[src] || layout.group[src] != layout.group[t] {
            continue;
        }
        assign.push(src);
        let rows_a: Vec<usize> = assign
            .iter()
            .flat_map(|&s| layout.arms[s].clone())
            .collect();
        if a.sorted_columns_over(&rows_a) == cols_b {
            used[src] = true;
            if arm_match(layout, a, b, used, assign) {
                return true;
            }
            used[src] = false;
        }
        assign.pop();
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plumbing::make_dgamma;

    fn row(plus: Option<u32>, minus: &[u32]) -> Row {
        Row {
            plus,
            minus: minus.to_vec(),
        }
    }

    #[test]
    fn key_round_trip_numbers_labels_by_first_use() {
        let c = Compact {
            n_labels: 3,
            rows: vec![row(None, &[2, 1]), row(Some(1), &[0])],
        };
        let key = c.key();
        let back = Compact::from_key(&key);
        assert_eq!(back.rows[0].minus, vec![0, 1]);
        assert_eq!(back.key(), key);
    }

    #[test]
    fn arm_swaps_are_equivalences() {
        let cap = make_dgamma(2, 2).unwrap();
        let layout = Layout::new(&cap);
        assert_eq!(layout.group, vec![0, 0, 2, 0, 0]);
        let c = Compact {
            n_labels: 6,
            rows: vec![
                row(None, &[0, 1, 2]),
                row(None, &[0, 3, 4]),
                row(None, &[0, 5]),
                row(None, &[1, 3, 5]),
                row(None, &[2, 4, 5]),
            ],
        };
        let swapped = c.permute_arms(&layout, &[3, 0, 2, 4, 1]);
        assert!(equivalent(&layout, &c, &swapped));
        assert_eq!(c.profile(&layout), swapped.profile(&layout));
        // exchanging a (-2) arm with the (-1) arm is not a symmetry
        let bad = c.permute_arms(&layout, &[2, 1, 0, 3, 4]);
        assert!(!equivalent(&layout, &c, &bad));
    }
}
