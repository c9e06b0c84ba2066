//! Pruned search for cap embeddings.
//!
//! Every non-center class is `h - Σ_S e` (depth 1) or `e_p - Σ_S e` (deeper),
//! with `|S|` fixed by the weight. Vertices are assigned one at a time; at each
//! step the existing labels are grouped by their column so far. Labels in one
//! group are interchangeable, so a candidate only records how many labels it
//! takes from each group (and which group holds `p`), and takes a prefix of the
//! group. Unused labels form one extra group of unlimited size.

use std::collections::BTreeMap;

use super::canonical::{Compact, Key, Layout, Row};
use crate::error::{Error, Result};
use crate::plumbing::StarPlumbing;

pub(crate) struct SearchOutcome {
    pub solutions: BTreeMap<Key, Compact>,
    pub nodes: u64,
}

struct Group {
    labels: Vec<u32>,
    /// Coefficient of the group's labels in each already assigned row, in
    /// assignment order.
    x: Vec<i8>,
}

struct Searcher {
    order: Vec<usize>,
    depth1: Vec<bool>,
    sizes: Vec<usize>,
    target: Vec<Vec<i8>>,
    fast: bool,
    budget: u64,
    nodes: u64,
    coef: Vec<Vec<i8>>,
    rows: Vec<Option<Row>>,
    out: BTreeMap<Key, Compact>,
}

pub(crate) fn search(cap: &StarPlumbing, fast: bool, budget: u64) -> Result<SearchOutcome> {
    let layout = Layout::new(cap);
    let n = layout.rows;
    let matrix = cap.intersection_matrix();
    let weights: Vec<i64> = cap.arms().iter().flatten().copied().collect();
    let depth1: Vec<bool> = (0..n).map(|r| layout.depth[r] == 1).collect();
    let mut sizes = Vec::with_capacity(n);
    for r in 0..n {
        let s = if depth1[r] {
            1 - weights[r]
        } else {
            -weights[r] - 1
        };
        if s < 0 {
            // no class of the required shape has this square
            return Ok(SearchOutcome {
                solutions: BTreeMap::new(),
                nodes: 0,
            });
        }
        sizes.push(s as usize);
    }
    let target = (0..n)
        .map(|u| (0..n).map(|v| matrix[u + 1][v + 1] as i8).collect())
        .collect();
    let mut order: Vec<usize> = layout.arms.iter().map(|a| a.start).collect();
    for arm in &layout.arms {
        order.extend(arm.clone().skip(1));
    }
    let mut s = Searcher {
        order,
        depth1,
        sizes,
        target,
        fast,
        budget,
        nodes: 0,
        coef: Vec::new(),
        rows: vec![None; n],
        out: BTreeMap::new(),
    };
    s.assign(0)?;
    Ok(SearchOutcome {
        solutions: s.out,
        nodes: s.nodes,
    })
}

impl Searcher {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::SearchBudget {
                explored: self.nodes,
            });
        }
        Ok(())
    }

    fn assign(&mut self, k: usize) -> Result<()> {
        self.tick()?;
        if k == self.order.len() {
            let compact = Compact {
                n_labels: self.coef.len() as u32,
                rows: self
                    .rows
                    .iter()
                    .map(|r| r.clone().expect("assigned"))
                    .collect(),
            };
            let key = compact.key();
            self.out.entry(key).or_insert(compact);
            return Ok(());
        }
        let r = self.order[k];
        for row in self.candidates(k)? {
            let fresh_from = self.coef.len() as u32;
            let max_label = row.plus.iter().chain(&row.minus).copied().max();
            if let Some(m) = max_label {
                if m >= fresh_from {
                    self.coef.resize((m + 1) as usize, vec![0; self.rows.len()]);
                }
            }
            if let Some(p) = row.plus {
                self.coef[p as usize][r] = 1;
            }
            for &l in &row.minus {
                self.coef[l as usize][r] = -1;
            }
            self.rows[r] = Some(row.clone());

            self.assign(k + 1)?;

            self.rows[r] = None;
            if let Some(p) = row.plus {
                self.coef[p as usize][r] = 0;
            }
            for &l in &row.minus {
                self.coef[l as usize][r] = 0;
            }
            self.coef.truncate(fresh_from as usize);
        }
        Ok(())
    }

    fn groups(&self, assigned: &[usize]) -> Vec<Group> {
        let mut by_column: BTreeMap<&[i8], Vec<u32>> = BTreeMap::new();
        for (l, col) in self.coef.iter().enumerate() {
            by_column.entry(col.as_slice()).or_default().push(l as u32);
        }
        let mut groups: Vec<Group> = by_column
            .into_iter()
            .map(|(col, labels)| Group {
                x: assigned.iter().map(|&u| col[u]).collect(),
                labels,
            })
            .collect();
        groups.sort_by_key(|g| g.labels[0]);
        groups
    }

    fn candidates(&mut self, k: usize) -> Result<Vec<Row>> {
        let r = self.order[k];
        let assigned: Vec<usize> = self.order[..k].to_vec();
        let groups = self.groups(&assigned);
        let h_r = self.depth1[r] as i8;
        let need: Vec<i32> = assigned
            .iter()
            .map(|&u| (self.target[u][r] - (self.depth1[u] as i8) * h_r) as i32)
            .collect();
        let s = self.sizes[r];
        let fresh_base = self.coef.len() as u32;
        let mut rows = Vec::new();

        if self.depth1[r] {
            let avail: Vec<usize> = groups.iter().map(|g| g.labels.len()).collect();
            for counts in self.counts(&groups, &avail, &need, s)? {
                rows.push(build_row(&groups, None, &counts, fresh_base));
            }
        } else {
            for p_group in 0..=groups.len() {
                let mut need_p = need.clone();
                let mut avail: Vec<usize> = groups.iter().map(|g| g.labels.len()).collect();
                if let Some(g) = groups.get(p_group) {
                    if self.fast && g.x.contains(&1) {
                        continue;
                    }
                    for (n, &x) in need_p.iter_mut().zip(&g.x) {
                        *n += x as i32;
                    }
                    avail[p_group] -= 1;
                }
                for counts in self.counts(&groups, &avail, &need_p, s)? {
                    rows.push(build_row(&groups, Some(p_group), &counts, fresh_base));
                }
            }
        }
        Ok(rows)
    }

    /// All count vectors `c` (one entry per group, then one for unused labels)
    /// with `Σ c = s` and `Σ_g c_g·x_u[g] = need_u` for every assigned `u`.
    fn counts(
        &mut self,
        groups: &[Group],
        avail: &[usize],
        need: &[i32],
        s: usize,
    ) -> Result<Vec<Vec<usize>>> {
        let m = groups.len();
        let n_u = need.len();
        // suffix capacities of +1 and -1 entries per assigned row
        let mut pos = vec![vec![0i32; n_u]; m + 1];
        let mut neg = vec![vec![0i32; n_u]; m + 1];
        for g in (0..m).rev() {
            for u in 0..n_u {
                pos[g][u] = pos[g + 1][u];
                neg[g][u] = neg[g + 1][u];
                match groups[g].x[u] {
                    1 => pos[g][u] += avail[g] as i32,
                    -1 => neg[g][u] += avail[g] as i32,
                    _ => {}
                }
            }
        }
        let mut out = Vec::new();
        let mut cur = vec![0usize; m + 1];
        let mut res: Vec<i32> = need.to_vec();
        self.count_rec(
            0, s, groups, avail, &pos, &neg, &mut res, &mut cur, &mut out,
        )?;
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn count_rec(
        &mut self,
        g: usize,
        left: usize,
        groups: &[Group],
        avail: &[usize],
        pos: &[Vec<i32>],
        neg: &[Vec<i32>],
        res: &mut [i32],
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        self.tick()?;
        let l = left as i32;
        for u in 0..res.len() {
            if res[u] > l.min(pos[g][u]) || res[u] < -l.min(neg[g][u]) {
                return Ok(());
            }
        }
        if g == groups.len() {
            if res.iter().all(|&x| x == 0) {
                cur[g] = left;
                out.push(cur.clone());
            }
            return Ok(());
        }
        for c in 0..=avail[g].min(left) {
            for (u, r) in res.iter_mut().enumerate() {
                *r -= c as i32 * groups[g].x[u] as i32;
            }
            cur[g] = c;
            let result = self.count_rec(g + 1, left - c, groups, avail, pos, neg, res, cur, out);
            for (u, r) in res.iter_mut().enumerate() {
                *r += c as i32 * groups[g].x[u] as i32;
            }
            result?;
        }
        cur[g] = 0;
        Ok(())
    }
}

fn build_row(groups: &[Group], p_group: Option<usize>, counts: &[usize], fresh_base: u32) -> Row {
    let mut next_fresh = fresh_base;
    let plus = p_group.map(|pg| match groups.get(pg) {
        Some(g) => g.labels[0],
        None => {
            next_fresh += 1;
            fresh_base
        }
    });
    let mut minus = Vec::new();
    for (g, group) in groups.iter().enumerate() {
        let skip = usize::from(p_group == Some(g));
        minus.extend(group.labels.iter().skip(skip).take(counts[g]));
    }
    let fresh = counts[groups.len()] as u32;
    minus.extend(next_fresh..next_fresh + fresh);
    minus.sort_unstable();
    Row { plus, minus }
}
