//! Parabolic double cosets of Young subgroups in `S_n`.
//!
//! A double coset `W_L x W_R` (left factor permuting values inside value
//! blocks, right factor permuting positions inside position blocks) is
//! determined by its contingency table: entry `(p, c)` counts positions in
//! position block `p` whose value lies in value block `c`. These helpers
//! convert between tables and extreme representatives and enumerate the
//! maximal representatives lying below a given permutation.

use crate::perm::{Permutation, MAX_RANK};

/// Consecutive runs partitioning `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blocks {
    /// 0-based start and length of each run.
    pub runs: Vec<(usize, usize)>,
    /// Run index of each 0-based point.
    pub of: [u8; MAX_RANK],
}

impl Blocks {
    /// Runs joined across `i, i+1` whenever bit `i-1` of `mask` is set.
    pub fn from_mask(n: usize, mask: u16) -> Self {
        let mut runs = Vec::new();
        let mut of = [0u8; MAX_RANK];
        let mut start = 0;
        for i in 0..n {
            of[i] = runs.len() as u8;
            let joined = i + 1 < n && mask & (1 << i) != 0;
            if !joined {
                runs.push((start, i + 1 - start));
                start = i + 1;
            }
        }
        Blocks { runs, of }
    }

    pub fn from_sizes(sizes: &[usize]) -> Self {
        let mut runs = Vec::with_capacity(sizes.len());
        let mut of = [0u8; MAX_RANK];
        let mut start = 0;
        for (b, &len) in sizes.iter().enumerate() {
            for slot in of.iter_mut().skip(start).take(len) {
                *slot = b as u8;
            }
            runs.push((start, len));
            start += len;
        }
        Blocks { runs, of }
    }

    pub fn len(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.runs.iter().map(|r| r.1).collect()
    }
}

/// Which end of a double coset to pick.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Extreme {
    Max,
    Min,
}

/// Contingency table of `x` with respect to position and value blocks.
pub fn table_of(x: &Permutation, positions: &Blocks, values: &Blocks) -> Vec<Vec<u8>> {
    let mut table = vec![vec![0u8; values.len()]; positions.len()];
    for (i, &v) in x.word().iter().enumerate() {
        table[positions.of[i] as usize][values.of[v as usize - 1] as usize] += 1;
    }
    table
}

/// The extreme element of the double coset with the given table.
///
/// For `Max`, each value block hands out its values from the top down to the
/// position blocks in order, and each position block lists its values in
/// decreasing order. `Min` is the mirror image.
pub fn from_table(
    table: &[Vec<u8>],
    positions: &Blocks,
    values: &Blocks,
    extreme: Extreme,
) -> Permutation {
    let n: usize = positions.runs.iter().map(|r| r.1).sum();
    let mut next: Vec<i32> = values
        .runs
        .iter()
        .map(|&(s, l)| match extreme {
            Extreme::Max => (s + l) as i32 - 1,
            Extreme::Min => s as i32,
        })
        .collect();
    let mut images = [0u8; MAX_RANK];
    let mut buf = [0u8; MAX_RANK];
    for (p, &(start, len)) in positions.runs.iter().enumerate() {
        let mut k = 0;
        for (c, &count) in table[p].iter().enumerate() {
            for _ in 0..count {
                buf[k] = next[c] as u8;
                k += 1;
                match extreme {
                    Extreme::Max => next[c] -= 1,
                    Extreme::Min => next[c] += 1,
                }
            }
        }
        debug_assert_eq!(k, len);
        let slice = &mut buf[..len];
        match extreme {
            Extreme::Max => slice.sort_unstable_by(|a, b| b.cmp(a)),
            Extreme::Min => slice.sort_unstable(),
        }
        images[start..start + len].copy_from_slice(slice);
    }
    Permutation::from_zero_based(&images[..n])
}

/// Maximal element of `W_L x W_R`, where `W_L` is generated by the simple
/// reflections in `lmask` (acting on values) and `W_R` by those in `rmask`.
pub fn max_in_double_coset(x: &Permutation, lmask: u16, rmask: u16) -> Permutation {
    if lmask == 0 && rmask == 0 {
        return *x;
    }
    let n = x.rank();
    let positions = Blocks::from_mask(n, rmask);
    let values = Blocks::from_mask(n, lmask);
    from_table(
        &table_of(x, &positions, &values),
        &positions,
        &values,
        Extreme::Max,
    )
}

/// All `y <= w` that are maximal in their `(L(w), R(w))` double coset,
/// i.e. the distinct values `P_{·,w}` can take are indexed by this list.
pub fn normalized_ideal(w: &Permutation) -> Vec<Permutation> {
    let n = w.rank();
    let positions = Blocks::from_mask(n, w.right_descents());
    let values = Blocks::from_mask(n, w.left_descents());
    // bound[p][c] = #{a <= end of position block p : w(a) >= start of value block c}
    let mut bound = vec![vec![0u8; values.len()]; positions.len()];
    for (p, &(start, len)) in positions.runs.iter().enumerate() {
        let prefix = &w.word()[..start + len];
        for (c, &(vstart, _)) in values.runs.iter().enumerate() {
            bound[p][c] = prefix.iter().filter(|&&v| v as usize > vstart).count() as u8;
        }
    }
    let mut search = IdealSearch {
        w,
        positions: &positions,
        values: &values,
        bound,
        cap: values.runs.iter().map(|r| r.1 as u8).collect(),
        table: vec![vec![0u8; values.len()]; positions.len()],
        above: vec![0u8; values.len()],
        out: Vec::new(),
    };
    search.block(0);
    search.out
}

struct IdealSearch<'a> {
    w: &'a Permutation,
    positions: &'a Blocks,
    values: &'a Blocks,
    bound: Vec<Vec<u8>>,
    cap: Vec<u8>,
    table: Vec<Vec<u8>>,
    // running count of assigned values lying in value blocks >= c
    above: Vec<u8>,
    out: Vec<Permutation>,
}

impl IdealSearch<'_> {
    fn block(&mut self, p: usize) {
        if p == self.positions.len() {
            let y = from_table(&self.table, self.positions, self.values, Extreme::Max);
            if y.bruhat_leq_unchecked(self.w) {
                self.out.push(y);
            }
            return;
        }
        let len = self.positions.runs[p].1 as u8;
        self.fill(p, 0, len);
    }

    fn fill(&mut self, p: usize, c: usize, remaining: u8) {
        let nvals = self.values.len();
        if c == nvals {
            if remaining != 0 {
                return;
            }
            // suffix sums of this row added to the running counts
            let mut acc = 0u8;
            let mut ok = true;
            for cc in (0..nvals).rev() {
                acc += self.table[p][cc];
                self.above[cc] += acc;
                if self.above[cc] > self.bound[p][cc] {
                    ok = false;
                }
            }
            if ok {
                self.block(p + 1);
            }
            let mut acc = 0u8;
            for cc in (0..nvals).rev() {
                acc += self.table[p][cc];
                self.above[cc] -= acc;
            }
            return;
        }
        let capacity: u8 = self.cap[c..].iter().sum();
        if capacity < remaining {
            return;
        }
        let hi = remaining.min(self.cap[c]);
        for take in (0..=hi).rev() {
            self.table[p][c] = take;
            self.cap[c] -= take;
            self.fill(p, c + 1, remaining - take);
            self.cap[c] += take;
        }
        self.table[p][c] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn lift_to_max(x: &Permutation, lmask: u16, rmask: u16) -> Permutation {
        // brute-force: climb while some generator increases the length
        let n = x.rank();
        let mut cur = *x;
        loop {
            let mut moved = false;
            for i in 1..n {
                if lmask & (1 << (i - 1)) != 0 {
                    let y = cur.left_mul_simple(i);
                    if y.length() > cur.length() {
                        cur = y;
                        moved = true;
                    }
                }
                if rmask & (1 << (i - 1)) != 0 {
                    let y = cur.right_mul_simple(i);
                    if y.length() > cur.length() {
                        cur = y;
                        moved = true;
                    }
                }
            }
            if !moved {
                return cur;
            }
        }
    }

    #[test]
    fn max_representative_matches_climbing() {
        for x in Permutation::all(5) {
            for lmask in [0u16, 0b0001, 0b0101, 0b1011, 0b1111] {
                for rmask in [0u16, 0b0010, 0b1001, 0b0111] {
                    assert_eq!(
                        max_in_double_coset(&x, lmask, rmask),
                        lift_to_max(&x, lmask, rmask),
                        "x={x} l={lmask:b} r={rmask:b}"
                    );
                }
            }
        }
    }

    #[test]
    fn ideal_matches_brute_force() {
        for w in Permutation::all(5) {
            let (l, r) = (w.left_descents(), w.right_descents());
            let brute: BTreeSet<_> = Permutation::all(5)
                .filter(|y| y.bruhat_leq_unchecked(&w))
                .map(|y| max_in_double_coset(&y, l, r))
                .collect();
            let fast: BTreeSet<_> = normalized_ideal(&w).into_iter().collect();
            assert_eq!(brute, fast, "w={w}");
        }
    }

    #[test]
    fn min_and_max_share_table() {
        let positions = Blocks::from_sizes(&[2, 1, 3]);
        let values = Blocks::from_sizes(&[3, 3]);
        let table = vec![vec![1, 1], vec![0, 1], vec![2, 1]];
        let hi = from_table(&table, &positions, &values, Extreme::Max);
        let lo = from_table(&table, &positions, &values, Extreme::Min);
        assert_eq!(table_of(&hi, &positions, &values), table);
        assert_eq!(table_of(&lo, &positions, &values), table);
        assert!(lo.bruhat_leq_unchecked(&hi));
        assert_eq!(hi.to_string(), "635421");
        assert_eq!(lo.to_string(), "145236");
    }
}
