//! Segments, multisegments and their supports.
//!
//! A multisegment with fixed begin and end multisets is the same thing as a
//! contingency table (rows: distinct begins, columns: distinct ends) with
//! prescribed margins and zeros wherever a begin exceeds an end. Through that
//! table it also names a double coset of Young subgroups in `S_N`, `N` being
//! the number of segments; [`coset_representative`] picks the element used
//! to index Kazhdan–Lusztig polynomials.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::cosets::{from_table, Blocks, Extreme};
use crate::error::SegmentError;
use crate::perm::{Permutation, MAX_RANK};

/// The integer interval `[a, b]`, `a <= b`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Segment {
    a: i64,
    b: i64,
}

impl Segment {
    pub fn new(a: i64, b: i64) -> Result<Self, SegmentError> {
        if a > b {
            return Err(SegmentError::Empty(a, b));
        }
        Ok(Segment { a, b })
    }

    pub fn begin(&self) -> i64 {
        self.a
    }

    pub fn end(&self) -> i64 {
        self.b
    }

    pub fn len(&self) -> usize {
        (self.b - self.a + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

fn fmt_int(f: &mut fmt::Formatter<'_>, v: i64) -> fmt::Result {
    if v < 0 {
        write!(f, "({v})")
    } else {
        write!(f, "{v}")
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_int(f, self.a)?;
        write!(f, "-")?;
        fmt_int(f, self.b)
    }
}

/// A finite multiset of segments, stored by decreasing begin, then decreasing end.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Multisegment {
    segments: Vec<Segment>,
}

impl Multisegment {
    pub fn empty() -> Self {
        Multisegment::default()
    }

    pub fn new(mut segments: Vec<Segment>) -> Self {
        segments.sort_unstable_by(|x, y| y.cmp(x));
        Multisegment { segments }
    }

    pub fn from_pairs(pairs: &[(i64, i64)]) -> Result<Self, SegmentError> {
        let segs = pairs
            .iter()
            .map(|&(a, b)| Segment::new(a, b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Multisegment::new(segs))
    }

    /// Segments in canonical (decreasing) order.
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn add(&self, other: &Multisegment) -> Multisegment {
        let mut segs = self.segments.clone();
        segs.extend_from_slice(&other.segments);
        Multisegment::new(segs)
    }

    pub fn support(&self) -> Support {
        Support::new(
            self.segments.iter().map(|s| s.a).collect(),
            self.segments.iter().map(|s| s.b).collect(),
        )
        .expect("a multisegment always has a consistent support")
    }

    /// `d ↦ #{[a,b] ∈ m : a <= d <= b}`.
    pub fn graded_dimension(&self) -> BTreeMap<i64, usize> {
        let mut dims = BTreeMap::new();
        for s in &self.segments {
            for d in s.a..=s.b {
                *dims.entry(d).or_insert(0) += 1;
            }
        }
        dims
    }

    /// `r(a,b) = #{[c,d] ∈ m : c <= a, b <= d}` for `a <= b` inside the span of `m`.
    pub fn rank_function(&self) -> RankMatrix {
        let mut r = BTreeMap::new();
        if let (Some(lo), Some(hi)) = (
            self.segments.iter().map(|s| s.a).min(),
            self.segments.iter().map(|s| s.b).max(),
        ) {
            for a in lo..=hi {
                for b in a..=hi {
                    let count = self
                        .segments
                        .iter()
                        .filter(|s| s.a <= a && b <= s.b)
                        .count();
                    r.insert((a, b), count);
                }
            }
        }
        RankMatrix { r }
    }

    /// The segment-count table of `self` over the classes of `support`.
    pub fn table(&self, support: &Support) -> Vec<Vec<u8>> {
        let mut t = vec![vec![0u8; support.end_classes.len()]; support.begin_classes.len()];
        for s in &self.segments {
            let r = support.begin_index(s.a).expect("begin belongs to support");
            let c = support.end_index_desc(s.b).expect("end belongs to support");
            t[r][c] += 1;
        }
        t
    }
}

impl fmt::Display for Multisegment {
    /// Segments joined by `+`, increasing order; `0` for the empty multisegment.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.segments.is_empty() {
            return write!(f, "0");
        }
        for (i, s) in self.segments.iter().rev().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Multisegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multisegment({self})")
    }
}

impl serde::Serialize for Multisegment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn parse_int(tok: &str) -> Option<i64> {
    let tok = tok.trim();
    if let Some(inner) = tok.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
        inner.trim().parse().ok()
    } else if tok.starts_with('-') || tok.starts_with('+') {
        None
    } else {
        tok.parse().ok()
    }
}

impl FromStr for Multisegment {
    type Err = SegmentError;

    /// Grammar: `a-b` terms joined by `+`, whitespace ignored, negative
    /// endpoints parenthesised (`(-2)-3`); `0` or the empty string is the
    /// empty multisegment.
    fn from_str(s: &str) -> Result<Self, SegmentError> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() || compact == "0" {
            return Ok(Multisegment::empty());
        }
        let bad = || SegmentError::Parse(s.to_string());
        let mut segs = Vec::new();
        for term in split_outside_parens(&compact, '+') {
            let parts = split_outside_parens(term, '-');
            if parts.len() != 2 {
                return Err(bad());
            }
            let a = parse_int(parts[0]).ok_or_else(bad)?;
            let b = parse_int(parts[1]).ok_or_else(bad)?;
            segs.push(Segment::new(a, b)?);
        }
        Ok(Multisegment::new(segs))
    }
}

fn split_outside_parens(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Begin and end multisets of a multisegment.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Support {
    begins: Vec<i64>,
    ends: Vec<i64>,
    /// Distinct begins, increasing, with multiplicities.
    pub begin_classes: Vec<(i64, usize)>,
    /// Distinct ends, increasing, with multiplicities.
    pub end_classes: Vec<(i64, usize)>,
}

fn classes(sorted: &[i64]) -> Vec<(i64, usize)> {
    let mut out: Vec<(i64, usize)> = Vec::new();
    for &v in sorted {
        match out.last_mut() {
            Some((u, k)) if *u == v => *k += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

impl Support {
    /// Checks that some matching pairs every begin with an end not below it.
    pub fn new(mut begins: Vec<i64>, mut ends: Vec<i64>) -> Result<Self, SegmentError> {
        if begins.len() != ends.len() {
            return Err(SegmentError::InconsistentSupport(format!(
                "{} begins but {} ends",
                begins.len(),
                ends.len()
            )));
        }
        begins.sort_unstable();
        ends.sort_unstable();
        if let Some((a, b)) = begins.iter().zip(&ends).find(|(a, b)| a > b) {
            return Err(SegmentError::InconsistentSupport(format!(
                "begin {a} cannot be matched (end {b})"
            )));
        }
        Ok(Support {
            begin_classes: classes(&begins),
            end_classes: classes(&ends),
            begins,
            ends,
        })
    }

    pub fn begins(&self) -> &[i64] {
        &self.begins
    }

    pub fn ends(&self) -> &[i64] {
        &self.ends
    }

    /// Number of segments.
    pub fn size(&self) -> usize {
        self.begins.len()
    }

    /// Whether all begins are distinct and all ends are distinct.
    pub fn is_multiplicity_free(&self) -> bool {
        self.begin_classes.iter().all(|c| c.1 == 1) && self.end_classes.iter().all(|c| c.1 == 1)
    }

    fn begin_index(&self, a: i64) -> Option<usize> {
        self.begin_classes.iter().position(|c| c.0 == a)
    }

    /// Column index with ends taken in decreasing order.
    fn end_index_desc(&self, b: i64) -> Option<usize> {
        let k = self.end_classes.len();
        self.end_classes
            .iter()
            .position(|c| c.0 == b)
            .map(|i| k - 1 - i)
    }

    /// End value of column `c` (ends in decreasing order).
    fn end_desc(&self, c: usize) -> (i64, usize) {
        self.end_classes[self.end_classes.len() - 1 - c]
    }

    /// Multisegment for a table over (begins increasing) × (ends decreasing).
    pub fn multisegment_from_table(&self, table: &[Vec<u8>]) -> Multisegment {
        let mut segs = Vec::with_capacity(self.size());
        for (r, row) in table.iter().enumerate() {
            let a = self.begin_classes[r].0;
            for (c, &k) in row.iter().enumerate() {
                let b = self.end_desc(c).0;
                for _ in 0..k {
                    segs.push(Segment { a, b });
                }
            }
        }
        Multisegment::new(segs)
    }

    /// Every multisegment with this support, in lexicographic order of the
    /// row-major table (rows by increasing begin, columns by decreasing end,
    /// larger entries first).
    pub fn enumerate(&self) -> Vec<Multisegment> {
        let rows: Vec<usize> = self.begin_classes.iter().map(|c| c.1).collect();
        let mut cols: Vec<usize> = (0..self.end_classes.len())
            .map(|c| self.end_desc(c).1)
            .collect();
        let allowed: Vec<Vec<bool>> = self
            .begin_classes
            .iter()
            .map(|&(a, _)| (0..cols.len()).map(|c| a <= self.end_desc(c).0).collect())
            .collect();
        let mut table = vec![vec![0u8; cols.len()]; rows.len()];
        let mut out = Vec::new();
        fill_tables(
            &rows,
            &mut cols,
            &allowed,
            0,
            0,
            rows.first().copied().unwrap_or(0),
            &mut table,
            &mut |t| out.push(self.multisegment_from_table(t)),
        );
        out
    }
}

#[allow(clippy::too_many_arguments)]
fn fill_tables(
    rows: &[usize],
    cols: &mut [usize],
    allowed: &[Vec<bool>],
    r: usize,
    c: usize,
    remaining: usize,
    table: &mut Vec<Vec<u8>>,
    emit: &mut dyn FnMut(&[Vec<u8>]),
) {
    if r == rows.len() {
        emit(table);
        return;
    }
    if c == cols.len() {
        if remaining == 0 {
            let next = rows.get(r + 1).copied().unwrap_or(0);
            fill_tables(rows, cols, allowed, r + 1, 0, next, table, emit);
        }
        return;
    }
    let room: usize = (c..cols.len())
        .filter(|&cc| allowed[r][cc])
        .map(|cc| cols[cc])
        .sum();
    if room < remaining {
        return;
    }
    let hi = if allowed[r][c] {
        remaining.min(cols[c])
    } else {
        0
    };
    for take in (0..=hi).rev() {
        table[r][c] = take as u8;
        cols[c] -= take;
        fill_tables(rows, cols, allowed, r, c + 1, remaining - take, table, emit);
        cols[c] += take;
    }
    table[r][c] = 0;
}

/// Rank function of a multisegment (see [`Multisegment::rank_function`]).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RankMatrix {
    pub r: BTreeMap<(i64, i64), usize>,
}

impl RankMatrix {
    pub fn get(&self, a: i64, b: i64) -> usize {
        self.r.get(&(a, b)).copied().unwrap_or(0)
    }
}

/// Closure order: `n <= m` iff `r_n(a,b) >= r_m(a,b)` for all `a <= b`.
/// Replacing two linked segments by their union and intersection moves down.
pub fn zelevinsky_leq(n: &Multisegment, m: &Multisegment) -> Result<bool, SegmentError> {
    if n.support() != m.support() {
        return Err(SegmentError::SupportMismatch);
    }
    let (rn, rm) = (n.rank_function(), m.rank_function());
    Ok(rm.r.iter().all(|(&(a, b), &v)| rn.get(a, b) >= v))
}

/// `m_σ = Σ_i [i, 2k - σ(i)]`.
pub fn m_sigma(sigma: &Permutation) -> Multisegment {
    let k = sigma.rank() as i64;
    let segs = (1..=sigma.rank())
        .map(|i| Segment {
            a: i as i64,
            b: 2 * k - sigma.at(i) as i64,
        })
        .collect();
    Multisegment::new(segs)
}

/// Which way the end classes are laid out along the values of `S_N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum EndOrder {
    /// Largest end gets the smallest values (so `m_σ ↦ σ`).
    Decreasing,
    /// Smallest end gets the smallest values (so `m_σ ↦ w0 σ`).
    Increasing,
}

/// Extreme element of the double coset named by `m`, with positions grouped
/// by begin (increasing) and values grouped by end in the given order.
pub fn coset_element(m: &Multisegment, order: EndOrder, extreme: Extreme) -> Permutation {
    assert!(
        (1..=MAX_RANK).contains(&m.len()),
        "need between 1 and {MAX_RANK} segments"
    );
    let support = m.support();
    let mut table = m.table(&support);
    let mut col_sizes: Vec<usize> = (0..support.end_classes.len())
        .map(|c| support.end_desc(c).1)
        .collect();
    if order == EndOrder::Increasing {
        for row in table.iter_mut() {
            row.reverse();
        }
        col_sizes.reverse();
    }
    let positions = Blocks::from_sizes(
        &support
            .begin_classes
            .iter()
            .map(|c| c.1)
            .collect::<Vec<_>>(),
    );
    let values = Blocks::from_sizes(&col_sizes);
    from_table(&table, &positions, &values, extreme)
}

/// The maximal-length element of the double coset of `m` with ends laid out
/// decreasingly; for multiplicity-free supports `coset_representative(m_σ) = σ`.
pub fn coset_representative(m: &Multisegment) -> Permutation {
    coset_element(m, EndOrder::Decreasing, Extreme::Max)
}

/// A map `{1..2k} → {1..k}` taking each value exactly twice.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TwoToOneWord {
    values: Vec<u8>,
}

impl TwoToOneWord {
    pub fn new(values: Vec<u8>) -> Result<Self, SegmentError> {
        let bad = || SegmentError::BadWord(format!("{values:?}"));
        if values.is_empty() || values.len() % 2 != 0 {
            return Err(bad());
        }
        let k = values.len() / 2;
        let mut counts = vec![0usize; k + 1];
        for &v in &values {
            if v == 0 || v as usize > k {
                return Err(bad());
            }
            counts[v as usize] += 1;
        }
        if counts[1..].iter().any(|&c| c != 2) {
            return Err(bad());
        }
        Ok(TwoToOneWord { values })
    }

    pub fn k(&self) -> usize {
        self.values.len() / 2
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    /// `n_w = Σ_{i=1}^{2k} [⌈i/2⌉, 2k - w(i)]`.
    pub fn n_w(&self) -> Multisegment {
        let two_k = self.values.len() as i64;
        let segs = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| Segment {
                a: (i as i64 + 2) / 2,
                b: two_k - v as i64,
            })
            .collect();
        Multisegment::new(segs)
    }

    /// The word with `n_w = m`, listing the two values for each begin in
    /// increasing order; `None` if `m` does not have the required shape.
    pub fn from_multisegment(m: &Multisegment) -> Option<Self> {
        if m.is_empty() || m.len() % 2 != 0 {
            return None;
        }
        let k = m.len() / 2;
        let two_k = 2 * k as i64;
        let mut values = Vec::with_capacity(2 * k);
        for begin in 1..=k as i64 {
            let mut pair: Vec<i64> = m
                .segments()
                .iter()
                .filter(|s| s.a == begin)
                .map(|s| two_k - s.b)
                .collect();
            if pair.len() != 2 || pair.iter().any(|&v| v < 1 || v > k as i64) {
                return None;
            }
            pair.sort_unstable();
            values.extend(pair.into_iter().map(|v| v as u8));
        }
        TwoToOneWord::new(values).ok()
    }
}

impl fmt::Display for TwoToOneWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k() <= 9 {
            for v in &self.values {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

impl FromStr for TwoToOneWord {
    type Err = SegmentError;

    fn from_str(s: &str) -> Result<Self, SegmentError> {
        let s = s.trim();
        let values: Option<Vec<u8>> = if s.contains(',') {
            s.split(',').map(|t| t.trim().parse().ok()).collect()
        } else {
            s.chars().map(|c| c.to_digit(10).map(|d| d as u8)).collect()
        };
        TwoToOneWord::new(values.ok_or_else(|| SegmentError::BadWord(s.to_string()))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(s: &str) -> Multisegment {
        s.parse().unwrap()
    }

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn m_sigma_examples() {
        assert_eq!(m_sigma(&p("463152")), ms("1-8+2-6+3-9+4-11+5-7+6-10"));
        assert_eq!(m_sigma(&p("21")), ms("1-2+2-3"));
        assert_eq!(m_sigma(&p("12")), ms("1-3+2-2"));
    }

    #[test]
    fn n_w_examples() {
        let w: TwoToOneWord = "112235463546".parse().unwrap();
        assert_eq!(
            w.n_w(),
            ms("1-11+1-11+2-10+2-10+3-9+3-7+4-8+4-6+5-9+5-7+6-8+6-6")
        );
        let m = m_sigma(&p("125634"));
        assert_eq!(w.n_w().support(), m.add(&m).support());
        assert_eq!(TwoToOneWord::from_multisegment(&w.n_w()), Some(w));
        let one: TwoToOneWord = "11".parse().unwrap();
        assert_eq!(one.n_w(), ms("1-1+1-1"));
        assert!("112".parse::<TwoToOneWord>().is_err());
        assert!("1122".parse::<TwoToOneWord>().is_ok());
        assert!("1112".parse::<TwoToOneWord>().is_err());
    }

    #[test]
    fn graded_dimensions() {
        let dims = ms("1-2+2-3").graded_dimension();
        assert_eq!(dims, BTreeMap::from([(1, 1), (2, 2), (3, 1)]));
        for sigma in Permutation::all(6) {
            let total: usize = m_sigma(&sigma).graded_dimension().values().sum();
            assert_eq!(total, 36);
        }
        let m = ms("1-3+2-2");
        assert_eq!(m.add(&Multisegment::empty()), m);
    }

    #[test]
    fn parse_and_format() {
        let m = ms(" 3-9 + 1-8+2-6 ");
        assert_eq!(m.to_string(), "1-8+2-6+3-9");
        let neg = ms("(-2)-3+(-5)-(-1)");
        assert_eq!(neg.to_string(), "(-5)-(-1)+(-2)-3");
        assert_eq!(ms(&neg.to_string()), neg);
        assert!("3-1".parse::<Multisegment>().is_err());
        assert!("1-2-3".parse::<Multisegment>().is_err());
        assert!("-2-3".parse::<Multisegment>().is_err());
        assert!("a-b".parse::<Multisegment>().is_err());
        assert_eq!(ms("0"), Multisegment::empty());
    }

    #[test]
    fn closure_order_examples() {
        assert!(zelevinsky_leq(&ms("1-3+2-2"), &ms("1-2+2-3")).unwrap());
        assert!(!zelevinsky_leq(&ms("1-2+2-3"), &ms("1-3+2-2")).unwrap());
        let m = ms("1-2+2-3");
        assert!(zelevinsky_leq(&m, &m).unwrap());
        assert!(zelevinsky_leq(&ms("1-2"), &ms("1-3")).is_err());
        let me = m_sigma(&Permutation::identity(3));
        for sigma in Permutation::all(3) {
            assert!(zelevinsky_leq(&me, &m_sigma(&sigma)).unwrap());
        }
    }

    #[test]
    fn enumeration_counts() {
        for sigma in Permutation::all(4) {
            assert_eq!(m_sigma(&sigma).support().enumerate().len(), 24);
        }
        let m = m_sigma(&p("21"));
        let doubled = m.add(&m).support();
        assert_eq!(doubled.begins(), &[1, 1, 2, 2]);
        assert_eq!(doubled.ends(), &[2, 2, 3, 3]);
        assert_eq!(doubled.enumerate().len(), 3);
        assert_eq!(
            Multisegment::empty().support().enumerate(),
            vec![Multisegment::empty()]
        );
        assert!(Support::new(vec![3], vec![2]).is_err());
        assert!(Support::new(vec![1, 2], vec![2]).is_err());
    }

    #[test]
    fn representatives_of_m_sigma() {
        for sigma in Permutation::all(4) {
            assert_eq!(coset_representative(&m_sigma(&sigma)), sigma);
            assert_eq!(
                coset_element(&m_sigma(&sigma), EndOrder::Increasing, Extreme::Max),
                sigma.left_w0()
            );
        }
    }

    #[test]
    fn doubled_k1_representatives_are_distinct() {
        // k = 1: support {1,1} -> {1,1}; a single multisegment 2·[1,1]
        let m = m_sigma(&Permutation::identity(1));
        let basis = m.add(&m).support().enumerate();
        assert_eq!(basis.len(), 1);
        // k = 2 doubled: three multisegments, three distinct double cosets
        let m = m_sigma(&p("21"));
        let basis = m.add(&m).support().enumerate();
        let reps: std::collections::BTreeSet<_> = basis.iter().map(coset_representative).collect();
        assert_eq!(reps.len(), 3);
    }

    #[test]
    fn maximal_multisegment_has_longest_representative() {
        let m = m_sigma(&p("2413"));
        let basis = m.add(&m).support().enumerate();
        let top = basis
            .iter()
            .find(|x| basis.iter().all(|y| zelevinsky_leq(y, x).unwrap()))
            .expect("a maximum exists");
        let longest = basis
            .iter()
            .map(|x| coset_representative(x).length())
            .max()
            .unwrap();
        assert_eq!(coset_representative(top).length(), longest);
    }
}
