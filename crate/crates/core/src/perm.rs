//! Symmetric-group combinatorics in one-line notation.
//!
//! A [`Permutation`] of rank `n <= 16` is stored inline as a word of images
//! (1-based), so values are `Copy` and cheap to hash. The packed 64-bit code
//! (4 bits per letter, first letter in the most significant nibble) orders
//! permutations of a fixed rank lexicographically and is the key used by the
//! Kazhdan–Lusztig cache.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::PermError;

/// Largest supported rank.
pub const MAX_RANK: usize = 16;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    n: u8,
    word: [u8; MAX_RANK],
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        assert!((1..=MAX_RANK).contains(&n), "rank {n} out of range");
        let mut word = [0u8; MAX_RANK];
        for (i, slot) in word.iter_mut().enumerate().take(n) {
            *slot = i as u8 + 1;
        }
        Permutation { n: n as u8, word }
    }

    /// The longest element `w0 = n n-1 ... 1`.
    pub fn longest(n: usize) -> Self {
        assert!((1..=MAX_RANK).contains(&n), "rank {n} out of range");
        let mut word = [0u8; MAX_RANK];
        for (i, slot) in word.iter_mut().enumerate().take(n) {
            *slot = (n - i) as u8;
        }
        Permutation { n: n as u8, word }
    }

    pub fn from_word(word: &[u8]) -> Result<Self, PermError> {
        let n = word.len();
        if n == 0 || n > MAX_RANK {
            return Err(PermError::BadRank(n));
        }
        let mut seen = 0u32;
        let mut w = [0u8; MAX_RANK];
        for (i, &v) in word.iter().enumerate() {
            if v == 0 || v as usize > n {
                return Err(PermError::NotAPermutation(format!("{word:?}")));
            }
            if seen & (1 << v) != 0 {
                return Err(PermError::NotAPermutation(format!("{word:?}")));
            }
            seen |= 1 << v;
            w[i] = v;
        }
        Ok(Permutation {
            n: n as u8,
            word: w,
        })
    }

    /// Builds a permutation from 0-based images.
    pub(crate) fn from_zero_based(images: &[u8]) -> Self {
        let mut w = [0u8; MAX_RANK];
        for (i, &v) in images.iter().enumerate() {
            w[i] = v + 1;
        }
        Permutation {
            n: images.len() as u8,
            word: w,
        }
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn word(&self) -> &[u8] {
        &self.word[..self.n as usize]
    }

    /// Image of the 1-based position `i`.
    #[inline]
    pub fn at(&self, i: usize) -> usize {
        self.word[i - 1] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.word()
            .iter()
            .enumerate()
            .all(|(i, &v)| v as usize == i + 1)
    }

    fn check_rank(&self, other: &Self) -> Result<(), PermError> {
        if self.n != other.n {
            Err(PermError::RankMismatch(self.rank(), other.rank()))
        } else {
            Ok(())
        }
    }

    /// `(p ∘ q)(i) = p(q(i))`.
    pub fn compose(&self, q: &Self) -> Result<Self, PermError> {
        self.check_rank(q)?;
        Ok(self.compose_unchecked(q))
    }

    pub(crate) fn compose_unchecked(&self, q: &Self) -> Self {
        let mut w = [0u8; MAX_RANK];
        for i in 0..self.rank() {
            w[i] = self.word[q.word[i] as usize - 1];
        }
        Permutation { n: self.n, word: w }
    }

    pub fn inverse(&self) -> Self {
        let mut w = [0u8; MAX_RANK];
        for i in 0..self.rank() {
            w[self.word[i] as usize - 1] = i as u8 + 1;
        }
        Permutation { n: self.n, word: w }
    }

    /// Number of inversions.
    pub fn length(&self) -> usize {
        let w = self.word();
        let mut count = 0;
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                if w[i] > w[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// Conjugation by the longest element: `word[i] = n+1 - p(n+1-i)`.
    pub fn w0_conjugate(&self) -> Self {
        let n = self.rank();
        let mut w = [0u8; MAX_RANK];
        for i in 0..n {
            w[i] = (n + 1) as u8 - self.word[n - 1 - i];
        }
        Permutation { n: self.n, word: w }
    }

    /// `w0 ∘ p`: every value `v` replaced by `n+1-v`.
    pub fn left_w0(&self) -> Self {
        let n = self.rank();
        let mut w = self.word;
        for v in w.iter_mut().take(n) {
            *v = (n + 1) as u8 - *v;
        }
        Permutation { n: self.n, word: w }
    }

    /// The class `{p, p⁻¹, p^{w0}, (p⁻¹)^{w0}}`.
    pub fn equivalence_class(&self) -> BTreeSet<Permutation> {
        let inv = self.inverse();
        [*self, inv, self.w0_conjugate(), inv.w0_conjugate()]
            .into_iter()
            .collect()
    }

    /// Lexicographically least member of the equivalence class.
    pub fn class_representative(&self) -> Permutation {
        *self
            .equivalence_class()
            .iter()
            .next()
            .expect("class is nonempty")
    }

    /// `s_i ∘ p` for the simple reflection `s_i` (1-based, swaps values `i`, `i+1`).
    pub fn left_mul_simple(&self, i: usize) -> Self {
        let mut w = self.word;
        for v in w.iter_mut().take(self.rank()) {
            if *v as usize == i {
                *v = i as u8 + 1;
            } else if *v as usize == i + 1 {
                *v = i as u8;
            }
        }
        Permutation { n: self.n, word: w }
    }

    /// `p ∘ s_i` (swaps positions `i`, `i+1`).
    pub fn right_mul_simple(&self, i: usize) -> Self {
        let mut w = self.word;
        w.swap(i - 1, i);
        Permutation { n: self.n, word: w }
    }

    /// Left descents as a bitmask: bit `i-1` set iff `s_i p < p`.
    pub fn left_descents(&self) -> u16 {
        self.inverse().right_descents()
    }

    /// Right descents as a bitmask: bit `i-1` set iff `p(i) > p(i+1)`.
    pub fn right_descents(&self) -> u16 {
        let w = self.word();
        let mut mask = 0u16;
        for i in 0..w.len().saturating_sub(1) {
            if w[i] > w[i + 1] {
                mask |= 1 << i;
            }
        }
        mask
    }

    /// Bruhat order by rank-matrix dominance:
    /// `x <= w` iff `#{a <= i : x(a) >= j} <= #{a <= i : w(a) >= j}` for all `i, j`.
    pub fn bruhat_leq(&self, w: &Self) -> Result<bool, PermError> {
        self.check_rank(w)?;
        Ok(self.bruhat_leq_unchecked(w))
    }

    pub(crate) fn bruhat_leq_unchecked(&self, w: &Self) -> bool {
        let n = self.rank();
        let mut mx = 0u32;
        let mut mw = 0u32;
        for i in 0..n {
            mx |= 1 << (self.word[i] - 1);
            mw |= 1 << (w.word[i] - 1);
            // Counting values >= j for j = 2..n; j = 1 gives i+1 on both sides.
            for j in 1..n {
                let hi = !((1u32 << j) - 1);
                if (mx & hi).count_ones() > (mw & hi).count_ones() {
                    return false;
                }
            }
        }
        true
    }

    /// Whether some subsequence of `self` is order-isomorphic to `pattern`.
    pub fn contains_pattern(&self, pattern: &Self) -> bool {
        let k = pattern.rank();
        if k > self.rank() {
            return false;
        }
        let mut chosen = [0u8; MAX_RANK];
        contains_from(self.word(), pattern.word(), 0, 0, &mut chosen)
    }

    /// Avoids both 3412 and 4231.
    pub fn is_smooth(&self) -> bool {
        let p3412 = Permutation::from_word(&[3, 4, 1, 2]).unwrap();
        let p4231 = Permutation::from_word(&[4, 2, 3, 1]).unwrap();
        !self.contains_pattern(&p3412) && !self.contains_pattern(&p4231)
    }

    /// Packs the word at 4 bits per letter, first letter most significant.
    pub fn encode(&self) -> u64 {
        self.word()
            .iter()
            .fold(0u64, |acc, &v| (acc << 4) | (v as u64 - 1))
    }

    pub fn decode(n: usize, code: u64) -> Result<Self, PermError> {
        if n == 0 || n > MAX_RANK {
            return Err(PermError::BadRank(n));
        }
        if n < MAX_RANK && code >> (4 * n) != 0 {
            return Err(PermError::BadCode(code));
        }
        let mut w = [0u8; MAX_RANK];
        for (i, slot) in w.iter_mut().enumerate().take(n) {
            *slot = ((code >> (4 * (n - 1 - i))) & 0xf) as u8 + 1;
        }
        Permutation::from_word(&w[..n]).map_err(|_| PermError::BadCode(code))
    }

    /// All of `S_n` in lexicographic order.
    pub fn all(n: usize) -> AllPermutations {
        AllPermutations {
            next: Some(Permutation::identity(n)),
        }
    }

    /// Lexicographic successor, if any.
    pub fn next_lex(&self) -> Option<Self> {
        let n = self.rank();
        let mut w = self.word;
        let mut i = n.checked_sub(1)?;
        while i > 0 && w[i - 1] > w[i] {
            i -= 1;
        }
        if i == 0 {
            return None;
        }
        let mut j = n - 1;
        while w[j] < w[i - 1] {
            j -= 1;
        }
        w.swap(i - 1, j);
        w[i..n].reverse();
        Some(Permutation { n: self.n, word: w })
    }
}

fn contains_from(
    text: &[u8],
    pattern: &[u8],
    start: usize,
    depth: usize,
    chosen: &mut [u8],
) -> bool {
    if depth == pattern.len() {
        return true;
    }
    let remaining = pattern.len() - depth;
    for pos in start..=text.len() - remaining {
        let v = text[pos];
        let ok = (0..depth).all(|d| (chosen[d] < v) == (pattern[d] < pattern[depth]));
        if ok {
            chosen[depth] = v;
            if contains_from(text, pattern, pos + 1, depth + 1, chosen) {
                return true;
            }
        }
    }
    false
}

pub struct AllPermutations {
    next: Option<Permutation>,
}

impl Iterator for AllPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let cur = self.next?;
        self.next = cur.next_lex();
        Some(cur)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rank() <= 9 {
            for &v in self.word() {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.word().iter().map(|v| v.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

impl FromStr for Permutation {
    type Err = PermError;

    /// Accepts a digit string (`"463152"`, rank <= 9) or a comma-separated list.
    fn from_str(s: &str) -> Result<Self, PermError> {
        let s = s.trim();
        let word: Option<Vec<u8>> = if s.contains(',') {
            s.split(',').map(|t| t.trim().parse::<u8>().ok()).collect()
        } else {
            s.chars().map(|c| c.to_digit(10).map(|d| d as u8)).collect()
        };
        let word = word.ok_or_else(|| PermError::Parse(s.to_string()))?;
        Permutation::from_word(&word).map_err(|_| PermError::Parse(s.to_string()))
    }
}

impl serde::Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn compose_and_inverse() {
        let e = Permutation::identity(4);
        let x = p("3142");
        assert_eq!(e.compose(&x).unwrap(), x);
        assert_eq!(x.compose(&x.inverse()).unwrap(), e);
        assert_eq!(p("21").compose(&p("21")).unwrap(), p("12"));
        assert!(matches!(
            p("21").compose(&p("123")),
            Err(PermError::RankMismatch(2, 3))
        ));
    }

    #[test]
    fn lengths() {
        assert_eq!(Permutation::identity(4).length(), 0);
        assert_eq!(Permutation::longest(4).length(), 6);
        assert_eq!(p("3412").length(), 4);
    }

    #[test]
    fn bruhat_examples() {
        let w0 = Permutation::longest(4);
        for w in Permutation::all(4) {
            assert!(Permutation::identity(4).bruhat_leq(&w).unwrap());
            if w != w0 {
                assert!(!w0.bruhat_leq(&w).unwrap());
            }
        }
        assert!(p("2143").bruhat_leq(&p("3412")).unwrap());
        assert!(p("12").bruhat_leq(&p("123")).is_err());
    }

    #[test]
    fn patterns() {
        assert!(p("3412").contains_pattern(&p("3412")));
        assert!(!p("123456").contains_pattern(&p("3412")));
        assert!(p("463152").contains_pattern(&p("4231")));
        assert!(!p("12").contains_pattern(&p("123")));
        assert!(Permutation::all(3).all(|x| x.is_smooth()));
    }

    #[test]
    fn symmetries() {
        assert_eq!(
            p("456123")
                .equivalence_class()
                .into_iter()
                .collect::<Vec<_>>(),
            vec![p("456123")]
        );
        assert!(p("562341").equivalence_class().contains(&p("634512")));
        assert_eq!(
            Permutation::identity(5).w0_conjugate(),
            Permutation::identity(5)
        );
        assert_eq!(p("145623").class_representative(), p("145623"));
        assert_eq!(p("451236").class_representative(), p("145623"));
    }

    #[test]
    fn parsing_and_codes() {
        assert_eq!(p("1,3,2"), p("132"));
        assert!("1,1,2".parse::<Permutation>().is_err());
        assert!("14".parse::<Permutation>().is_err());
        assert!("".parse::<Permutation>().is_err());
        let big: Permutation = "10,9,8,7,6,5,4,3,2,1,11,12".parse().unwrap();
        assert_eq!(big.to_string(), "10,9,8,7,6,5,4,3,2,1,11,12");
        assert_eq!(
            Permutation::decode(4, p("3412").encode()).unwrap(),
            p("3412")
        );
        assert_eq!(p("2143").encode(), 0x1032);
        assert!(Permutation::decode(3, 0x000).is_err());
        let all16 = Permutation::longest(16);
        assert_eq!(Permutation::decode(16, all16.encode()).unwrap(), all16);
    }

    #[test]
    fn descents() {
        let x = p("3142");
        assert_eq!(x.right_descents(), 0b101);
        // s_i x < x iff i+1 appears before i: 2 before 1? no; 3 before 2: yes; 4 before 3? no
        assert_eq!(x.left_descents(), 0b010);
        for i in 1..4 {
            let y = x.left_mul_simple(i);
            assert_eq!(
                y.length() < x.length(),
                x.left_descents() & (1 << (i - 1)) != 0
            );
        }
    }

    #[test]
    fn lexicographic_enumeration() {
        let all: Vec<_> = Permutation::all(4).collect();
        assert_eq!(all.len(), 24);
        assert!(all
            .windows(2)
            .all(|w| w[0] < w[1] && w[0].encode() < w[1].encode()));
    }
}
