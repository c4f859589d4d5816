//! Products of irreducibles in the Grothendieck group.
//!
//! On a fixed support the standard modules `ζ(m)` and the irreducibles `Z(m)`
//! are related by a unitriangular matrix whose entries are values at `q = 1`
//! of Kazhdan–Lusztig polynomials evaluated at double-coset representatives.
//! Inverting it expresses `Z(m)` through standards; standards multiply by
//! concatenating their segments, and the product is re-expanded on the
//! support of `m1 + m2`.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use parking_lot::RwLock;
use rayon::prelude::*;

use crate::cosets::Extreme;
use crate::error::DecompositionError;
use crate::kl::{kl_at_one, KlCache};
use crate::multiseg::{coset_element, m_sigma, EndOrder, Multisegment, Support};
use crate::perm::Permutation;

/// Support classes above this many basis elements need `force`.
pub const DEFAULT_BASIS_BOUND: usize = 5000;

/// How multisegments are turned into permutations for the KL lookup.
///
/// With [`EndOrder::Increasing`] the map reverses the closure order and the
/// multiplicity of `Z(n)` in `ζ(m)` is `P_{rep(m), rep(n)}(1)`; with
/// [`EndOrder::Decreasing`] it preserves it and the entry is
/// `P_{rep(n), rep(m)}(1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct Convention {
    pub order: EndOrder,
    pub extreme: Extreme,
}

impl Convention {
    /// The convention under which every small-rank invariant holds.
    pub const FROZEN: Convention = Convention {
        order: EndOrder::Increasing,
        extreme: Extreme::Max,
    };

    pub fn all() -> [Convention; 4] {
        let c = |order, extreme| Convention { order, extreme };
        [
            c(EndOrder::Increasing, Extreme::Max),
            c(EndOrder::Increasing, Extreme::Min),
            c(EndOrder::Decreasing, Extreme::Max),
            c(EndOrder::Decreasing, Extreme::Min),
        ]
    }

    pub fn representative(&self, m: &Multisegment) -> Permutation {
        coset_element(m, self.order, self.extreme)
    }

    fn multiplicity(
        &self,
        rep_n: &Permutation,
        rep_m: &Permutation,
        cache: &KlCache,
    ) -> Result<u64, DecompositionError> {
        let (x, w) = match self.order {
            EndOrder::Increasing => (rep_m, rep_n),
            EndOrder::Decreasing => (rep_n, rep_m),
        };
        Ok(kl_at_one(x, w, cache)?)
    }
}

impl Default for Convention {
    fn default() -> Self {
        Convention::FROZEN
    }
}

/// Size limits and representative convention for a decomposition.
#[derive(Clone, Copy, Debug)]
pub struct DecompositionOptions {
    pub convention: Convention,
    pub basis_bound: usize,
    pub force: bool,
}

impl Default for DecompositionOptions {
    fn default() -> Self {
        DecompositionOptions {
            convention: Convention::FROZEN,
            basis_bound: DEFAULT_BASIS_BOUND,
            force: false,
        }
    }
}

/// Which basis a [`GrothendieckVector`] is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Basis {
    Irreducible,
    Standard,
}

/// A finitely supported integer combination of `[Z(m)]` or `[ζ(m)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrothendieckVector {
    pub basis: Basis,
    coeffs: BTreeMap<Multisegment, i64>,
}

impl GrothendieckVector {
    pub fn new(basis: Basis) -> Self {
        GrothendieckVector {
            basis,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, m: Multisegment, c: i64) {
        if c == 0 {
            return;
        }
        match self.coeffs.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if *e.get() == 0 {
                    e.remove();
                }
            }
        }
    }

    pub fn coeff(&self, m: &Multisegment) -> i64 {
        self.coeffs.get(m).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Multisegment, i64)> {
        self.coeffs.iter().map(|(m, &c)| (m, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// The matrix `P[n][m] = [ζ(m) : Z(n)]` on one support class.
///
/// Columns are produced on demand and memoised; [`TransitionMatrix::fill`]
/// computes all of them in parallel.
pub struct TransitionMatrix {
    support: Support,
    convention: Convention,
    basis: Vec<Multisegment>,
    index: HashMap<Multisegment, usize>,
    reps: Vec<Permutation>,
    ranks: Vec<Vec<u16>>,
    /// Basis indices sorted so that larger elements come first.
    order: Vec<usize>,
    columns: RwLock<Vec<Option<Vec<(usize, u64)>>>>,
}

impl fmt::Debug for TransitionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransitionMatrix")
            .field("support", &self.support)
            .field("size", &self.basis.len())
            .finish()
    }
}

/// Rank function sampled at (begin class, end class) pairs; enough to decide the closure order.
fn compact_ranks(m: &Multisegment, support: &Support) -> Vec<u16> {
    let mut out = Vec::new();
    for &(a, _) in &support.begin_classes {
        for &(b, _) in &support.end_classes {
            if a <= b {
                let r = m
                    .segments()
                    .iter()
                    .filter(|s| s.begin() <= a && b <= s.end())
                    .count();
                out.push(r as u16);
            }
        }
    }
    out
}

impl TransitionMatrix {
    pub fn new(
        support: &Support,
        options: &DecompositionOptions,
    ) -> Result<Self, DecompositionError> {
        if support.size() > crate::perm::MAX_RANK {
            return Err(DecompositionError::BudgetExceeded {
                size: support.size(),
                bound: crate::perm::MAX_RANK,
            });
        }
        if let Some(&b) = support
            .ends()
            .iter()
            .find(|&&b| support.begins().contains(&(b + 1)))
        {
            return Err(DecompositionError::Juxtaposed(b));
        }
        let basis = support.enumerate();
        if basis.len() > options.basis_bound && !options.force {
            return Err(DecompositionError::BudgetExceeded {
                size: basis.len(),
                bound: options.basis_bound,
            });
        }
        let index = basis
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        let convention = options.convention;
        let reps = if support.size() == 0 {
            vec![Permutation::identity(1); basis.len()]
        } else {
            basis.iter().map(|m| convention.representative(m)).collect()
        };
        let ranks: Vec<Vec<u16>> = basis.iter().map(|m| compact_ranks(m, support)).collect();
        let mut order: Vec<usize> = (0..basis.len()).collect();
        let weight = |i: usize| ranks[i].iter().map(|&r| r as u64).sum::<u64>();
        order.sort_by_key(|&i| (weight(i), i));
        let columns = RwLock::new(vec![None; basis.len()]);
        Ok(TransitionMatrix {
            support: support.clone(),
            convention,
            basis,
            index,
            reps,
            ranks,
            order,
            columns,
        })
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// The support class, in enumeration order.
    pub fn basis(&self) -> &[Multisegment] {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn index_of(&self, m: &Multisegment) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn representative(&self, i: usize) -> Permutation {
        self.reps[i]
    }

    /// Closure order between basis elements `i <= j`.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.ranks[i]
            .iter()
            .zip(&self.ranks[j])
            .all(|(a, b)| a >= b)
    }

    /// Nonzero entries `(n, P[n][m])` of column `m`, sorted by `n`.
    pub fn column(
        &self,
        m: usize,
        cache: &KlCache,
    ) -> Result<Vec<(usize, u64)>, DecompositionError> {
        if let Some(col) = &self.columns.read()[m] {
            return Ok(col.clone());
        }
        let col = self.compute_column(m, cache)?;
        self.columns.write()[m] = Some(col.clone());
        Ok(col)
    }

    fn compute_column(
        &self,
        m: usize,
        cache: &KlCache,
    ) -> Result<Vec<(usize, u64)>, DecompositionError> {
        let mut col = Vec::new();
        for n in 0..self.basis.len() {
            if n == m {
                col.push((n, 1));
                continue;
            }
            if !self.leq(n, m) {
                continue;
            }
            let v = self
                .convention
                .multiplicity(&self.reps[n], &self.reps[m], cache)?;
            if v != 0 {
                col.push((n, v));
            }
        }
        let diag = self
            .convention
            .multiplicity(&self.reps[m], &self.reps[m], cache)?;
        if diag != 1 {
            return Err(DecompositionError::Consistency(format!(
                "diagonal entry {diag} at {}",
                self.basis[m]
            )));
        }
        Ok(col)
    }

    /// Computes every column, in parallel.
    pub fn fill(&self, cache: &KlCache) -> Result<(), DecompositionError> {
        let missing: Vec<usize> = {
            let cols = self.columns.read();
            (0..self.basis.len())
                .filter(|&i| cols[i].is_none())
                .collect()
        };
        let computed = missing
            .par_iter()
            .map(|&m| self.compute_column(m, cache).map(|c| (m, c)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut cols = self.columns.write();
        for (m, c) in computed {
            cols[m] = Some(c);
        }
        Ok(())
    }

    /// `P[n][m]`.
    pub fn entry(&self, n: usize, m: usize, cache: &KlCache) -> Result<u64, DecompositionError> {
        let col = self.column(m, cache)?;
        Ok(col
            .binary_search_by_key(&n, |e| e.0)
            .map(|k| col[k].1)
            .unwrap_or(0))
    }

    /// Column `m` of the inverse matrix: `[Z(m)] = Σ_n Q[n][m] [ζ(n)]`.
    pub fn inverse_column(
        &self,
        m: usize,
        cache: &KlCache,
    ) -> Result<Vec<(usize, i64)>, DecompositionError> {
        let mut residual: HashMap<usize, i128> = HashMap::from([(m, 1)]);
        let mut out = Vec::new();
        for &p in &self.order {
            let Some(&q) = residual.get(&p) else { continue };
            if q == 0 {
                continue;
            }
            let q = i64::try_from(q).map_err(|_| {
                DecompositionError::Consistency("inverse entry overflows i64".into())
            })?;
            out.push((p, q));
            for (n, v) in self.column(p, cache)? {
                if n != p {
                    *residual.entry(n).or_insert(0) -= v as i128 * q as i128;
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }
}

/// `[Z(m)]` in the standard basis of its support class.
pub fn irreducible_in_standards(
    m: &Multisegment,
    cache: &KlCache,
    options: &DecompositionOptions,
) -> Result<GrothendieckVector, DecompositionError> {
    let matrix = TransitionMatrix::new(&m.support(), options)?;
    let i = matrix.index_of(m).expect("m lies in its own support class");
    let mut v = GrothendieckVector::new(Basis::Standard);
    for (n, q) in matrix.inverse_column(i, cache)? {
        v.add(matrix.basis()[n].clone(), q);
    }
    Ok(v)
}

/// Classification of `σ` by the length of `Z(m_σ) × Z(m_σ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Tag {
    Smooth,
    AlmostSmooth,
    Wild,
}

impl Tag {
    pub fn from_length(l: u64) -> Tag {
        match l {
            1 => Tag::Smooth,
            2 => Tag::AlmostSmooth,
            _ => Tag::Wild,
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tag::Smooth => "SMOOTH",
            Tag::AlmostSmooth => "ALMOST_SMOOTH",
            Tag::Wild => "WILD",
        })
    }
}

/// Jordan–Hölder content of `Z(m1) × Z(m2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionReport {
    pub m1: Multisegment,
    pub m2: Multisegment,
    /// Constituents with positive multiplicity, sorted by multisegment.
    pub constituents: Vec<(Multisegment, u64)>,
    pub length: u64,
    pub distinct: usize,
    /// multiplicity ↦ number of constituents occurring with it
    pub profile: BTreeMap<u64, usize>,
    pub tag: Option<Tag>,
}

impl DecompositionReport {
    fn from_constituents(
        m1: Multisegment,
        m2: Multisegment,
        constituents: Vec<(Multisegment, u64)>,
    ) -> Self {
        let mut profile = BTreeMap::new();
        for (_, k) in &constituents {
            *profile.entry(*k).or_insert(0) += 1;
        }
        DecompositionReport {
            length: constituents.iter().map(|c| c.1).sum(),
            distinct: constituents.len(),
            m1,
            m2,
            constituents,
            profile,
            tag: None,
        }
    }

    pub fn multiplicity(&self, n: &Multisegment) -> u64 {
        self.constituents
            .iter()
            .find(|c| &c.0 == n)
            .map(|c| c.1)
            .unwrap_or(0)
    }

    pub fn is_multiplicity_free(&self) -> bool {
        self.constituents.iter().all(|c| c.1 == 1)
    }

    /// Multiplicities in decreasing order.
    pub fn multiplicities(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.constituents.iter().map(|c| c.1).collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }
}

#[derive(serde::Serialize)]
struct ReportInput<'a> {
    m1: &'a Multisegment,
    m2: &'a Multisegment,
}

#[derive(serde::Serialize)]
struct ReportConstituent<'a> {
    multisegment: &'a Multisegment,
    multiplicity: u64,
}

#[derive(serde::Serialize)]
struct ReportJson<'a> {
    input: ReportInput<'a>,
    constituents: Vec<ReportConstituent<'a>>,
    length: u64,
    distinct: usize,
    profile: BTreeMap<String, usize>,
    tag: Option<Tag>,
}

impl serde::Serialize for DecompositionReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ReportJson {
            input: ReportInput {
                m1: &self.m1,
                m2: &self.m2,
            },
            constituents: self
                .constituents
                .iter()
                .map(|(m, k)| ReportConstituent {
                    multisegment: m,
                    multiplicity: *k,
                })
                .collect(),
            length: self.length,
            distinct: self.distinct,
            profile: self
                .profile
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
            tag: self.tag,
        }
        .serialize(s)
    }
}

/// Transition matrices shared between decompositions, keyed by support and convention.
#[derive(Default)]
pub struct MatrixCache {
    matrices: RwLock<HashMap<(Vec<i64>, Vec<i64>, Convention), std::sync::Arc<TransitionMatrix>>>,
}

impl MatrixCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(
        &self,
        support: &Support,
        options: &DecompositionOptions,
    ) -> Result<std::sync::Arc<TransitionMatrix>, DecompositionError> {
        let key = (
            support.begins().to_vec(),
            support.ends().to_vec(),
            options.convention,
        );
        if let Some(m) = self.matrices.read().get(&key) {
            return Ok(m.clone());
        }
        let m = std::sync::Arc::new(TransitionMatrix::new(support, options)?);
        Ok(self.matrices.write().entry(key).or_insert(m).clone())
    }
}

/// Decomposes `Z(m1) × Z(m2)`.
pub fn product_decomposition(
    m1: &Multisegment,
    m2: &Multisegment,
    cache: &KlCache,
    options: &DecompositionOptions,
) -> Result<DecompositionReport, DecompositionError> {
    product_decomposition_with(m1, m2, cache, &MatrixCache::new(), options)
}

/// As [`product_decomposition`], reusing transition matrices from `matrices`.
pub fn product_decomposition_with(
    m1: &Multisegment,
    m2: &Multisegment,
    cache: &KlCache,
    matrices: &MatrixCache,
    options: &DecompositionOptions,
) -> Result<DecompositionReport, DecompositionError> {
    let sum = m1.add(m2);
    if sum.is_empty() {
        return Ok(DecompositionReport::from_constituents(
            m1.clone(),
            m2.clone(),
            vec![(sum, 1)],
        ));
    }
    let big = matrices.get(&sum.support(), options)?;
    let expand = |m: &Multisegment| -> Result<Vec<(Multisegment, i64)>, DecompositionError> {
        if m.is_empty() {
            return Ok(vec![(Multisegment::empty(), 1)]);
        }
        let t = matrices.get(&m.support(), options)?;
        let i = t.index_of(m).expect("m lies in its own support class");
        Ok(t.inverse_column(i, cache)?
            .into_iter()
            .map(|(n, q)| (t.basis()[n].clone(), q))
            .collect())
    };
    let q1 = expand(m1)?;
    let q2 = if m2 == m1 { q1.clone() } else { expand(m2)? };

    let mut standards: BTreeMap<usize, i128> = BTreeMap::new();
    for (n1, c1) in &q1 {
        for (n2, c2) in &q2 {
            let p = big.index_of(&n1.add(n2)).ok_or_else(|| {
                DecompositionError::Consistency(format!("{n1} + {n2} outside the product support"))
            })?;
            *standards.entry(p).or_insert(0) += *c1 as i128 * *c2 as i128;
        }
    }
    let mut irreducibles: BTreeMap<usize, i128> = BTreeMap::new();
    for (&p, &c) in &standards {
        if c == 0 {
            continue;
        }
        for (n, v) in big.column(p, cache)? {
            *irreducibles.entry(n).or_insert(0) += c * v as i128;
        }
    }
    let mut constituents = Vec::new();
    for (n, c) in irreducibles {
        if c < 0 {
            return Err(DecompositionError::Consistency(format!(
                "negative multiplicity {c} of {} in {m1} × {m2}",
                big.basis()[n]
            )));
        }
        if c > 0 {
            constituents.push((big.basis()[n].clone(), c as u64));
        }
    }
    constituents.sort();
    let report = DecompositionReport::from_constituents(m1.clone(), m2.clone(), constituents);
    let top = report.multiplicity(&sum);
    if top != 1 {
        return Err(DecompositionError::Consistency(format!(
            "Z({sum}) occurs {top} times in {m1} × {m2}"
        )));
    }
    Ok(report)
}

/// Decomposition of `Z(m_σ) × Z(m_σ)` with its classification tag.
pub fn square_report(
    sigma: &Permutation,
    cache: &KlCache,
    options: &DecompositionOptions,
) -> Result<DecompositionReport, DecompositionError> {
    square_report_with(sigma, cache, &MatrixCache::new(), options)
}

pub fn square_report_with(
    sigma: &Permutation,
    cache: &KlCache,
    matrices: &MatrixCache,
    options: &DecompositionOptions,
) -> Result<DecompositionReport, DecompositionError> {
    let m = m_sigma(sigma);
    let mut report = product_decomposition_with(&m, &m, cache, matrices, options)?;
    let tag = Tag::from_length(report.length);
    if (tag == Tag::Smooth) != sigma.is_smooth() {
        return Err(DecompositionError::Consistency(format!(
            "{sigma}: length {} but pattern test says smooth = {}",
            report.length,
            sigma.is_smooth()
        )));
    }
    report.tag = Some(tag);
    Ok(report)
}
