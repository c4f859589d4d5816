use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Arc;

use parking_lot::RwLock;

use super::poly::KlPolynomial;
use crate::cosets::{max_in_double_coset, normalized_ideal};
use crate::error::{CacheError, KlError};
use crate::perm::Permutation;

const MAGIC: &[u8; 4] = b"KLC1";
const FORMAT_VERSION: u32 = 1;

/// One of the four symmetries `w ↦ w, w⁻¹, w0ww0, w0w⁻¹w0` preserving `P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    Identity,
    Inverse,
    Conjugate,
    Both,
}

impl Symmetry {
    const ALL: [Symmetry; 4] = [
        Symmetry::Identity,
        Symmetry::Inverse,
        Symmetry::Conjugate,
        Symmetry::Both,
    ];

    // each symmetry is an involution
    fn apply(self, p: &Permutation) -> Permutation {
        match self {
            Symmetry::Identity => *p,
            Symmetry::Inverse => p.inverse(),
            Symmetry::Conjugate => p.w0_conjugate(),
            Symmetry::Both => p.inverse().w0_conjugate(),
        }
    }
}

fn canonical(w: &Permutation) -> (Permutation, Symmetry) {
    Symmetry::ALL
        .iter()
        .map(|&s| (s.apply(w), s))
        .min_by_key(|(img, _)| img.encode())
        .expect("four candidates")
}

/// Stored values of `P_{·,w}` for a canonical `w`, one per maximal
/// `(L(w), R(w))` double-coset representative, sorted by packed code.
struct Column {
    w: Permutation,
    lmask: u16,
    rmask: u16,
    entries: Vec<(u64, u32)>,
}

impl Column {
    fn lookup_normalized(&self, code: u64) -> Option<u32> {
        self.entries
            .binary_search_by_key(&code, |e| e.0)
            .ok()
            .map(|i| self.entries[i].1)
    }

    fn lookup(&self, x: &Permutation) -> Option<u32> {
        let y = max_in_double_coset(x, self.lmask, self.rmask);
        self.lookup_normalized(y.encode())
    }
}

/// A column seen through the symmetry that maps the queried `w` to its canonical form.
struct View {
    col: Arc<Column>,
    sym: Symmetry,
}

impl View {
    fn get(&self, x: &Permutation) -> Option<u32> {
        self.col.lookup(&self.sym.apply(x))
    }

    /// Stored entries expressed in the coordinates of the queried `w`.
    fn entries(&self) -> impl Iterator<Item = (Permutation, u32)> + '_ {
        let n = self.col.w.rank();
        self.col.entries.iter().map(move |&(code, id)| {
            let x = Permutation::decode(n, code).expect("stored codes are valid");
            (self.sym.apply(&x), id)
        })
    }
}

#[derive(Default)]
struct PolyTable {
    list: Vec<KlPolynomial>,
    index: HashMap<KlPolynomial, u32>,
}

impl PolyTable {
    fn intern(&mut self, p: KlPolynomial) -> u32 {
        if let Some(&id) = self.index.get(&p) {
            return id;
        }
        let id = self.list.len() as u32;
        self.list.push(p.clone());
        self.index.insert(p, id);
        id
    }
}

struct RankTable {
    columns: RwLock<HashMap<u64, Arc<Column>>>,
    polys: RwLock<PolyTable>,
}

impl RankTable {
    fn new() -> Self {
        let mut polys = PolyTable::default();
        polys.intern(KlPolynomial::one());
        RankTable {
            columns: RwLock::new(HashMap::new()),
            polys: RwLock::new(polys),
        }
    }
}

/// Snapshot of cache counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    /// Stored `(x, w)` pairs.
    pub entries: u64,
    pub columns: u64,
    pub distinct_polynomials: u64,
    /// Approximate resident size of stored data.
    pub bytes: u64,
}

/// Memo table for Kazhdan–Lusztig polynomials, shared by all ranks.
///
/// Readers may query concurrently; a missing column is computed outside any
/// lock and inserted afterwards (concurrent computations of the same column
/// produce identical values, so the first insert wins).
pub struct KlCache {
    tables: RwLock<BTreeMap<usize, Arc<RankTable>>>,
    budget: Option<usize>,
    hits: AtomicU64,
    misses: AtomicU64,
    bytes: AtomicUsize,
}

impl Default for KlCache {
    fn default() -> Self {
        Self::new()
    }
}

impl KlCache {
    pub fn new() -> Self {
        KlCache {
            tables: RwLock::new(BTreeMap::new()),
            budget: None,
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
            bytes: AtomicUsize::new(0),
        }
    }

    /// A cache whose computations fail with [`KlError::BudgetExceeded`] once
    /// the stored data passes `bytes`.
    pub fn with_budget(bytes: usize) -> Self {
        KlCache {
            budget: Some(bytes),
            ..Self::new()
        }
    }

    pub fn budget(&self) -> Option<usize> {
        self.budget
    }

    fn table(&self, n: usize) -> Arc<RankTable> {
        if let Some(t) = self.tables.read().get(&n) {
            return t.clone();
        }
        self.tables
            .write()
            .entry(n)
            .or_insert_with(|| Arc::new(RankTable::new()))
            .clone()
    }

    pub(super) fn polynomial(
        &self,
        x: &Permutation,
        w: &Permutation,
    ) -> Result<KlPolynomial, KlError> {
        let table = self.table(w.rank());
        if !x.bruhat_leq_unchecked(w) {
            return Ok(KlPolynomial::zero());
        }
        let view = self.view(&table, w)?;
        let id = view.get(x).ok_or_else(|| KlError::Inconsistent {
            x: x.to_string(),
            w: w.to_string(),
        })?;
        let p = table.polys.read().list[id as usize].clone();
        Ok(p)
    }

    fn view(&self, table: &RankTable, w: &Permutation) -> Result<View, KlError> {
        let (wc, sym) = canonical(w);
        let col = self.column(table, &wc)?;
        Ok(View { col, sym })
    }

    fn column(&self, table: &RankTable, wc: &Permutation) -> Result<Arc<Column>, KlError> {
        let code = wc.encode();
        if let Some(col) = table.columns.read().get(&code) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(col.clone());
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let col = Arc::new(self.compute_column(table, wc)?);
        let added = {
            let mut columns = table.columns.write();
            if columns.contains_key(&code) {
                None
            } else {
                columns.insert(code, col.clone());
                Some(col.entries.len())
            }
        };
        if let Some(len) = added {
            let used = self.bytes.fetch_add(len * 16 + 64, Ordering::Relaxed) + len * 16 + 64;
            if let Some(budget) = self.budget {
                if used > budget {
                    return Err(KlError::BudgetExceeded { budget, used });
                }
            }
        }
        Ok(col)
    }

    fn compute_column(&self, table: &RankTable, w: &Permutation) -> Result<Column, KlError> {
        let lmask = w.left_descents();
        let rmask = w.right_descents();
        if lmask == 0 {
            // identity
            return Ok(Column {
                w: *w,
                lmask,
                rmask,
                entries: vec![(w.encode(), 0)],
            });
        }
        let s = lmask.trailing_zeros() as usize + 1;
        let v = w.left_mul_simple(s);
        let lw = w.length();
        let lv = lw - 1;
        let view_v = self.view(table, &v)?;

        // z < v with μ(z, v) != 0 and sz < z
        let mut mu_terms: Vec<(Permutation, u64)> = Vec::new();
        {
            let polys = table.polys.read();
            for (z, id) in view_v.entries() {
                if z == v || z.left_descents() & (1 << (s - 1)) == 0 {
                    continue;
                }
                let d = lv - z.length();
                if d % 2 == 1 {
                    let m = polys.list[id as usize].coeff((d - 1) / 2);
                    if m != 0 {
                        mu_terms.push((z, m));
                    }
                }
            }
        }
        // covers of v are never stored (they normalise to v) but have μ = 1
        let mut covers = HashSet::new();
        let (lv_mask, rv_mask) = (v.left_descents(), v.right_descents());
        for t in 1..v.rank() {
            if lv_mask & (1 << (t - 1)) != 0 {
                covers.insert(v.left_mul_simple(t));
            }
            if rv_mask & (1 << (t - 1)) != 0 {
                covers.insert(v.right_mul_simple(t));
            }
        }
        let mut covers: Vec<_> = covers.into_iter().collect();
        covers.sort();
        for z in covers {
            if z.left_descents() & (1 << (s - 1)) != 0 {
                mu_terms.push((z, 1));
            }
        }
        let mut terms = Vec::with_capacity(mu_terms.len());
        for (z, m) in mu_terms {
            let shift = (lw - z.length()) / 2;
            terms.push((self.view(table, &z)?, m, shift));
        }

        let ideal = normalized_ideal(w);
        let mut values: Vec<(u64, KlPolynomial)> = Vec::with_capacity(ideal.len());
        {
            let polys = table.polys.read();
            let get = |view: &View, x: &Permutation| view.get(x).map(|id| &polys.list[id as usize]);
            let mut acc: Vec<i128> = Vec::new();
            for x in &ideal {
                acc.clear();
                let sx = x.left_mul_simple(s);
                if let Some(p) = get(&view_v, &sx) {
                    add_shifted(&mut acc, p, 0, 1);
                }
                if let Some(p) = get(&view_v, x) {
                    add_shifted(&mut acc, p, 1, 1);
                }
                for (view_z, m, shift) in &terms {
                    if let Some(p) = get(view_z, x) {
                        add_shifted(&mut acc, p, *shift, -(*m as i128));
                    }
                }
                let mut coeffs = Vec::with_capacity(acc.len());
                for &c in &acc {
                    if c < 0 {
                        return Err(KlError::Inconsistent {
                            x: x.to_string(),
                            w: w.to_string(),
                        });
                    }
                    coeffs.push(u64::try_from(c).map_err(|_| KlError::Overflow {
                        x: x.to_string(),
                        w: w.to_string(),
                    })?);
                }
                values.push((x.encode(), KlPolynomial::from_coeffs(coeffs)));
            }
        }
        let mut entries = Vec::with_capacity(values.len());
        {
            let mut polys = table.polys.write();
            for (code, p) in values {
                if p.is_zero() {
                    return Err(KlError::Inconsistent {
                        x: format!("{code:#x}"),
                        w: w.to_string(),
                    });
                }
                entries.push((code, polys.intern(p)));
            }
        }
        entries.sort_unstable_by_key(|e| e.0);
        Ok(Column {
            w: *w,
            lmask,
            rmask,
            entries,
        })
    }

    pub fn stats(&self) -> CacheStats {
        let tables = self.tables.read();
        let mut stats = CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            ..Default::default()
        };
        for t in tables.values() {
            let cols = t.columns.read();
            stats.columns += cols.len() as u64;
            stats.entries += cols.values().map(|c| c.entries.len() as u64).sum::<u64>();
            let polys = t.polys.read();
            stats.distinct_polynomials += polys.list.len() as u64;
            stats.bytes += polys
                .list
                .iter()
                .map(|p| 32 + 8 * p.coeffs().len() as u64)
                .sum::<u64>();
        }
        stats.bytes += self.bytes.load(Ordering::Relaxed) as u64;
        stats
    }

    /// Ranks that have at least one stored column.
    pub fn ranks(&self) -> Vec<usize> {
        self.tables
            .read()
            .iter()
            .filter(|(_, t)| !t.columns.read().is_empty())
            .map(|(&n, _)| n)
            .collect()
    }

    /// All stored entries of rank `n` as `((x, w), P)`, sorted by key.
    fn sorted_entries(
        &self,
        n: usize,
        filter: impl Fn(&Permutation) -> bool,
    ) -> Vec<((u64, u64), KlPolynomial)> {
        let table = self.table(n);
        let cols = table.columns.read();
        let polys = table.polys.read();
        let mut out: Vec<_> = cols
            .values()
            .filter(|c| filter(&c.w))
            .flat_map(|c| {
                let wcode = c.w.encode();
                c.entries.iter().map(move |&(x, id)| ((x, wcode), id))
            })
            .map(|(k, id)| (k, polys.list[id as usize].clone()))
            .collect();
        out.sort_unstable_by_key(|e| e.0);
        out
    }

    /// Writes every rank-`n` entry to `path`.
    pub fn save(&self, n: usize, path: &Path) -> Result<(), CacheError> {
        let entries = self.sorted_entries(n, |_| true);
        write_file(path, n, &entries)
    }

    /// Writes one file per rank and per `ℓ(w)` under `dir`.
    pub fn save_dir(&self, dir: &Path) -> Result<Vec<PathBuf>, CacheError> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for n in self.ranks() {
            let max_len = n * (n - 1) / 2;
            for len in 0..=max_len {
                let entries = self.sorted_entries(n, |w| w.length() == len);
                if entries.is_empty() {
                    continue;
                }
                let path = dir.join(shard_name(n, len));
                write_file(&path, n, &entries)?;
                written.push(path);
            }
        }
        Ok(written)
    }

    /// Merges the entries of a cache file into this cache.
    pub fn load_into(&self, path: &Path) -> Result<usize, CacheError> {
        let (n, entries) = read_file(path)?;
        if entries.is_empty() {
            return Ok(0);
        }
        let table = self.table(n);
        let mut grouped: BTreeMap<u64, Vec<(u64, KlPolynomial)>> = BTreeMap::new();
        for ((x, w), p) in entries {
            grouped.entry(w).or_default().push((x, p));
        }
        let mut added = 0;
        for (wcode, xs) in grouped {
            let w =
                Permutation::decode(n, wcode).map_err(|e| CacheError::Corrupt(e.to_string()))?;
            if canonical(&w).0 != w {
                return Err(CacheError::Corrupt(format!("{w} is not a canonical key")));
            }
            let (lmask, rmask) = (w.left_descents(), w.right_descents());
            let mut col_entries = Vec::with_capacity(xs.len());
            {
                let mut polys = table.polys.write();
                for (xcode, p) in xs {
                    let x = Permutation::decode(n, xcode)
                        .map_err(|e| CacheError::Corrupt(e.to_string()))?;
                    if max_in_double_coset(&x, lmask, rmask) != x || !x.bruhat_leq_unchecked(&w) {
                        return Err(CacheError::Corrupt(format!(
                            "entry ({x}, {w}) is not normalised"
                        )));
                    }
                    col_entries.push((xcode, polys.intern(p)));
                }
            }
            col_entries.sort_unstable_by_key(|e| e.0);
            let mut columns = table.columns.write();
            match columns.get(&wcode) {
                Some(existing) if existing.entries.len() >= col_entries.len() => {}
                _ => {
                    added += col_entries.len();
                    self.bytes
                        .fetch_add(col_entries.len() * 16 + 64, Ordering::Relaxed);
                    columns.insert(
                        wcode,
                        Arc::new(Column {
                            w,
                            lmask,
                            rmask,
                            entries: col_entries,
                        }),
                    );
                }
            }
        }
        Ok(added)
    }

    /// A fresh cache holding the contents of one file.
    pub fn load(path: &Path) -> Result<KlCache, CacheError> {
        let cache = KlCache::new();
        cache.load_into(path)?;
        Ok(cache)
    }

    /// Loads every `*.klc` file in `dir` (missing directory is an empty cache).
    pub fn load_dir_into(&self, dir: &Path) -> Result<usize, CacheError> {
        if !dir.exists() {
            return Ok(0);
        }
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "klc"))
            .collect();
        paths.sort();
        let mut total = 0;
        for p in paths {
            total += self.load_into(&p)?;
        }
        Ok(total)
    }
}

fn shard_name(n: usize, len: usize) -> String {
    format!("kl-s{n:02}-l{len:03}.klc")
}

fn write_file(
    path: &Path,
    n: usize,
    entries: &[((u64, u64), KlPolynomial)],
) -> Result<(), CacheError> {
    let mut body = Vec::with_capacity(17 + entries.len() * 26);
    body.extend_from_slice(MAGIC);
    body.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    body.push(n as u8);
    body.extend_from_slice(&(entries.len() as u64).to_le_bytes());
    for ((x, w), p) in entries {
        body.extend_from_slice(&x.to_le_bytes());
        body.extend_from_slice(&w.to_le_bytes());
        let coeffs = p.coeffs();
        let count = u8::try_from(coeffs.len())
            .map_err(|_| CacheError::Corrupt("polynomial degree above 254".into()))?;
        body.push(count);
        for c in coeffs {
            body.extend_from_slice(&c.to_le_bytes());
        }
    }
    let crc = crc32fast::hash(&body);
    let tmp = path.with_extension("klc.tmp");
    {
        let mut f = BufWriter::new(fs::File::create(&tmp)?);
        f.write_all(&body)?;
        f.write_all(&crc.to_le_bytes())?;
        f.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, k: usize) -> Result<&[u8], CacheError> {
        let end = self.pos.checked_add(k).ok_or(CacheError::Truncated)?;
        let s = self.buf.get(self.pos..end).ok_or(CacheError::Truncated)?;
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64, CacheError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

fn read_file(path: &Path) -> Result<(usize, Vec<((u64, u64), KlPolynomial)>), CacheError> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 4 {
        return Err(CacheError::Truncated);
    }
    let magic: [u8; 4] = bytes[..4].try_into().unwrap();
    if &magic != MAGIC {
        return Err(CacheError::BadMagic(magic));
    }
    if bytes.len() < 8 {
        return Err(CacheError::Truncated);
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(CacheError::Version(version));
    }
    if bytes.len() < 4 + 4 + 1 + 8 + 4 {
        return Err(CacheError::Truncated);
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let mut r = Reader { buf: body, pos: 8 };
    let n = r.take(1)?[0] as usize;
    if n == 0 || n > crate::perm::MAX_RANK {
        return Err(CacheError::Corrupt(format!("rank {n}")));
    }
    let count = r.u64()?;
    let mut entries = Vec::new();
    for _ in 0..count {
        let x = r.u64()?;
        let w = r.u64()?;
        let k = r.take(1)?[0] as usize;
        let mut coeffs = Vec::with_capacity(k);
        for _ in 0..k {
            coeffs.push(r.u64()?);
        }
        if coeffs.last() == Some(&0) || coeffs.is_empty() {
            return Err(CacheError::Corrupt("polynomial with trailing zero".into()));
        }
        entries.push(((x, w), KlPolynomial::from_coeffs(coeffs)));
    }
    let stored = u32::from_le_bytes(tail.try_into().unwrap());
    if r.pos != body.len() {
        // either trailing garbage or a short count; the checksum decides which message is useful
        let computed = crc32fast::hash(body);
        if computed != stored {
            return Err(CacheError::Checksum { stored, computed });
        }
        return Err(CacheError::Corrupt("trailing bytes after entries".into()));
    }
    let computed = crc32fast::hash(body);
    if computed != stored {
        return Err(CacheError::Checksum { stored, computed });
    }
    Ok((n, entries))
}

fn add_shifted(acc: &mut Vec<i128>, p: &KlPolynomial, shift: usize, factor: i128) {
    let need = p.coeffs().len() + shift;
    if acc.len() < need {
        acc.resize(need, 0);
    }
    for (i, &c) in p.coeffs().iter().enumerate() {
        acc[i + shift] += factor * c as i128;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_is_least_code() {
        for w in Permutation::all(4) {
            let (c, sym) = canonical(&w);
            assert_eq!(sym.apply(&w), c);
            assert_eq!(sym.apply(&c), w);
            for s in Symmetry::ALL {
                assert!(c.encode() <= s.apply(&w).encode());
            }
        }
    }

    #[test]
    fn budget_trips() {
        let cache = KlCache::with_budget(64);
        let e = Permutation::identity(5);
        let w = Permutation::longest(5);
        let err = crate::kl::kl_polynomial(&e, &w, &cache).unwrap_err();
        assert!(matches!(err, KlError::BudgetExceeded { .. }));
    }

    #[test]
    fn stats_count_columns() {
        let cache = KlCache::new();
        let w: Permutation = "3412".parse().unwrap();
        crate::kl::kl_polynomial(&Permutation::identity(4), &w, &cache).unwrap();
        let s = cache.stats();
        assert!(s.columns >= 2);
        assert!(s.entries >= s.columns);
        assert!(s.misses >= 1);
        crate::kl::kl_polynomial(&Permutation::identity(4), &w, &cache).unwrap();
        assert!(cache.stats().hits > s.hits);
    }
}
