//! Exact integer linear algebra: ranks and kernels of small dense matrices.
//!
//! Ranks are computed modulo several 61-bit primes. The rank over `Q` can only
//! exceed the rank modulo `p` if `p` divides a nonzero minor, and every minor
//! is bounded by the Hadamard bound, so once the product of the primes used
//! passes that bound the largest modular rank is the true rank.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::GeometryError;

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<i64>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, &v) in c.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[i64] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, GeometryError> {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: i128 = 0;
                for k in 0..self.cols {
                    acc += self.get(i, k) as i128 * other.get(k, j) as i128;
                }
                out.set(
                    i,
                    j,
                    i64::try_from(acc).map_err(|_| GeometryError::Overflow)?,
                );
            }
        }
        Ok(out)
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &IntMatrix, c: i64) -> Result<IntMatrix, GeometryError> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| {
                b.checked_mul(c)
                    .and_then(|bc| a.checked_add(bc))
                    .ok_or(GeometryError::Overflow)
            })
            .collect::<Result<_, _>>()?;
        Ok(IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

const PRIME_COUNT: usize = 256;

/// The largest primes below `2^61`, decreasing.
fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::with_capacity(PRIME_COUNT);
        let mut n = (1u64 << 61) - 1;
        while out.len() < PRIME_COUNT {
            if is_prime(n) {
                out.push(n);
            }
            n -= 2;
        }
        out
    })
}

/// Rank of `m` reduced modulo the prime `p`.
pub fn rank_mod(m: &IntMatrix, p: u64) -> usize {
    let (rows, cols) = (m.rows, m.cols);
    let mut a: Vec<u64> = m
        .data
        .iter()
        .map(|&v| v.rem_euclid(p as i64) as u64)
        .collect();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| a[r * cols + c] != 0) else {
            continue;
        };
        if piv != rank {
            for j in c..cols {
                a.swap(piv * cols + j, rank * cols + j);
            }
        }
        let inv = pow_mod(a[rank * cols + c], p - 2, p);
        for r in rank + 1..rows {
            let f = a[r * cols + c];
            if f == 0 {
                continue;
            }
            let f = mul_mod(f, inv, p);
            for j in c..cols {
                let sub = mul_mod(f, a[rank * cols + j], p);
                let x = a[r * cols + j];
                a[r * cols + j] = if x >= sub { x - sub } else { x + p - sub };
            }
        }
        rank += 1;
    }
    rank
}

/// `log2` of the Hadamard bound on all minors of `m`, rounded up generously.
fn hadamard_log2(m: &IntMatrix) -> f64 {
    let norms = |len: usize, get: &dyn Fn(usize) -> Vec<i64>| -> f64 {
        (0..len)
            .map(|i| {
                let sq: f64 = get(i).iter().map(|&v| (v as f64) * (v as f64)).sum();
                if sq > 0.0 {
                    0.5 * sq.log2()
                } else {
                    0.0
                }
            })
            .sum()
    };
    let by_rows = norms(m.rows, &|i| m.row(i).to_vec());
    let by_cols = norms(m.cols, &|j| (0..m.rows).map(|i| m.get(i, j)).collect());
    by_rows.min(by_cols) * (1.0 + 1e-9) + 1.0
}

/// Exact rank over `Q`, certified multi-modularly.
pub fn rank(m: &IntMatrix) -> usize {
    let full = m.rows.min(m.cols);
    if full == 0 {
        return 0;
    }
    let bound = hadamard_log2(m);
    let ps = primes();
    let mut best = 0;
    let mut covered = 0.0;
    for &p in ps {
        best = best.max(rank_mod(m, p));
        if best == full {
            return best;
        }
        covered += (p as f64).log2() - 1e-6;
        if covered > bound {
            return best;
        }
    }
    rank_bareiss(m)
}

/// Exact rank over `Q` by fraction-free elimination on big integers.
pub fn rank_bareiss(m: &IntMatrix) -> usize {
    let (rows, cols) = (m.rows, m.cols);
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| m.row(i).iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(piv, rank);
        for r in rank + 1..rows {
            for j in c + 1..cols {
                let v = (&a[rank][c] * &a[r][j] - &a[r][c] * &a[rank][j]) / &prev;
                a[r][j] = v;
            }
            a[r][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    rank
}

/// An integer basis of `{v : m v = 0}`, each vector primitive.
pub fn kernel_basis(m: &IntMatrix) -> Result<Vec<Vec<i64>>, GeometryError> {
    let (rows, cols) = (m.rows, m.cols);
    let mut a: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| {
            m.row(i)
                .iter()
                .map(|&v| BigRational::from_integer(v.into()))
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(piv, r);
        let inv = a[r][c].recip();
        for j in c..cols {
            a[r][j] = &a[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    let d = &f * &a[r][j];
                    a[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for f in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![BigRational::zero(); cols];
        v[f] = BigRational::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[row][f].clone();
        }
        let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        let ints = ints
            .into_iter()
            .map(|x| (x / &g).to_i64().ok_or(GeometryError::Overflow))
            .collect::<Result<Vec<_>, _>>()?;
        basis.push(ints);
    }
    Ok(basis)
}

/// Applies `m` to an integer vector.
pub fn apply(m: &IntMatrix, v: &[i64]) -> Vec<i128> {
    (0..m.rows)
        .map(|i| {
            m.row(i)
                .iter()
                .zip(v)
                .map(|(&a, &b)| a as i128 * b as i128)
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn primes_are_prime_and_large() {
        let ps = primes();
        assert_eq!(ps.len(), PRIME_COUNT);
        assert_eq!(ps[0], (1 << 61) - 1);
        assert!(ps.iter().all(|&p| p > 1 << 60));
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn small_ranks() {
        let m = IntMatrix::from_rows(&[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        assert_eq!(rank(&m), 2);
        assert_eq!(rank_bareiss(&m), 2);
        assert_eq!(rank(&IntMatrix::zeros(3, 4)), 0);
        assert_eq!(rank(&IntMatrix::identity(5)), 5);
        assert_eq!(rank(&IntMatrix::zeros(0, 4)), 0);
    }

    #[test]
    fn rank_agrees_with_bareiss_on_random_low_rank_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let (rows, cols) = (rng.gen_range(1..12), rng.gen_range(1..12));
            let inner = rng.gen_range(1..6);
            let l = IntMatrix::from_rows(
                &(0..rows)
                    .map(|_| (0..inner).map(|_| rng.gen_range(-50..=50)).collect())
                    .collect::<Vec<_>>(),
            );
            let r = IntMatrix::from_rows(
                &(0..inner)
                    .map(|_| (0..cols).map(|_| rng.gen_range(-50..=50)).collect())
                    .collect::<Vec<_>>(),
            );
            let m = l.mul(&r).unwrap();
            assert_eq!(rank(&m), rank_bareiss(&m));
        }
    }

    #[test]
    fn a_prime_dividing_the_determinant_is_outvoted() {
        let p = primes()[0] as i64;
        let m = IntMatrix::from_rows(&[vec![p, 0], vec![0, 1]]);
        assert_eq!(rank_mod(&m, p as u64), 1);
        assert_eq!(rank(&m), 2);
    }

    #[test]
    fn kernels_are_kernels() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let (rows, cols) = (rng.gen_range(1..8), rng.gen_range(1..10));
            let m = IntMatrix::from_rows(
                &(0..rows)
                    .map(|_| (0..cols).map(|_| rng.gen_range(-3..=3)).collect())
                    .collect::<Vec<_>>(),
            );
            let k = kernel_basis(&m).unwrap();
            assert_eq!(k.len(), cols - rank_bareiss(&m));
            for v in &k {
                assert!(apply(&m, v).iter().all(|&x| x == 0));
            }
            if !k.is_empty() {
                let kt = IntMatrix::from_columns(cols, &k);
                assert_eq!(rank_bareiss(&kt), k.len());
            }
        }
    }
}
