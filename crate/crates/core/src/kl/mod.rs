//! Kazhdan–Lusztig polynomials of symmetric groups.
//!
//! Polynomials are computed a column at a time: for a fixed `w` the whole
//! family `{P_{x,w} : x <= w}` is produced by the one-step recursion on the
//! smallest left descent `s` of `w` (with `v = sw`):
//!
//! ```text
//! P_{x,w} = q^{1-c} P_{sx,v} + q^c P_{x,v} - Σ_{z < v, sz < z} μ(z,v) q^{(ℓ(w)-ℓ(z))/2} P_{x,z}
//! ```
//!
//! where `c = 1` if `sx < x` and `0` otherwise. Since `P_{x,w}` is constant on
//! the double coset `W_{L(w)} x W_{R(w)}`, a column only stores the maximal
//! element of each such double coset (so `c = 1` for every stored `x`), and
//! columns are keyed by the least packed code among `w, w⁻¹, w0ww0, w0w⁻¹w0`.

mod cache;
mod poly;

pub use cache::{CacheStats, KlCache};
pub use poly::KlPolynomial;

use crate::error::KlError;
use crate::perm::Permutation;

/// `P_{x,w}`; zero iff `x` is not below `w` in Bruhat order.
pub fn kl_polynomial(
    x: &Permutation,
    w: &Permutation,
    cache: &KlCache,
) -> Result<KlPolynomial, KlError> {
    if x.rank() != w.rank() {
        return Err(crate::error::PermError::RankMismatch(x.rank(), w.rank()).into());
    }
    cache.polynomial(x, w)
}

/// `P_{x,w}(1)`.
pub fn kl_at_one(x: &Permutation, w: &Permutation, cache: &KlCache) -> Result<u64, KlError> {
    let p = kl_polynomial(x, w, cache)?;
    p.at_one().ok_or_else(|| KlError::Overflow {
        x: x.to_string(),
        w: w.to_string(),
    })
}

/// Coefficient of `q^{(ℓ(w)-ℓ(x)-1)/2}` in `P_{x,w}`, or 0 when that exponent
/// is not a nonnegative integer.
pub fn mu(x: &Permutation, w: &Permutation, cache: &KlCache) -> Result<u64, KlError> {
    let (lx, lw) = (x.length(), w.length());
    if lw <= lx || (lw - lx) % 2 == 0 {
        if x.rank() != w.rank() {
            return Err(crate::error::PermError::RankMismatch(x.rank(), w.rank()).into());
        }
        return Ok(0);
    }
    Ok(kl_polynomial(x, w, cache)?.coeff((lw - lx - 1) / 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn small_closed_forms() {
        let cache = KlCache::new();
        let e4 = Permutation::identity(4);
        let one_plus_q = KlPolynomial::from_coeffs(vec![1, 1]);
        assert_eq!(kl_polynomial(&e4, &p("3412"), &cache).unwrap(), one_plus_q);
        assert_eq!(kl_polynomial(&e4, &p("4231"), &cache).unwrap(), one_plus_q);
        assert_eq!(
            kl_polynomial(&p("1324"), &p("3412"), &cache).unwrap(),
            one_plus_q
        );
        assert_eq!(
            kl_polynomial(&p("2143"), &p("4231"), &cache).unwrap(),
            one_plus_q
        );
        assert_eq!(
            kl_polynomial(&p("3412"), &p("3412"), &cache).unwrap(),
            KlPolynomial::one()
        );
        assert!(kl_polynomial(&p("3412"), &p("2143"), &cache)
            .unwrap()
            .is_zero());
        assert_eq!(kl_at_one(&e4, &p("3412"), &cache).unwrap(), 2);
    }

    #[test]
    fn mu_values() {
        let cache = KlCache::new();
        let e4 = Permutation::identity(4);
        // ℓ(3412) - ℓ(e) = 4 is even
        assert_eq!(mu(&e4, &p("3412"), &cache).unwrap(), 0);
        // 1324 < 3412 with length difference 3: coefficient of q in 1+q
        assert_eq!(mu(&p("1324"), &p("3412"), &cache).unwrap(), 1);
        // covers have μ = 1
        assert_eq!(mu(&p("3142"), &p("3412"), &cache).unwrap(), 1);
        assert_eq!(mu(&p("1243"), &p("1342"), &cache).unwrap(), 1);
    }

    #[test]
    fn exceptional_values_in_s6() {
        let cache = KlCache::new();
        let e = Permutation::identity(6);
        for s in ["463152", "465132", "526413", "546213", "632541", "653421"] {
            assert_eq!(kl_at_one(&e, &p(s), &cache).unwrap(), 3, "{s}");
        }
    }

    #[test]
    fn rank_mismatch_is_an_error() {
        let cache = KlCache::new();
        assert!(kl_polynomial(&p("12"), &p("123"), &cache).is_err());
        assert!(mu(&p("12"), &p("321"), &cache).is_err());
    }
}
