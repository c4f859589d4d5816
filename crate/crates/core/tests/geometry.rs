//! Orbit, fiber and deficiency computations checked against the Hom
//! dimensions of graded Jordan strings, and against random base changes.

use glnlab_core::geometry::{centralizer, GradedMap, DEFAULT_HEIGHT, DEFAULT_TRIALS};
use glnlab_core::linalg::IntMatrix;
use glnlab_core::{
    canonical_nilpotent, commuting_fiber, component_descriptor, deficiency, identify_orbit,
    m_sigma, orbit_dimension, Multisegment, Permutation,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Degree-0 (`shift = 0`) or degree-(-1) (`shift = 1`) module maps from the
/// string `[a, b]` to the string `[c, d]`: the generator in degree `a` goes to
/// degree `a - shift` of the target and must be killed by `x^(b - a + 1)`.
fn string_hom(a: i64, b: i64, c: i64, d: i64, shift: i64) -> usize {
    let t = a - shift;
    usize::from(c <= t && t <= d && d < t + (b - a + 1))
}

fn hom_sum(m: &Multisegment, shift: i64) -> usize {
    let segs = m.segments();
    segs.iter()
        .flat_map(|s| {
            segs.iter()
                .map(move |u| string_hom(s.begin(), s.end(), u.begin(), u.end(), shift))
        })
        .sum()
}

fn arb_multisegment() -> impl Strategy<Value = Multisegment> {
    prop::collection::vec((0i64..5, 0i64..4), 1..6).prop_map(|v| {
        Multisegment::from_pairs(&v.iter().map(|&(a, l)| (a, a + l)).collect::<Vec<_>>()).unwrap()
    })
}

/// A random unimodular degree-0 automorphism and its inverse, built from
/// elementary row operations inside each graded piece.
fn random_base_change(a: &GradedMap, rng: &mut ChaCha8Rng) -> (GradedMap, GradedMap) {
    let space = a.space().clone();
    let mut g = GradedMap::zero(&space, 0);
    let mut g_inv = GradedMap::zero(&space, 0);
    for d in space.degrees() {
        let n = space.dim(d);
        let mut m = IntMatrix::identity(n);
        let mut inv = IntMatrix::identity(n);
        for _ in 0..3 * n {
            if n < 2 {
                break;
            }
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if i == j {
                continue;
            }
            let c = rng.gen_range(-2..=2);
            // E = I + c e_ij; left-multiply m by E and right-multiply inv by E^-1
            let mut e = IntMatrix::identity(n);
            e.set(i, j, c);
            let mut e_inv = IntMatrix::identity(n);
            e_inv.set(i, j, -c);
            m = e.mul(&m).unwrap();
            inv = inv.mul(&e_inv).unwrap();
        }
        *g.block_mut(d).unwrap() = m;
        *g_inv.block_mut(d).unwrap() = inv;
    }
    (g, g_inv)
}

#[test]
fn single_segment() {
    let m = Multisegment::from_pairs(&[(2, 5)]).unwrap();
    let c = component_descriptor(&m).unwrap();
    assert_eq!(
        (c.orbit_dim, c.fiber_dim, c.component_dim, c.dim_eplus),
        (3, 0, 3, 3)
    );
    assert_eq!(deficiency(&m, 5, 0, 10).unwrap().d, 0);
}

#[test]
fn deficiency_is_reproducible() {
    let m = m_sigma(&"3412".parse().unwrap());
    let first = deficiency(&m, DEFAULT_TRIALS, 7, DEFAULT_HEIGHT).unwrap();
    let second = deficiency(&m, DEFAULT_TRIALS, 7, DEFAULT_HEIGHT).unwrap();
    assert_eq!(first.sample_codims, second.sample_codims);
    assert_eq!(first.d, 1);
    assert!(first.stable);
}

#[test]
fn deficiency_zero_exactly_on_smooth_s4() {
    for sigma in Permutation::all(4) {
        let r = deficiency(&m_sigma(&sigma), DEFAULT_TRIALS, 0, DEFAULT_HEIGHT).unwrap();
        assert_eq!(r.d == 0, sigma.is_smooth(), "{sigma}: d = {}", r.d);
    }
}

#[test]
fn zero_trials_is_an_error() {
    let m = Multisegment::from_pairs(&[(1, 2)]).unwrap();
    assert!(deficiency(&m, 0, 0, 10).is_err());
}

#[test]
fn identify_orbit_after_base_change() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for sigma in Permutation::all(4) {
        let m = m_sigma(&sigma).add(&m_sigma(&sigma));
        let a = canonical_nilpotent(&m);
        let (g, g_inv) = random_base_change(&a, &mut rng);
        let moved = g.compose(&a).unwrap().compose(&g_inv).unwrap();
        assert_eq!(identify_orbit(&moved).unwrap(), m);
    }
}

#[test]
fn fiber_dimension_is_conjugation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for sigma in Permutation::all(4) {
        let m = m_sigma(&sigma);
        let a = canonical_nilpotent(&m);
        let (g, g_inv) = random_base_change(&a, &mut rng);
        let moved = g.compose(&a).unwrap().compose(&g_inv).unwrap();
        assert_eq!(
            commuting_fiber(&moved).unwrap().len(),
            commuting_fiber(&a).unwrap().len()
        );
        assert_eq!(
            centralizer(&moved).unwrap().len(),
            centralizer(&a).unwrap().len()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn centralizer_and_fiber_match_string_homs(m in arb_multisegment()) {
        let a = canonical_nilpotent(&m);
        prop_assert_eq!(centralizer(&a).unwrap().len(), hom_sum(&m, 0));
        prop_assert_eq!(commuting_fiber(&a).unwrap().len(), hom_sum(&m, 1));
        let c = component_descriptor(&m).unwrap();
        prop_assert_eq!(orbit_dimension(&m).unwrap(), c.dim_endo0 - hom_sum(&m, 0));
        prop_assert_eq!(c.component_dim, c.dim_eplus);
    }

    #[test]
    fn canonical_nilpotent_round_trip(m in arb_multisegment()) {
        prop_assert_eq!(identify_orbit(&canonical_nilpotent(&m)).unwrap(), m);
    }

    #[test]
    fn fiber_elements_commute(m in arb_multisegment()) {
        let a = canonical_nilpotent(&m);
        for b in commuting_fiber(&a).unwrap() {
            prop_assert!(a.commutator(&b).unwrap().is_zero());
        }
    }
}
