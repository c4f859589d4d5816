//! Graded nilpotent orbits and the components of the graded commuting variety.
//!
//! For a multisegment `m` the canonical nilpotent `A ∈ E_+(V)` has one Jordan
//! string per segment. The component attached to `m` is the closure of
//! `{(A', B) : A' ∈ O_m, A'B = BA'}`, so its dimension is the orbit dimension
//! plus the dimension of the commuting fiber over `A`. The deficiency is the
//! least codimension of an `Aut(V)`-orbit in that component, estimated by
//! computing stabilisers at random integer points of the fiber.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GeometryError;
use crate::linalg::{kernel_basis, rank, IntMatrix};
use crate::multiseg::{Multisegment, Segment};

pub const DEFAULT_TRIALS: usize = 20;
pub const DEFAULT_HEIGHT: i64 = 100;

/// A finite-dimensional Z-graded vector space, described by its dimensions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedVectorSpace {
    lo: i64,
    dims: Vec<usize>,
}

impl GradedVectorSpace {
    pub fn new(dims: &BTreeMap<i64, usize>) -> Self {
        let nonzero: Vec<i64> = dims
            .iter()
            .filter(|(_, &v)| v > 0)
            .map(|(&d, _)| d)
            .collect();
        match (nonzero.first(), nonzero.last()) {
            (Some(&lo), Some(&hi)) => GradedVectorSpace {
                lo,
                dims: (lo..=hi)
                    .map(|d| dims.get(&d).copied().unwrap_or(0))
                    .collect(),
            },
            _ => GradedVectorSpace {
                lo: 0,
                dims: Vec::new(),
            },
        }
    }

    pub fn of(m: &Multisegment) -> Self {
        Self::new(&m.graded_dimension())
    }

    pub fn dim(&self, d: i64) -> usize {
        if d < self.lo {
            return 0;
        }
        self.dims.get((d - self.lo) as usize).copied().unwrap_or(0)
    }

    pub fn degrees(&self) -> std::ops::Range<i64> {
        self.lo..self.lo + self.dims.len() as i64
    }

    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Dimension of the space of graded maps of the given degree.
    pub fn hom_dim(&self, degree: i64) -> usize {
        self.degrees()
            .map(|d| self.dim(d) * self.dim(d + degree))
            .sum()
    }
}

/// A graded endomorphism of fixed degree: one block `V_d → V_{d+degree}` per `d`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedMap {
    space: GradedVectorSpace,
    degree: i64,
    blocks: Vec<IntMatrix>,
}

/// Degree `+1` maps, `E_+(V)`.
pub type GradedMapPlus = GradedMap;
/// Degree `-1` maps, `E_-(V)`.
pub type GradedMapMinus = GradedMap;

impl GradedMap {
    pub fn zero(space: &GradedVectorSpace, degree: i64) -> Self {
        let blocks = space
            .degrees()
            .map(|d| IntMatrix::zeros(space.dim(d + degree), space.dim(d)))
            .collect();
        GradedMap {
            space: space.clone(),
            degree,
            blocks,
        }
    }

    /// Inverse of [`GradedMap::coords`].
    pub fn from_coords(space: &GradedVectorSpace, degree: i64, coords: &[i64]) -> Self {
        let mut map = Self::zero(space, degree);
        let mut k = 0;
        for b in map.blocks.iter_mut() {
            for i in 0..b.rows() {
                for j in 0..b.cols() {
                    b.set(i, j, coords[k]);
                    k += 1;
                }
            }
        }
        assert_eq!(k, coords.len(), "coordinate vector has the wrong length");
        map
    }

    pub fn space(&self) -> &GradedVectorSpace {
        &self.space
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    /// The block `V_d → V_{d+degree}`.
    pub fn block(&self, d: i64) -> Option<&IntMatrix> {
        let i = d - self.space.lo;
        if i < 0 {
            return None;
        }
        self.blocks.get(i as usize)
    }

    pub fn block_mut(&mut self, d: i64) -> Option<&mut IntMatrix> {
        let i = d - self.space.lo;
        if i < 0 {
            return None;
        }
        self.blocks.get_mut(i as usize)
    }

    /// Entries of all blocks, block by block in increasing degree, row-major.
    pub fn coords(&self) -> Vec<i64> {
        self.blocks
            .iter()
            .flat_map(|b| b.data().iter().copied())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.is_zero())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GradedMap) -> Result<GradedMap, GeometryError> {
        assert_eq!(self.space, other.space, "maps on different spaces");
        let mut out = GradedMap::zero(&self.space, self.degree + other.degree);
        for d in self.space.degrees() {
            let mid = d + other.degree;
            let (Some(first), Some(second)) = (other.block(d), self.block(mid)) else {
                continue;
            };
            if first.rows() == 0 || first.cols() == 0 || second.rows() == 0 {
                continue;
            }
            *out.block_mut(d).expect("degree in range") = second.mul(first)?;
        }
        Ok(out)
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &GradedMap, c: i64) -> Result<GradedMap, GeometryError> {
        assert_eq!((&self.space, self.degree), (&other.space, other.degree));
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.add_scaled(b, c))
            .collect::<Result<_, _>>()?;
        Ok(GradedMap {
            space: self.space.clone(),
            degree: self.degree,
            blocks,
        })
    }

    /// `self ∘ other - other ∘ self`.
    pub fn commutator(&self, other: &GradedMap) -> Result<GradedMap, GeometryError> {
        self.compose(other)?.add_scaled(&other.compose(self)?, -1)
    }

    /// The composite `V_a → V_b` of `b - a` consecutive blocks (degree 1 only).
    pub fn power_block(&self, a: i64, b: i64) -> Result<IntMatrix, GeometryError> {
        assert_eq!(self.degree, 1);
        let mut acc = IntMatrix::identity(self.space.dim(a));
        for d in a..b {
            acc = self.block(d).expect("degree in range").mul(&acc)?;
        }
        Ok(acc)
    }
}

/// The matrix of `X ↦ [X, fixed]` on maps of degree `degree`, in coordinates.
fn commutator_matrix(fixed: &GradedMap, degree: i64) -> Result<IntMatrix, GeometryError> {
    let space = &fixed.space;
    let n = space.hom_dim(degree);
    let rows = space.hom_dim(degree + fixed.degree);
    let mut columns = Vec::with_capacity(n);
    let mut unit = vec![0i64; n];
    for i in 0..n {
        unit[i] = 1;
        let x = GradedMap::from_coords(space, degree, &unit);
        columns.push(x.commutator(fixed)?.coords());
        unit[i] = 0;
    }
    Ok(IntMatrix::from_columns(rows, &columns))
}

/// One Jordan string per segment: in degree `d` the basis lists the segments
/// containing `d` (canonical order), and each is sent to itself one degree up.
pub fn canonical_nilpotent(m: &Multisegment) -> GradedMapPlus {
    let space = GradedVectorSpace::of(m);
    let mut a = GradedMap::zero(&space, 1);
    let segs = m.segments();
    let position = |d: i64, j: usize| -> usize {
        segs[..j]
            .iter()
            .filter(|s| s.begin() <= d && d <= s.end())
            .count()
    };
    for (j, s) in segs.iter().enumerate() {
        for d in s.begin()..s.end() {
            let (src, dst) = (position(d, j), position(d + 1, j));
            a.block_mut(d).expect("degree in range").set(dst, src, 1);
        }
    }
    a
}

/// Exact basis of the centraliser `{X of degree 0 : XA = AX}`.
pub fn centralizer(a: &GradedMap) -> Result<Vec<GradedMap>, GeometryError> {
    let m = commutator_matrix(a, 0)?;
    Ok(kernel_basis(&m)?
        .iter()
        .map(|v| GradedMap::from_coords(&a.space, 0, v))
        .collect())
}

/// Exact basis of `{B ∈ E_-(V) : AB = BA}`.
pub fn commuting_fiber(a: &GradedMapPlus) -> Result<Vec<GradedMapMinus>, GeometryError> {
    let m = commutator_matrix(a, -1)?;
    Ok(kernel_basis(&m)?
        .iter()
        .map(|v| GradedMap::from_coords(&a.space, -1, v))
        .collect())
}

/// Dimensions attached to the component of a multisegment.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ComponentDescriptor {
    #[serde(rename = "multisegment")]
    pub m: Multisegment,
    pub dim_endo0: usize,
    pub dim_eplus: usize,
    pub dim_eminus: usize,
    pub orbit_dim: usize,
    pub fiber_dim: usize,
    pub component_dim: usize,
}

impl ComponentDescriptor {
    /// The component is the closure of a conormal bundle, so its dimension is `dim E_+(V)`.
    pub fn check_conormal(&self) -> Result<(), GeometryError> {
        if self.component_dim != self.dim_eplus {
            return Err(GeometryError::Consistency(format!(
                "{}: component dimension {} but dim E+ = {}",
                self.m, self.component_dim, self.dim_eplus
            )));
        }
        Ok(())
    }
}

/// Everything about `m` that the deficiency sampling reuses.
#[derive(Clone, Debug)]
pub struct Component {
    pub descriptor: ComponentDescriptor,
    pub nilpotent: GradedMapPlus,
    pub centralizer: Vec<GradedMap>,
    pub fiber: Vec<GradedMapMinus>,
}

impl Component {
    pub fn new(m: &Multisegment) -> Result<Self, GeometryError> {
        let a = canonical_nilpotent(m);
        let space = a.space.clone();
        let centralizer = centralizer(&a)?;
        let fiber = commuting_fiber(&a)?;
        let dim_endo0 = space.hom_dim(0);
        let orbit_dim = dim_endo0 - centralizer.len();
        let descriptor = ComponentDescriptor {
            m: m.clone(),
            dim_endo0,
            dim_eplus: space.hom_dim(1),
            dim_eminus: space.hom_dim(-1),
            orbit_dim,
            fiber_dim: fiber.len(),
            component_dim: orbit_dim + fiber.len(),
        };
        Ok(Component {
            descriptor,
            nilpotent: a,
            centralizer,
            fiber,
        })
    }

    /// Dimension of the stabiliser of `(A, B)` in `Aut(V)`.
    pub fn stabilizer_dim(&self, b: &GradedMapMinus) -> Result<usize, GeometryError> {
        let space = &self.nilpotent.space;
        let columns = self
            .centralizer
            .iter()
            .map(|z| z.commutator(b).map(|c| c.coords()))
            .collect::<Result<Vec<_>, _>>()?;
        let m = IntMatrix::from_columns(space.hom_dim(-1), &columns);
        Ok(self.centralizer.len() - rank(&m))
    }

    /// Codimension of the orbit of `(A, B)` in the component.
    pub fn codimension(&self, b: &GradedMapMinus) -> Result<usize, GeometryError> {
        let s = self.stabilizer_dim(b)?;
        let orbit = self.descriptor.dim_endo0 - s;
        self.descriptor
            .component_dim
            .checked_sub(orbit)
            .ok_or_else(|| {
                GeometryError::Consistency(format!(
                    "{}: orbit of dimension {orbit} exceeds the component",
                    self.descriptor.m
                ))
            })
    }

    fn sample(&self, rng: &mut ChaCha8Rng, height: i64) -> Result<GradedMapMinus, GeometryError> {
        let mut b = GradedMap::zero(&self.nilpotent.space, -1);
        for basis in &self.fiber {
            let c = rng.gen_range(-height..=height);
            b = b.add_scaled(basis, c)?;
        }
        Ok(b)
    }
}

pub fn orbit_dimension(m: &Multisegment) -> Result<usize, GeometryError> {
    let a = canonical_nilpotent(m);
    Ok(a.space.hom_dim(0) - centralizer(&a)?.len())
}

pub fn component_descriptor(m: &Multisegment) -> Result<ComponentDescriptor, GeometryError> {
    Ok(Component::new(m)?.descriptor)
}

/// Result of a deficiency estimate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeficiencyReport {
    pub m: Multisegment,
    pub trials: usize,
    pub seed: u64,
    pub entry_height: i64,
    pub sample_codims: Vec<usize>,
    pub d: usize,
    /// Whether the minimum was already reached in the first half of the trials.
    pub stable: bool,
}

#[derive(serde::Serialize)]
struct DeficiencyJson<'a> {
    multisegment: &'a Multisegment,
    d: usize,
    trials: usize,
    seed: u64,
    stable: bool,
    codims: &'a [usize],
}

impl serde::Serialize for DeficiencyReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DeficiencyJson {
            multisegment: &self.m,
            d: self.d,
            trials: self.trials,
            seed: self.seed,
            stable: self.stable,
            codims: &self.sample_codims,
        }
        .serialize(s)
    }
}

fn sample_codims(
    comp: &Component,
    trials: usize,
    seed: u64,
    height: i64,
) -> Result<Vec<usize>, GeometryError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| {
            let b = comp.sample(&mut rng, height)?;
            comp.codimension(&b)
        })
        .collect()
}

fn report(
    m: &Multisegment,
    trials: usize,
    seed: u64,
    height: i64,
    codims: Vec<usize>,
) -> DeficiencyReport {
    let d = codims.iter().copied().min().unwrap_or(0);
    let first = trials.div_ceil(2);
    let stable = codims[..first.min(codims.len())]
        .iter()
        .copied()
        .min()
        .unwrap_or(0)
        == d;
    DeficiencyReport {
        m: m.clone(),
        trials,
        seed,
        entry_height: height,
        sample_codims: codims,
        d,
        stable,
    }
}

/// Least sampled orbit codimension in the component of `m`.
///
/// If the minimum improves during the second half of the trials, the run is
/// repeated once with twice the trials and twice the entry height.
pub fn deficiency(
    m: &Multisegment,
    trials: usize,
    seed: u64,
    height: i64,
) -> Result<DeficiencyReport, GeometryError> {
    if trials == 0 {
        return Err(GeometryError::NoTrials);
    }
    if m.is_empty() {
        return Ok(report(m, trials, seed, height, vec![0; trials]));
    }
    let comp = Component::new(m)?;
    comp.descriptor.check_conormal()?;
    deficiency_of(&comp, trials, seed, height)
}

pub fn deficiency_of(
    comp: &Component,
    trials: usize,
    seed: u64,
    height: i64,
) -> Result<DeficiencyReport, GeometryError> {
    if trials == 0 {
        return Err(GeometryError::NoTrials);
    }
    let m = &comp.descriptor.m;
    let first = report(
        m,
        trials,
        seed,
        height,
        sample_codims(comp, trials, seed, height)?,
    );
    if first.stable {
        return Ok(first);
    }
    log::warn!(
        "deficiency of {m} still improving after {trials} trials; retrying with {} trials at height {}",
        2 * trials,
        2 * height
    );
    let (trials, height) = (2 * trials, 2 * height);
    Ok(report(
        m,
        trials,
        seed,
        height,
        sample_codims(comp, trials, seed, height)?,
    ))
}

/// Whether the component of `m` has a dense orbit.
pub fn gls_condition(m: &Multisegment) -> Result<bool, GeometryError> {
    Ok(deficiency(m, DEFAULT_TRIALS, 0, DEFAULT_HEIGHT)?.d == 0)
}

/// The multisegment whose orbit contains `a`, read off from the ranks of
/// `A^{b-a} : V_a → V_b`.
pub fn identify_orbit(a: &GradedMapPlus) -> Result<Multisegment, GeometryError> {
    if a.degree != 1 {
        return Err(GeometryError::NotRealizable(format!(
            "map has degree {}",
            a.degree
        )));
    }
    let space = &a.space;
    let degrees = space.degrees();
    let mut r: BTreeMap<(i64, i64), i64> = BTreeMap::new();
    for x in degrees.clone() {
        for y in x..degrees.end {
            r.insert((x, y), rank(&a.power_block(x, y)?) as i64);
        }
    }
    let get = |x: i64, y: i64| r.get(&(x, y)).copied().unwrap_or(0);
    let mut segs = Vec::new();
    for x in degrees.clone() {
        for y in x..degrees.end {
            let k = get(x, y) - get(x - 1, y) - get(x, y + 1) + get(x - 1, y + 1);
            if k < 0 {
                return Err(GeometryError::NotRealizable(format!(
                    "segment [{x},{y}] would occur {k} times"
                )));
            }
            for _ in 0..k {
                segs.push(Segment::new(x, y).expect("x <= y"));
            }
        }
    }
    let m = Multisegment::new(segs);
    if GradedVectorSpace::of(&m) != *space {
        return Err(GeometryError::NotRealizable(
            "ranks do not account for all of V".into(),
        ));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rank_bareiss;

    fn ms(s: &str) -> Multisegment {
        s.parse().unwrap()
    }

    #[test]
    fn nilpotent_ranks() {
        let a = canonical_nilpotent(&ms("1-2+2-3"));
        assert_eq!(rank_bareiss(a.block(1).unwrap()), 1);
        assert_eq!(rank_bareiss(a.block(2).unwrap()), 1);
        assert_eq!(rank_bareiss(&a.power_block(1, 3).unwrap()), 0);
        let a = canonical_nilpotent(&ms("1-3+2-2"));
        assert_eq!(rank_bareiss(&a.power_block(1, 3).unwrap()), 1);
        let a = canonical_nilpotent(&ms("1-1"));
        assert!(a.is_zero());
        assert_eq!(a.space().total(), 1);
    }

    #[test]
    fn linked_pair_component() {
        let c = component_descriptor(&ms("1-2+2-3")).unwrap();
        assert_eq!(
            (
                c.dim_endo0,
                c.orbit_dim,
                c.fiber_dim,
                c.component_dim,
                c.dim_eplus
            ),
            (6, 3, 1, 4, 4)
        );
        let comp = Component::new(&ms("1-2+2-3")).unwrap();
        let b = comp.fiber[0].clone();
        assert_eq!(comp.stabilizer_dim(&b).unwrap(), 2);
        assert_eq!(deficiency(&ms("1-2+2-3"), 20, 1, 100).unwrap().d, 0);
    }

    #[test]
    fn single_segments_and_points() {
        for (a, b) in [(1, 1), (0, 3), (-2, 2)] {
            let c = component_descriptor(&Multisegment::from_pairs(&[(a, b)]).unwrap()).unwrap();
            let len = (b - a) as usize;
            assert_eq!(c.orbit_dim, len);
            assert_eq!(c.fiber_dim, 0);
            assert_eq!(c.component_dim, len);
            assert_eq!(c.dim_eplus, len);
        }
        let c = component_descriptor(&ms("1-1+1-1")).unwrap();
        assert_eq!((c.dim_eplus, c.component_dim), (0, 0));
    }

    #[test]
    fn zero_map_fiber_is_everything() {
        let space = GradedVectorSpace::new(&BTreeMap::from([(1, 2), (2, 3)]));
        let a = GradedMap::zero(&space, 1);
        assert_eq!(commuting_fiber(&a).unwrap().len(), space.hom_dim(-1));
        assert_eq!(identify_orbit(&a).unwrap(), ms("1-1+1-1+2-2+2-2+2-2"));
    }

    #[test]
    fn orbits_round_trip() {
        for s in [
            "1-2+2-3",
            "1-3+2-2",
            "(-1)-2+0-0+0-1+1-1",
            "1-4+2-3+2-3+3-3",
        ] {
            let m = ms(s);
            assert_eq!(identify_orbit(&canonical_nilpotent(&m)).unwrap(), m);
        }
    }

    #[test]
    fn deficiency_is_deterministic_and_validated() {
        let m = ms("1-3+2-4+3-5");
        let a = deficiency(&m, 6, 42, 100).unwrap();
        let b = deficiency(&m, 6, 42, 100).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            deficiency(&m, 0, 0, 100),
            Err(GeometryError::NoTrials)
        ));
        assert_eq!(deficiency(&Multisegment::empty(), 3, 0, 100).unwrap().d, 0);
        let json = serde_json::to_string(&a).unwrap();
        assert!(
            json.starts_with(r#"{"multisegment":"1-3+2-4+3-5","d":"#),
            "{json}"
        );
    }
}
