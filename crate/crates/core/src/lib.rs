//! Exact computations around products `Z(m) × Z(m)` of irreducible
//! representations of `GL_n` over a p-adic field, labelled by multisegments.

pub mod cosets;
pub mod error;
pub mod geometry;
pub mod grothendieck;
pub mod kl;
pub mod linalg;
pub mod multiseg;
pub mod perm;

pub use error::{CacheError, DecompositionError, GeometryError, KlError, PermError, SegmentError};
pub use geometry::{
    canonical_nilpotent, commuting_fiber, component_descriptor, deficiency, identify_orbit,
    orbit_dimension, ComponentDescriptor, DeficiencyReport,
};
pub use grothendieck::{
    irreducible_in_standards, product_decomposition, product_decomposition_with, square_report,
    square_report_with, Convention, DecompositionOptions, DecompositionReport, GrothendieckVector,
    MatrixCache, Tag, TransitionMatrix,
};
pub use kl::{kl_at_one, kl_polynomial, mu, CacheStats, KlCache, KlPolynomial};
pub use multiseg::{
    coset_representative, m_sigma, zelevinsky_leq, Multisegment, RankMatrix, Segment, Support,
    TwoToOneWord,
};
pub use perm::Permutation;
