//! Cone volume measures of convex polytopes and the volume bound for
//! bodies with an antipodal pair of facet normals.
//!
//! The numerical core is generic over the scalar type ([`Real`], implemented
//! for `f32` and `f64`); the `*64` aliases below fix it to `f64`, which is
//! what every tolerance in the documentation refers to.

// `!(x > y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod antipodal;
pub mod linalg;
pub mod lp;
pub mod measure;
pub mod phi;
pub mod planar;
pub mod polytope;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Polytope64 = polytope::Polytope<f64>;
pub type Facet64 = polytope::Facet<f64>;
pub type DiscreteMeasure64 = measure::DiscreteMeasure<f64>;
pub type Atom64 = measure::Atom<f64>;
pub type SccReport64 = measure::SccReport<f64>;
pub type PhiResult64 = phi::PhiResult<f64>;
pub type FeasibilityRecord64 = planar::FeasibilityRecord<f64>;
pub type ScanRecord64 = planar::ScanRecord<f64>;
pub type AntipodalReport64 = antipodal::AntipodalReport<f64>;
