//! Verification toolkit for the trivariate quadratic families `G_a` and `H_a`
//! over `GF(2^m)^3`.
//!
//! * [`gf2m`]: binary field arithmetic, Frobenius, trace.
//! * [`univariate`]: the root-equivalent univariate polynomials and the
//!   linearized/companion-matrix kernel test.
//! * [`trivariate`]: the families as triprojective quadratic maps, their
//!   differentials and per-direction kernel classification.
//! * [`checkers`]: permutation and APN decisions by independent methods.
//! * [`params`]: good-parameter sets, the counting bound, fiber statistics.
//! * [`equivalence`]: diagonal and monomial equivalence searches.
//!
//! Every exhaustive scan takes an [`Exec`] that selects rayon or a plain loop.

pub mod checkers;
pub mod equivalence;
pub mod error;
pub mod exec;
pub mod gf2lin;
pub mod gf2m;
pub mod params;
pub mod trivariate;
pub mod univariate;

pub use error::{Error, Result};
pub use exec::Exec;
pub use gf2m::{CtxOptions, Fe, FieldCtx};
pub use trivariate::{Family, QuadForm3, Triple};
pub use univariate::PolyVariant;
