//! Numerical laboratory for the dynamics of transcendental entire functions.
//!
//! The crate is organised around a closed [catalog](catalog) of entire maps
//! (`z + 1 + e^-z` and relatives, `λe^z`, and their logarithmic models).
//! On top of that sit:
//!
//! * [`metrics`]: plane regions, conformal densities, derivative norms and
//!   the infimum scans for `|z f'(z)/f(z)|` and related quantities,
//! * [`branch`]: inverse-branch continuation over maximal discs, asymptotic
//!   curves and tracts,
//! * [`dynamics`]: orbits, fixed points, postsingular orbits, hyperbolicity
//!   certificates and the Baker/wandering domain checks,
//! * [`instability`]: the parameter search for `λ` with `f_λ²(2πin) = φ(λ)`,
//! * [`raster`]: deterministic parallel Julia set rasters,
//! * [`reproduce`]: the end-to-end acceptance checks.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod branch;
pub mod catalog;
pub mod dynamics;
mod error;
pub mod instability;
pub mod metrics;
pub mod raster;
pub mod reproduce;

pub use num_complex::Complex64 as C64;

pub use catalog::{EntireMap, EvalResult, MapKind, OverflowDirection, SingularData};
pub use error::{Error, Result};
pub use metrics::{ConformalMetric, Disc, Region, SamplerConfig, ScanReport};
