//! Farey map and Gauss map: transfer operators, their Bessel-kernel realizations,
//! periodic-orbit traces and zeta functions.
//!
//! Numeric code is generic over [`Real`] (`f32`, `f64`); Farey fractions are exact
//! [`cf_dynamics::Rational`]s. The aliases below fix the scalar to `f64`.

// NaN must fail range checks, so several guards are written as `!(x > a)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cf_dynamics;
pub mod error;
pub mod measures_ergodic;
pub mod scalar;
pub mod specfun_quadrature;
pub mod transfer_ops;
pub mod zeta;

pub use error::{Error, Result};
pub use scalar::Real;

pub type C64 = num_complex::Complex<f64>;
pub type C32 = num_complex::Complex<f32>;

pub type Rule = specfun_quadrature::QuadratureRule<f64>;
pub type Operator = transfer_ops::DiscretizedOperator<f64>;
pub type Spectrum = transfer_ops::SpectrumResult<f64>;
pub type Sample = transfer_ops::FunctionSample<f64>;
pub type Orbit = cf_dynamics::PeriodicOrbit<f64>;
pub type Series = zeta::PowerSeries<C64>;

pub type Rule32 = specfun_quadrature::QuadratureRule<f32>;
pub type Operator32 = transfer_ops::DiscretizedOperator<f32>;
pub type Spectrum32 = transfer_ops::SpectrumResult<f32>;
