//! Bessel kernel, Lerch transcendent, quadrature rules for m, m~, m^ and the order-1 Hankel transform.

mod bessel;
mod hankel;
mod lerch;
mod rules;

pub use bessel::{bessel_j, bessel_kernel, KERNEL_SERIES_LIMIT};
pub use hankel::{hankel_transform, hankel_transform_fn};
pub use lerch::{lerch_phi, Tailed};
pub use rules::{build_rule, lebesgue_rule, MeasureKind, QuadratureRule, MAX_ORDER, MIN_ORDER};
