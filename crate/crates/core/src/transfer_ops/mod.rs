//! Transfer operators: pointwise actions, Nystrom discretizations, spectra, resolvent and transforms.

mod actions;
mod discretized;
mod resolvent;
mod spectrum;
mod transforms;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;
use crate::specfun_quadrature::QuadratureRule;

pub use actions::{
    apply_p, apply_p0, apply_p1, apply_qz, apply_qz_corrected, power_tail, verify_identity_first,
    verify_identity_second, ResidualReport, SeriesValue,
};
pub use discretized::{
    build_kzq, build_m, build_resolvent_factor, build_t, build_t_tilde, on_cut, read_binary, DiscretizedOperator,
    MatrixDump, OperatorKind, SymmetricFrame,
};
pub use resolvent::{conjecture_scan, resolvent_apply, ScanRow};
pub use spectrum::{eigenvalues, leading_eigenpair, spectrum, weighted_cosine, SpectrumResult};
pub use transforms::{
    borel, check_functional_equation, check_lemma_tricomi, hankel_selfreciprocal_residual, in_disk, kernel_interpolate, laplace,
    selfreciprocity_scan, FunctionalEquationReport, HankelResidual, SelfReciprocityScan, TricomiReport,
};

/// Values of a function at the nodes of a quadrature rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionSample<T> {
    pub values: Vec<Complex<T>>,
}

impl<T: Real> FunctionSample<T> {
    pub fn new(values: Vec<Complex<T>>) -> Self {
        Self { values }
    }

    pub fn from_fn(rule: &QuadratureRule<T>, f: impl Fn(T) -> Complex<T>) -> Self {
        Self { values: rule.nodes().iter().map(|&t| f(t)).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
