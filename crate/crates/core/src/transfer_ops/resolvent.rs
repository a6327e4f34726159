use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::discretized::{assemble_kzq, build_kzq};
use super::spectrum::eigenvalues;
use super::FunctionSample;
use crate::error::{domain, invalid, Error, Result};
use crate::scalar::{cabs, creal, lit, Real};
use crate::specfun_quadrature::QuadratureRule;

/// (1 - K_{1/lambda})^{-1} (lambda - M)^{-1} phi by one dense solve.
pub fn resolvent_apply<T: Real>(
    lambda: Complex<T>,
    phi: &FunctionSample<T>,
    rule: &QuadratureRule<T>,
) -> Result<FunctionSample<T>> {
    if lambda.im == T::zero() && lambda.re >= T::zero() && lambda.re <= T::one() {
        return Err(domain(format!("lambda = {} lies in [0, 1]", lambda.re)));
    }
    if phi.len() != rule.order() {
        return Err(invalid(format!("sample of length {} for a rule of order {}", phi.len(), rule.order())));
    }
    let k = build_kzq(lambda.inv(), 0, rule)?;
    let n = rule.order();
    let rhs = DVector::from_fn(n, |i, _| phi.values[i] / (lambda - creal((-rule.nodes()[i]).exp())));
    let system = DMatrix::<Complex<T>>::identity(n, n) - &k.matrix;
    let x = system
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular resolvent solve: lambda is at or near an eigenvalue".into()))?;
    let rn = rhs.iter().fold(T::zero(), |m, c| m.max(cabs(*c)));
    let xn = x.iter().fold(T::zero(), |m, c| m.max(cabs(*c)));
    if !xn.is_finite() || xn > rn * lit(1e13) {
        return Err(Error::Numerical("ill-conditioned resolvent solve: lambda is near the spectrum".into()));
    }
    Ok(FunctionSample::new(x.iter().copied().collect()))
}

/// One row of the eigenvalue-1 evidence table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow<T> {
    pub lambda: T,
    /// min |mu - 1| over eigenvalues mu of K_{1/lambda}
    pub distance: T,
    pub nearest: Complex<T>,
}

/// For each lambda, the distance from 1 to the spectrum of K_{1/lambda}.
///
/// For 0 < lambda < 1 the parameter 1/lambda sits on the cut; the matrix there is the
/// boundary value of the assembled kernel, not a validated operator.
pub fn conjecture_scan<T: Real>(lambdas: &[T], rule: &QuadratureRule<T>) -> Result<Vec<ScanRow<T>>> {
    if let Some(l) = lambdas.iter().find(|&&l| l == T::zero() || !l.is_finite()) {
        return Err(domain(format!("conjecture_scan: lambda = {l} not allowed")));
    }
    lambdas
        .par_iter()
        .map(|&lambda| {
            let op = assemble_kzq(creal(lambda.recip()), 0, rule)?;
            let vals = eigenvalues(&op)?;
            let one = creal(T::one());
            let nearest = vals
                .iter()
                .copied()
                .min_by(|a, b| cabs(*a - one).partial_cmp(&cabs(*b - one)).unwrap_or(std::cmp::Ordering::Equal))
                .ok_or_else(|| Error::Numerical("empty spectrum".into()))?;
            Ok(ScanRow { lambda, distance: cabs(nearest - one), nearest })
        })
        .collect()
}
