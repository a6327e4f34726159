use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::FunctionSample;
use crate::error::{domain, invalid, Result};
use crate::scalar::{cabs, cexp, creal, lit, Real};
use crate::specfun_quadrature::{bessel_kernel, hankel_transform_fn, lebesgue_rule, MeasureKind, QuadratureRule, MAX_ORDER};

fn check_sample<T: Real>(phi: &FunctionSample<T>, rule: &QuadratureRule<T>) -> Result<()> {
    if rule.measure() != MeasureKind::M {
        return Err(invalid("transform needs a rule over m"));
    }
    if phi.len() != rule.order() {
        return Err(invalid(format!("sample of length {} for a rule of order {}", phi.len(), rule.order())));
    }
    Ok(())
}

/// L[phi](w) = int e^{-tw} phi(t) dm(t), by quadrature.
pub fn laplace<T: Real>(phi: &FunctionSample<T>, rule: &QuadratureRule<T>, w: Complex<T>) -> Result<Complex<T>> {
    check_sample(phi, rule)?;
    Ok(rule.nodes().iter().zip(rule.weights()).zip(&phi.values).fold(creal(T::zero()), |s, ((&t, &wt), &p)| {
        s + cexp(-w * t) * p * wt
    }))
}

/// B[phi](w) = w^{-2} int e^{-t/w} e^t phi(t) dm(t), by quadrature; needs Re(1/w) > 1/2 to converge.
pub fn borel<T: Real>(phi: &FunctionSample<T>, rule: &QuadratureRule<T>, w: Complex<T>) -> Result<Complex<T>> {
    check_sample(phi, rule)?;
    in_disk(w)?;
    let iw = w.inv();
    let s = rule.nodes().iter().zip(rule.weights()).zip(&phi.values).fold(creal(T::zero()), |s, ((&t, &wt), &p)| {
        s + cexp(creal(t) - iw * t) * p * wt
    });
    Ok(s * iw * iw)
}

/// D_1 = {|w - 1| < 1} = {Re(1/w) > 1/2}.
pub fn in_disk<T: Real>(w: Complex<T>) -> Result<()> {
    if cabs(w - creal(T::one())) < T::one() {
        Ok(())
    } else {
        Err(domain(format!("w = {w} outside the disk |w - 1| < 1")))
    }
}

/// (K phi)(t) = int J_1(2 sqrt(st))/sqrt(st) phi(s) dm(s) at an arbitrary t (Nystrom interpolation).
pub fn kernel_interpolate<T: Real>(phi: &FunctionSample<T>, rule: &QuadratureRule<T>, t: T) -> Complex<T> {
    rule.nodes()
        .iter()
        .zip(rule.weights())
        .zip(&phi.values)
        .fold(creal(T::zero()), |s, ((&sj, &wj), &p)| s + p * (wj * bessel_kernel(t, sj, 0)))
}

/// Residuals of L[phi] = B[(1 - M) K phi] at each grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TricomiReport<T> {
    pub w: Vec<Complex<T>>,
    pub laplace_side: Vec<Complex<T>>,
    pub borel_side: Vec<Complex<T>>,
    pub max_residual: T,
}

/// Compares L[phi](w) with B[(1 - M) K phi](w) = w^{-2} int e^{-t/w} t (K phi)(t) dt.
///
/// The Borel side uses a Lebesgue rule with rate Re(1/w) and interpolates K phi between nodes.
pub fn check_lemma_tricomi<T: Real>(
    phi: &FunctionSample<T>,
    rule: &QuadratureRule<T>,
    w_grid: &[Complex<T>],
) -> Result<TricomiReport<T>> {
    check_sample(phi, rule)?;
    for &w in w_grid {
        in_disk(w)?;
    }
    let order = (2 * rule.order()).clamp(64, MAX_ORDER);
    let rows = w_grid
        .par_iter()
        .map(|&w| {
            let lhs = laplace(phi, rule, w)?;
            let iw = w.inv();
            let b_rule = lebesgue_rule(order, iw.re)?;
            let phase = Complex::new(T::zero(), -iw.im);
            let integral = b_rule.nodes().iter().zip(b_rule.weights()).fold(creal(T::zero()), |s, (&t, &wt)| {
                s + cexp(creal(-iw.re * t)) * cexp(phase * t) * kernel_interpolate(phi, rule, t) * (t * wt)
            });
            Ok((lhs, integral * iw * iw))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_residual = rows.iter().fold(T::zero(), |m, (a, b)| m.max(cabs(*a - *b)));
    Ok(TricomiReport {
        w: w_grid.to_vec(),
        laplace_side: rows.iter().map(|r| r.0).collect(),
        borel_side: rows.iter().map(|r| r.1).collect(),
        max_residual,
    })
}

/// ||J psi - psi|| in L2(m^) over the nodes of `norm_rule` inside the resolved range of `transform_rule`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HankelResidual<T> {
    pub residual: T,
    /// m^-mass of norm nodes beyond the resolved range, left out of the norm
    pub omitted_mass: T,
    pub nodes_used: usize,
}

pub fn hankel_selfreciprocal_residual<T: Real>(
    psi: impl Fn(T) -> T,
    transform_rule: &QuadratureRule<T>,
    norm_rule: &QuadratureRule<T>,
) -> Result<HankelResidual<T>> {
    if norm_rule.measure() != MeasureKind::MHat {
        return Err(invalid("the residual norm needs a rule over m_hat"));
    }
    let limit = transform_rule.hankel_resolved_limit();
    let mut targets = Vec::new();
    let mut wts = Vec::new();
    let mut omitted = T::zero();
    for (&t, &w) in norm_rule.nodes().iter().zip(norm_rule.weights()) {
        if t <= limit {
            targets.push(t);
            wts.push(w);
        } else {
            omitted += w;
        }
    }
    let jpsi = hankel_transform_fn(&psi, transform_rule, &targets)?;
    let sq = targets.iter().zip(&wts).zip(&jpsi).fold(T::zero(), |s, ((&t, &w), &j)| {
        let d = j - psi(t);
        s + w * d * d
    });
    Ok(HankelResidual { residual: sq.sqrt(), omitted_mass: omitted, nodes_used: targets.len() })
}

/// Residuals of psi_eps = e^{-eps t} for a list of eps, with a quadratic fit of r^2 in eps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfReciprocityScan<T> {
    pub eps: Vec<T>,
    pub residuals: Vec<T>,
    pub omitted_mass: Vec<T>,
    /// r^2 fitted as c0 + c1 eps + c2 eps^2; c0 is the eps -> 0 extrapolation
    pub fit: [T; 3],
}

pub fn selfreciprocity_scan<T: Real>(
    eps: &[T],
    transform_order: usize,
    norm_rule: &QuadratureRule<T>,
) -> Result<SelfReciprocityScan<T>> {
    if eps.len() < 3 || eps.iter().any(|&e| !(e > T::zero())) {
        return Err(invalid("need at least three positive eps values"));
    }
    let mut residuals = Vec::new();
    let mut omitted = Vec::new();
    for &e in eps {
        let rule = lebesgue_rule(transform_order, e)?;
        let r = hankel_selfreciprocal_residual(|t: T| (-e * t).exp(), &rule, norm_rule)?;
        residuals.push(r.residual);
        omitted.push(r.omitted_mass);
    }
    let fit = quadratic_fit(eps, &residuals.iter().map(|r| *r * *r).collect::<Vec<_>>())?;
    Ok(SelfReciprocityScan { eps: eps.to_vec(), residuals, omitted_mass: omitted, fit })
}

/// Least-squares y = c0 + c1 x + c2 x^2.
fn quadratic_fit<T: Real>(x: &[T], y: &[T]) -> Result<[T; 3]> {
    let a = nalgebra::DMatrix::from_fn(x.len(), 3, |i, j| x[i].powi(j as i32));
    let b = nalgebra::DVector::from_column_slice(y);
    let ata = a.transpose() * &a;
    let atb = a.transpose() * b;
    let c = ata.lu().solve(&atb).ok_or_else(|| invalid("degenerate eps grid"))?;
    Ok([c[0], c[1], c[2]])
}

/// Residuals of w f(w) = f(1/w) / w for f = B[phi], phi an eigenvector of T with eigenvalue lambda.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalEquationReport<T> {
    pub w: Vec<T>,
    pub lhs: Vec<Complex<T>>,
    pub rhs: Vec<Complex<T>>,
    pub max_residual: T,
}

/// Evaluates B[phi] off the nodes through the eigen-equation: phi(t) = (1 - e^{-t}) (K phi)(t) / (lambda - e^{-t}),
/// so that B[phi](w) = w^{-2} int e^{-t/w} t (K phi)(t) / (lambda - e^{-t}) dt on a Lebesgue rule of rate 1/w.
pub fn check_functional_equation<T: Real>(
    lambda: Complex<T>,
    phi: &FunctionSample<T>,
    rule: &QuadratureRule<T>,
    w_grid: &[T],
) -> Result<FunctionalEquationReport<T>> {
    check_sample(phi, rule)?;
    // a computed eigenvalue 1 may land a rounding error below 1; that is still off the node values
    if lambda.im == T::zero() && lambda.re >= T::zero() && lambda.re < T::one() - lit(1e-8) {
        return Err(domain(format!("lambda = {} lies in the range of M", lambda.re)));
    }
    let half: T = T::one() / (T::one() + T::one());
    let two = T::one() + T::one();
    if let Some(w) = w_grid.iter().find(|&&w| !(w >= half && w <= two)) {
        return Err(domain(format!("w = {w} outside [1/2, 2]")));
    }
    let order = (2 * rule.order()).clamp(64, MAX_ORDER);
    let borel_at = |w: T| -> Result<Complex<T>> {
        let iw = w.recip();
        let b_rule = lebesgue_rule(order, iw)?;
        let s = b_rule.nodes().iter().zip(b_rule.weights()).fold(creal(T::zero()), |s, (&t, &wt)| {
            let den = lambda - creal((-t).exp());
            s + kernel_interpolate(phi, rule, t) / den * ((-iw * t).exp() * t * wt)
        });
        Ok(s * iw * iw)
    };
    let rows = w_grid
        .par_iter()
        .map(|&w| Ok((borel_at(w)? * w, borel_at(w.recip())? / w)))
        .collect::<Result<Vec<_>>>()?;
    let max_residual = rows.iter().fold(T::zero(), |m, (a, b)| m.max(cabs(*a - *b)));
    Ok(FunctionalEquationReport {
        w: w_grid.to_vec(),
        lhs: rows.iter().map(|r| r.0).collect(),
        rhs: rows.iter().map(|r| r.1).collect(),
        max_residual,
    })
}
