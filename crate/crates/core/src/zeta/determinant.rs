use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::orbits::trace_power;
use super::series::{PowerSeries, Var};
use crate::error::{domain, invalid, Error, Result};
use crate::scalar::{cabs, cexp, creal, from_usize, lit, to_f64, Real};
use crate::specfun_quadrature::QuadratureRule;
use crate::transfer_ops::{build_kzq, DiscretizedOperator};

/// Largest trace order used by the series route.
pub const MAX_LMAX: usize = 12;

/// Denominators below this are reported as a pole.
pub const POLE_THRESHOLD: f64 = 1e-12;

/// How det(1 - s K_{z,q}) is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "route")]
pub enum DetRoute {
    /// exp(-sum_{l<=lmax} s^l tr K^l / l) with tuple traces
    Series { lmax: usize, kmax: u64 },
    /// det(I - sA) of the Nystrom matrix on a rule of the given order
    Matrix { n: usize },
}

/// A determinant value with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetValue<T> {
    pub value: Complex<T>,
    /// series route: trace tails plus the geometric estimate of the omitted orders; zero for the matrix route
    pub error_estimate: T,
    /// series route: |tr K^l|^{1/l} at the largest even l used
    pub rho_estimate: Option<T>,
}

/// det(I - sA) by LU.
pub fn det_of_matrix<T: Real>(s: Complex<T>, op: &DiscretizedOperator<T>) -> Complex<T> {
    let n = op.n();
    let m = DMatrix::<Complex<T>>::identity(n, n) - op.matrix.map(|a| a * s);
    m.lu().determinant()
}

/// Traces of A^l for l = 1..=lmax by repeated multiplication.
pub fn matrix_traces<T: Real>(op: &DiscretizedOperator<T>, lmax: usize) -> Vec<Complex<T>> {
    let mut out = Vec::with_capacity(lmax);
    let mut p = op.matrix.clone();
    for l in 1..=lmax {
        out.push(p.trace());
        if l < lmax {
            p = &p * &op.matrix;
        }
    }
    out
}

fn check_lmax(lmax: usize) -> Result<()> {
    if lmax == 0 || lmax > MAX_LMAX {
        return Err(domain(format!("Lmax = {lmax} outside 1..={MAX_LMAX}")));
    }
    Ok(())
}

/// Fredholm determinant det(1 - s K_{z,q}) in the sense of Grothendieck.
pub fn fredholm_det<T: Real>(
    s: Complex<T>,
    z: Complex<T>,
    q: u32,
    route: DetRoute,
    rule: Option<&QuadratureRule<T>>,
) -> Result<DetValue<T>> {
    match route {
        DetRoute::Matrix { n } => {
            let op = operator(z, q, n, rule)?;
            Ok(DetValue { value: det_of_matrix(s, &op), error_estimate: T::zero(), rho_estimate: None })
        }
        DetRoute::Series { lmax, kmax } => {
            check_lmax(lmax)?;
            if s == creal(T::zero()) || z == creal(T::zero()) {
                return Ok(DetValue { value: creal(T::one()), error_estimate: T::zero(), rho_estimate: None });
            }
            let traces = (1..=lmax).map(|l| trace_power(l, z, q, kmax)).collect::<Result<Vec<_>>>()?;
            let even = if lmax % 2 == 0 { lmax } else { lmax - 1 };
            let rho = if even >= 2 { cabs(traces[even - 1].value).powf(from_usize::<T>(even).recip()) } else { cabs(traces[0].value) };
            let sr = cabs(s) * rho;
            if sr >= T::one() {
                return Err(Error::SeriesDivergent(to_f64(sr)));
            }
            let mut log = creal(T::zero());
            let mut tails = T::zero();
            let mut sl = creal(T::one());
            for (i, t) in traces.iter().enumerate() {
                sl *= s;
                let lf = from_usize::<T>(i + 1);
                log -= sl * t.value / lf;
                tails += cabs(sl) * t.tail_bound / lf;
            }
            let l1 = from_usize::<T>(lmax + 1);
            let omitted = sr.powf(l1) / (l1 * (T::one() - sr));
            let value = cexp(log);
            let err = cabs(value) * (tails + omitted).exp_m1();
            Ok(DetValue { value, error_estimate: err, rho_estimate: Some(rho) })
        }
    }
}

fn operator<T: Real>(z: Complex<T>, q: u32, n: usize, rule: Option<&QuadratureRule<T>>) -> Result<DiscretizedOperator<T>> {
    match rule {
        Some(r) if r.order() == n => build_kzq(z, q, r),
        Some(r) => Err(invalid(format!("rule of order {} given for N = {n}", r.order()))),
        None => {
            let r = crate::specfun_quadrature::build_rule(crate::specfun_quadrature::MeasureKind::M, n)?;
            build_kzq(z, q, &r)
        }
    }
}

/// zeta_2(s, z) = det(1 - s K_{z,1}) / det(1 - s K_{z,0}).
pub fn zeta2<T: Real>(s: Complex<T>, z: Complex<T>, route: DetRoute, rule: Option<&QuadratureRule<T>>) -> Result<Complex<T>> {
    let num = fredholm_det(s, z, 1, route, rule)?;
    let den = fredholm_det(s, z, 0, route, rule)?;
    if cabs(den.value) < lit(POLE_THRESHOLD) {
        return Err(Error::PoleProximity(to_f64(cabs(den.value))));
    }
    Ok(num.value / den.value)
}

/// log zeta_2(s, z) = sum_l s^l (tr A_0^l - tr A_1^l)/l through s^lmax, from matrix traces.
pub fn log_zeta2_s_series<T: Real>(z: Complex<T>, lmax: usize, rule: &QuadratureRule<T>) -> Result<PowerSeries<Complex<T>>> {
    check_lmax(lmax)?;
    let t0 = matrix_traces(&build_kzq(z, 0, rule)?, lmax);
    let t1 = matrix_traces(&build_kzq(z, 1, rule)?, lmax);
    let mut coeffs = vec![creal(T::zero())];
    for l in 1..=lmax {
        coeffs.push((t0[l - 1] - t1[l - 1]) / from_usize::<T>(l));
    }
    Ok(PowerSeries::new(coeffs, lmax, Var::S))
}

/// zeta_2(s, z) as an s-series through s^lmax.
pub fn zeta2_s_series<T: Real>(z: Complex<T>, lmax: usize, rule: &QuadratureRule<T>) -> Result<PowerSeries<Complex<T>>> {
    log_zeta2_s_series(z, lmax, rule)?.exp()
}

/// A real zero of s -> det(I - s A_{z,0}).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleLocation<T> {
    pub z: T,
    pub s: T,
    pub det_at_s: T,
    pub iterations: usize,
}

const POLE_TOL: f64 = 1e-10;

/// Root of the real determinant on `bracket` by bisection, finished with secant steps.
pub fn pole_locate<T: Real>(z: T, bracket: (T, T), rule: &QuadratureRule<T>) -> Result<PoleLocation<T>> {
    if z > T::one() {
        return Err(Error::OnCut(to_f64(z)));
    }
    let (mut a, mut b) = if bracket.0 < bracket.1 { bracket } else { (bracket.1, bracket.0) };
    if !(a.is_finite() && b.is_finite()) || a == b {
        return Err(invalid("pole_locate needs a finite, non-degenerate bracket"));
    }
    let op = build_kzq(creal(z), 0, rule)?;
    let f = |s: T| det_of_matrix(creal(s), &op).re;
    let (mut fa, fb) = (f(a), f(b));
    if fa == T::zero() {
        return Ok(PoleLocation { z, s: a, det_at_s: fa, iterations: 0 });
    }
    if fb == T::zero() {
        return Ok(PoleLocation { z, s: b, det_at_s: fb, iterations: 0 });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange(to_f64(a), to_f64(b)));
    }
    let tol: T = lit(POLE_TOL);
    let mut it = 0;
    // bisection down to a bracket where the secant is safe
    while b - a > lit::<T>(1e-4) * (T::one() + a.abs()) {
        let mid = (a + b) / lit(2.0);
        let fm = f(mid);
        it += 1;
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let mut fb = f(b);
    for _ in 0..100 {
        it += 1;
        let c = if fb != fa { b - fb * (b - a) / (fb - fa) } else { (a + b) / lit(2.0) };
        let c = if c > a && c < b { c } else { (a + b) / lit(2.0) };
        let fc = f(c);
        if fc.signum() == fa.signum() {
            a = c;
            fa = fc;
        } else {
            b = c;
            fb = fc;
        }
        if fc == T::zero() || b - a < tol || fc.abs() < T::default_epsilon() {
            return Ok(PoleLocation { z, s: c, det_at_s: fc, iterations: it });
        }
        // guard against one-sided secant stagnation
        let mid = (a + b) / lit(2.0);
        let fm = f(mid);
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
            fb = fm;
        }
    }
    Err(Error::NoConvergence("pole_locate: bracket did not shrink below 1e-10".into()))
}
