use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::{cabs, creal, from_usize, lit, Real};
use crate::specfun_quadrature::lerch_phi;

fn check_x<T: Real>(x: T, what: &str) -> Result<()> {
    if x > T::zero() && x <= T::one() {
        Ok(())
    } else {
        Err(domain(format!("{what}: x = {x} outside (0, 1]")))
    }
}

/// (P f)(x) = (x+1)^{-2} [f(x/(x+1)) + f(1/(x+1))].
pub fn apply_p<T: Real>(f: impl Fn(T) -> T, x: T) -> Result<T> {
    check_x(x, "apply_p")?;
    Ok(apply_p0_raw(&f, x) + apply_p1_raw(&f, x))
}

/// (P_0 f)(x) = (x+1)^{-2} f(x/(x+1)).
pub fn apply_p0<T: Real>(f: impl Fn(T) -> T, x: T) -> Result<T> {
    check_x(x, "apply_p0")?;
    Ok(apply_p0_raw(&f, x))
}

/// (P_1 f)(x) = (x+1)^{-2} f(1/(x+1)).
pub fn apply_p1<T: Real>(f: impl Fn(T) -> T, x: T) -> Result<T> {
    check_x(x, "apply_p1")?;
    Ok(apply_p1_raw(&f, x))
}

fn apply_p0_raw<T: Real>(f: &impl Fn(T) -> T, x: T) -> T {
    let y = (x + T::one()).recip();
    y * y * f(x * y)
}

fn apply_p1_raw<T: Real>(f: &impl Fn(T) -> T, x: T) -> T {
    let y = (x + T::one()).recip();
    y * y * f(y)
}

/// A series value together with the analytic bound on its truncated tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue<T> {
    pub value: Complex<T>,
    pub tail_bound: T,
}

fn check_qz<T: Real>(x: Complex<T>, z: Complex<T>) -> Result<()> {
    if cabs(z) > T::one() {
        return Err(domain(format!("apply_qz: |z| = {} > 1; use the kernel route", cabs(z))));
    }
    if x.re < T::zero() {
        return Err(domain(format!("apply_qz: Re x = {} < 0", x.re)));
    }
    Ok(())
}

/// sum_{n > nmax} |z|^n / n^p
pub fn power_tail<T: Real>(z_abs: T, p: T, nmax: usize) -> T {
    if z_abs == T::zero() {
        return T::zero();
    }
    let start = from_usize::<T>(nmax + 1);
    match lerch_phi(creal(z_abs), p, creal(start)) {
        Ok(v) => z_abs.powi((nmax + 1) as i32) * (v.value.re + v.tail_bound),
        Err(_) => T::max_value().unwrap_or(T::one()),
    }
}

/// Largest |f| over sample points of the segment [0, 1/(x + nmax + 1)], where the tail evaluates f.
fn sup_near_zero<T: Real>(f: &impl Fn(Complex<T>) -> Complex<T>, x: Complex<T>, nmax: usize) -> T {
    let end = (x + creal(from_usize::<T>(nmax + 1))).inv();
    (0..=16).fold(T::zero(), |m, i| {
        let u = end * from_usize::<T>(i) / lit::<T>(16.0);
        m.max(cabs(f(u)))
    })
}

/// (Q_z f)(x) = sum_{n=1}^{nmax} z^n (x+n)^{-2} f(1/(x+n)); tail bound sup|f| sum_{n>nmax} |z|^n/n^2.
pub fn apply_qz<T: Real>(
    f: impl Fn(Complex<T>) -> Complex<T>,
    x: Complex<T>,
    z: Complex<T>,
    nmax: usize,
) -> Result<SeriesValue<T>> {
    check_qz(x, z)?;
    let zero = creal(T::zero());
    if z == zero {
        return Ok(SeriesValue { value: zero, tail_bound: T::zero() });
    }
    let mut sum = zero;
    let mut zn = creal(T::one());
    for n in 1..=nmax {
        zn *= z;
        let y = (x + creal(from_usize::<T>(n))).inv();
        sum += zn * y * y * f(y);
    }
    let tail = sup_near_zero(&f, x, nmax) * power_tail(cabs(z), lit(2.0), nmax);
    Ok(SeriesValue { value: sum, tail_bound: tail })
}

/// `apply_qz` plus the first-order tail f(0) z^{nmax+1} Phi(z, 2, x+nmax+1); the bound then scales like 1/nmax^2.
pub fn apply_qz_corrected<T: Real>(
    f: impl Fn(Complex<T>) -> Complex<T>,
    x: Complex<T>,
    z: Complex<T>,
    nmax: usize,
) -> Result<SeriesValue<T>> {
    let head = apply_qz(&f, x, z, nmax)?;
    if z == creal(T::zero()) {
        return Ok(head);
    }
    let f0 = f(creal(T::zero()));
    let shift = x + creal(from_usize::<T>(nmax + 1));
    let phi = lerch_phi(z, lit(2.0), shift)?;
    let mut zn1 = creal(T::one());
    for _ in 0..=nmax {
        zn1 *= z;
    }
    let correction = f0 * zn1 * phi.value;
    // Lipschitz estimate of f at 0 over the tail segment
    let end = shift.inv();
    let lip = (1..=16).fold(T::zero(), |m, i| {
        let u = end * from_usize::<T>(i) / lit::<T>(16.0);
        m.max(cabs(f(u) - f0) / cabs(u))
    });
    let tail = lip * power_tail(cabs(z), lit(3.0), nmax) + cabs(f0) * cabs(zn1) * phi.tail_bound;
    Ok(SeriesValue { value: head.value + correction, tail_bound: tail })
}

/// Pointwise comparison of both sides of an operator identity on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport<T> {
    pub name: String,
    pub z: Complex<T>,
    pub nmax: usize,
    pub grid_len: usize,
    pub max_residual: T,
    pub tail_budget: T,
    /// max_residual <= tail_budget + 1e-10
    pub passed: bool,
}

impl<T: Real> ResidualReport<T> {
    fn new(name: &str, z: Complex<T>, nmax: usize, grid_len: usize, max_residual: T, tail_budget: T) -> Self {
        let passed = max_residual <= tail_budget + lit(1e-10);
        ResidualReport { name: name.into(), z, nmax, grid_len, max_residual, tail_budget, passed }
    }
}

fn sup_on_unit<T: Real>(f: &impl Fn(T) -> T) -> T {
    (0..=200).fold(T::zero(), |m, i| m.max(f(from_usize::<T>(i) / lit(200.0)).abs()))
}

fn qz_real<T: Real>(f: &impl Fn(T) -> T, x: T, z: Complex<T>, nmax: usize) -> Complex<T> {
    let mut sum = creal(T::zero());
    let mut zn = creal(T::one());
    for n in 1..=nmax {
        zn *= z;
        let y = (x + from_usize::<T>(n)).recip();
        sum += zn * (y * y * f(y));
    }
    sum
}

fn check_grid<T: Real>(grid: &[T], z: Complex<T>) -> Result<()> {
    if cabs(z) > T::one() {
        return Err(domain("identity checks need |z| <= 1"));
    }
    if let Some(x) = grid.iter().find(|&&x| !(x > T::zero() && x <= T::one())) {
        return Err(domain(format!("grid point {x} outside (0, 1]")));
    }
    Ok(())
}

/// (1 - Q_z)(1 - z P_0) f against (1 - z P) f, each side summed directly.
pub fn verify_identity_first<T: Real>(
    z: Complex<T>,
    f: impl Fn(T) -> T,
    grid: &[T],
    nmax: usize,
) -> Result<ResidualReport<T>> {
    check_grid(grid, z)?;
    let g = |x: T| -> Complex<T> { creal(f(x)) - z * apply_p0_raw(&f, x) };
    let mut worst = T::zero();
    for &x in grid {
        // Q_z g, expanded term by term
        let mut qg = creal(T::zero());
        let mut zn = creal(T::one());
        for n in 1..=nmax {
            zn *= z;
            let y = (x + from_usize::<T>(n)).recip();
            qg += zn * g(y) * (y * y);
        }
        let lhs = g(x) - qg;
        let rhs = creal(f(x)) - z * (apply_p0_raw(&f, x) + apply_p1_raw(&f, x));
        worst = worst.max(cabs(lhs - rhs));
    }
    let budget = (T::one() + cabs(z)) * sup_on_unit(&f) * power_tail(cabs(z), lit(2.0), nmax);
    Ok(ResidualReport::new("first", z, nmax, grid.len(), worst, budget))
}

/// (1 - z S)(1 - Q_z) f against (1 - z (S + P_1)) f; f must be defined on (0, 2].
pub fn verify_identity_second<T: Real>(
    z: Complex<T>,
    f: impl Fn(T) -> T,
    grid: &[T],
    nmax: usize,
) -> Result<ResidualReport<T>> {
    check_grid(grid, z)?;
    let mut worst = T::zero();
    for &x in grid {
        let g0 = creal(f(x)) - qz_real(&f, x, z, nmax);
        let g1 = creal(f(x + T::one())) - qz_real(&f, x + T::one(), z, nmax);
        let lhs = g0 - z * g1;
        let rhs = creal(f(x)) - z * (f(x + T::one()) + apply_p1_raw(&f, x));
        worst = worst.max(cabs(lhs - rhs));
    }
    let budget = (T::one() + cabs(z)) * sup_on_unit(&f) * power_tail(cabs(z), lit(2.0), nmax);
    Ok(ResidualReport::new("second", z, nmax, grid.len(), worst, budget))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn p_examples() {
        assert_eq!(apply_p(|_| 1.0_f64, 1.0).unwrap(), 0.5);
        let odd = |w: f64| 1.0 - 2.0 * w;
        assert!(apply_p(odd, 0.37).unwrap().abs() < 1e-15);
        assert!(apply_p(|w: f64| w, 0.0).is_err());
    }

    #[test]
    fn qz_examples() {
        let one = |_: Complex64| Complex64::new(1.0, 0.0);
        let z0 = apply_qz(one, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 100).unwrap();
        assert_eq!(z0.value, Complex64::new(0.0, 0.0));
        let half = apply_qz(one, Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0), 60).unwrap();
        // Li_2(1/2) = pi^2/12 - (log 2)^2 / 2
        let li2 = std::f64::consts::PI.powi(2) / 12.0 - 2f64.ln().powi(2) / 2.0;
        assert!((half.value.re - li2).abs() <= half.tail_bound + 1e-15);
        assert!(apply_qz(one, Complex64::new(0.0, 0.0), Complex64::new(1.5, 0.0), 10).is_err());
    }

    #[test]
    fn corrected_tail_is_tighter() {
        let f = |u: Complex64| (Complex64::new(1.0, 0.0) + u).inv();
        let x = Complex64::new(0.3, 0.0);
        let z = Complex64::new(1.0, 0.0);
        let plain = apply_qz(f, x, z, 1000).unwrap();
        let corr = apply_qz_corrected(f, x, z, 1000).unwrap();
        let reference = apply_qz_corrected(f, x, z, 100_000).unwrap();
        assert!(corr.tail_bound < plain.tail_bound * 1e-2);
        assert!((corr.value - reference.value).norm() <= corr.tail_bound + reference.tail_bound);
    }

    #[test]
    fn identities_at_zero_are_exact() {
        let grid: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
        let z = Complex64::new(0.0, 0.0);
        let r1 = verify_identity_first(z, |w| (-w).exp(), &grid, 50).unwrap();
        let r2 = verify_identity_second(z, |w| (-w).exp(), &grid, 50).unwrap();
        assert_eq!(r1.max_residual, 0.0);
        assert_eq!(r2.max_residual, 0.0);
    }
}
