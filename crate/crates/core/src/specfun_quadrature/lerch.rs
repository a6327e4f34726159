use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::scalar::{cabs, cpowf, creal, from_usize, lit, Real};

/// A complex value with an upper bound on the neglected tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tailed<T> {
    pub value: Complex<T>,
    pub tail_bound: T,
}

const MAX_TERMS: usize = 2_000_000;

// B_2, B_4, ..., B_20
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

fn term<T: Real>(b: Complex<T>, n: usize, a: T) -> Complex<T> {
    let base = b + creal(from_usize::<T>(n));
    if base.im == T::zero() {
        creal(base.re.powf(-a))
    } else {
        cpowf(base, -a)
    }
}

/// Phi(z, a, b) = sum_{n>=0} z^n / (b+n)^a for |z| <= 1, a > 1, Re b > 0.
pub fn lerch_phi<T: Real>(z: Complex<T>, a: T, b: Complex<T>) -> Result<Tailed<T>> {
    let az = cabs(z);
    if az > T::one() {
        return Err(domain(format!("lerch_phi: |z| = {az} > 1")));
    }
    if a <= T::one() {
        return Err(domain(format!("lerch_phi: a = {a} must exceed 1")));
    }
    if b.re <= T::zero() {
        return Err(domain(format!("lerch_phi: Re b = {} must be positive", b.re)));
    }
    let zero = creal(T::zero());
    if z == zero {
        return Ok(Tailed { value: term(b, 0, a), tail_bound: T::zero() });
    }
    if z == creal(T::one()) {
        return Ok(euler_maclaurin(b, a));
    }
    let eps = T::default_epsilon();
    let mut sum = zero;
    let mut zn = creal(T::one());
    for n in 0..MAX_TERMS {
        sum += zn * term(b, n, a);
        zn *= z;
        let next = from_usize::<T>(n + 1) + b.re;
        let bound = if az < T::one() {
            cabs(zn) * next.powf(-a) / (T::one() - az)
        } else {
            (next - T::one()).max(lit(0.5)).powf(T::one() - a) / (a - T::one())
        };
        if bound <= eps * cabs(sum) * lit(0.1) {
            return Ok(Tailed { value: sum, tail_bound: bound });
        }
        if n + 1 == MAX_TERMS {
            return Ok(Tailed { value: sum, tail_bound: bound });
        }
    }
    Err(Error::NoConvergence("lerch_phi".into()))
}

/// z = 1: direct head plus the Euler-Maclaurin tail of sum (b+n)^{-a}.
fn euler_maclaurin<T: Real>(b: Complex<T>, a: T) -> Tailed<T> {
    let n0 = 24usize;
    let head: Complex<T> = (0..n0).map(|n| term(b, n, a)).fold(creal(T::zero()), |s, x| s + x);
    let bn = b + creal(from_usize::<T>(n0));
    let one_minus_a = T::one() - a;
    let mut tail = cpowf(bn, one_minus_a) / creal(a - T::one()) + cpowf(bn, -a) / creal(lit(2.0));
    // rising factorial (a)_{2j-1} and (2j)!
    let mut rising = a;
    let mut fact: T = lit(2.0);
    let mut last = T::zero();
    for (j, &bj) in BERNOULLI.iter().enumerate() {
        let jj = j + 1;
        if jj > 1 {
            let m = from_usize::<T>(2 * jj - 2);
            rising *= (a + m - T::one()) * (a + m);
            fact *= from_usize::<T>(2 * jj - 1) * from_usize::<T>(2 * jj);
        }
        let corr = cpowf(bn, -a - from_usize::<T>(2 * jj - 1)) * creal(lit::<T>(bj) * rising / fact);
        tail += corr;
        last = cabs(corr);
    }
    Tailed { value: head + tail, tail_bound: last * lit(2.0) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn examples() {
        let r = |x: f64| Complex64::new(x, 0.0);
        assert_eq!(lerch_phi(r(0.0), 2.0, r(1.0)).unwrap().value, r(1.0));
        let z2 = lerch_phi(r(1.0), 2.0, r(1.0)).unwrap();
        assert!((z2.value.re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-15);
        // sixty terms of the defining series
        let direct: f64 = (0..60).map(|n| 0.5f64.powi(n) / ((1 + n) as f64).powi(2)).sum();
        let h = lerch_phi(r(0.5), 2.0, r(1.0)).unwrap();
        assert!((h.value.re - direct).abs() < 1e-15);
    }

    #[test]
    fn rejects_divergent() {
        let r = |x: f64| Complex64::new(x, 0.0);
        assert!(lerch_phi(r(1.1), 2.0, r(1.0)).is_err());
        assert!(lerch_phi(r(1.0), 1.0, r(1.0)).is_err());
        assert!(lerch_phi(r(0.5), 2.0, r(-1.0)).is_err());
    }

    #[test]
    fn trigamma_recurrence_complex() {
        // psi'(w) - psi'(w+1) = 1/w^2
        let w = Complex64::new(0.7, 0.4);
        let a = lerch_phi(Complex64::new(1.0, 0.0), 2.0, w).unwrap().value;
        let b = lerch_phi(Complex64::new(1.0, 0.0), 2.0, w + 1.0).unwrap().value;
        assert!((a - b - 1.0 / (w * w)).norm() < 1e-14);
    }

    #[test]
    fn zeta_three() {
        let v = lerch_phi(Complex64::new(1.0, 0.0), 3.0, Complex64::new(1.0, 0.0)).unwrap();
        assert!((v.value.re - 1.2020569031595942854).abs() < 1e-15);
    }
}
