//! Scalar abstraction shared by every numeric routine.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::{ComplexField, RealField};
use num_complex::Complex;
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point scalar the library is generic over (`f32`, `f64`).
pub trait Real:
    RealField + Copy + Debug + Display + LowerExp + Serialize + DeserializeOwned + Send + Sync + 'static
{
    /// Relative tolerance used where an algorithm needs a "numerically zero" threshold.
    fn tiny() -> Self {
        Self::default_epsilon() * lit(16.0)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Converts an index or count into `T`.
#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    nalgebra::convert(n as f64)
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    nalgebra::try_convert::<T, f64>(x).unwrap_or(f64::NAN)
}

#[inline]
pub fn cabs<T: Real>(c: Complex<T>) -> T {
    c.re.hypot(c.im)
}

#[inline]
pub fn cexp<T: Real>(c: Complex<T>) -> Complex<T> {
    ComplexField::exp(c)
}

#[inline]
pub fn cln<T: Real>(c: Complex<T>) -> Complex<T> {
    ComplexField::ln(c)
}

#[inline]
pub fn csqrt<T: Real>(c: Complex<T>) -> Complex<T> {
    ComplexField::sqrt(c)
}

/// Principal power `c^p` for real `p`.
#[inline]
pub fn cpowf<T: Real>(c: Complex<T>, p: T) -> Complex<T> {
    if c.re == T::zero() && c.im == T::zero() {
        return Complex::new(T::zero(), T::zero());
    }
    cexp(cln(c) * p)
}

/// `c^n` by repeated squaring.
pub fn cpowu<T: Real>(c: Complex<T>, mut n: u64) -> Complex<T> {
    let mut acc = Complex::new(T::one(), T::zero());
    let mut base = c;
    while n > 0 {
        if n & 1 == 1 {
            acc *= base;
        }
        base = base * base;
        n >>= 1;
    }
    acc
}

#[inline]
pub fn creal<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Pairwise summation, independent of how the slice was produced.
pub fn pairwise_sum<S>(xs: &[S]) -> S
where
    S: Copy + std::ops::Add<Output = S> + num_traits::Zero,
{
    match xs.len() {
        0 => S::zero(),
        1 => xs[0],
        n if n <= 8 => xs.iter().fold(S::zero(), |a, &b| a + b),
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Pairwise product of factors 1 + d_i given as d_i, returned as prod - 1.
///
/// Factors close to 1 keep their low digits: (1 + a)(1 + b) - 1 = a + b + ab.
pub fn pairwise_product_m1<T: Real>(ds: &[T]) -> T {
    match ds.len() {
        0 => T::zero(),
        1 => ds[0],
        n => {
            let (a, b) = ds.split_at(n / 2);
            let (a, b) = (pairwise_product_m1(a), pairwise_product_m1(b));
            a + b + a * b
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powu_matches_repeated_product() {
        let c = Complex::new(0.3_f64, -0.7);
        let mut p = Complex::new(1.0, 0.0);
        for _ in 0..9 {
            p *= c;
        }
        assert!(cabs(cpowu(c, 9) - p) < 1e-15);
    }

    #[test]
    fn pairwise_sum_of_ones() {
        let v = vec![1.0_f64; 1001];
        assert_eq!(pairwise_sum(&v), 1001.0);
    }

    #[test]
    fn works_for_f32() {
        let x: f32 = lit(0.25);
        assert_eq!(to_f64(x), 0.25);
    }
}
