use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::Rational;
use crate::error::{domain, invalid, Error, Result};
use crate::scalar::{lit, Real};

/// Continued-fraction digits k_1..k_l, finite or purely periodic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CfWord {
    digits: Vec<u64>,
    periodic: bool,
}

impl CfWord {
    pub fn new(digits: Vec<u64>, periodic: bool) -> Result<Self> {
        if digits.contains(&0) {
            return Err(invalid("continued-fraction digits must be >= 1"));
        }
        if periodic && digits.is_empty() {
            return Err(invalid("periodic word must be non-empty"));
        }
        Ok(CfWord { digits, periodic })
    }

    pub fn finite(digits: Vec<u64>) -> Result<Self> {
        Self::new(digits, false)
    }

    pub fn periodic(digits: Vec<u64>) -> Result<Self> {
        Self::new(digits, true)
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digit_sum(&self) -> u64 {
        self.digits.iter().sum()
    }

    /// Cyclic shift by `j` places (the word of G^j x for a periodic point).
    pub fn rotated(&self, j: usize) -> CfWord {
        let mut d = self.digits.clone();
        if !d.is_empty() {
            let j = j % d.len();
            d.rotate_left(j);
        }
        CfWord { digits: d, periodic: self.periodic }
    }
}

impl fmt::Display for CfWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = self.digits.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",");
        if self.periodic {
            write!(f, "[({body})]")
        } else {
            write!(f, "[{body}]")
        }
    }
}

impl FromStr for CfWord {
    type Err = Error;

    /// Parses "1,2,3" (finite) or "(1,2)" (periodic); surrounding brackets are optional.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('[').trim_end_matches(']').trim();
        let (body, periodic) = match t.strip_prefix('(').and_then(|u| u.strip_suffix(')')) {
            Some(b) => (b, true),
            None => (t, false),
        };
        let digits = body
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| p.trim().parse::<u64>().map_err(|_| invalid(format!("bad digit {p:?}"))))
            .collect::<Result<Vec<_>>>()?;
        CfWord::new(digits, periodic)
    }
}

fn cf_tolerance<T: Real>() -> T {
    lit::<T>(1e-14).max(T::tiny())
}

/// Digits k_j = floor(1/G^{j-1}(x)), stopping once the fractional residual drops below ~1e-14.
pub fn cf_expand<T: Real>(x: T, max_terms: usize) -> Result<CfWord> {
    if !(x > T::zero() && x < T::one()) {
        return Err(domain(format!("cf_expand: x = {x} outside (0, 1)")));
    }
    let tol = cf_tolerance::<T>();
    let mut digits = Vec::new();
    let mut y = x;
    while digits.len() < max_terms {
        let inv = y.recip();
        let mut k = inv.floor();
        let mut r = inv - k;
        if T::one() - r < tol {
            k += T::one();
            r = T::zero();
        }
        let kd = crate::scalar::to_f64(k);
        if !(kd >= 1.0 && kd < u64::MAX as f64) {
            return Err(Error::Numerical(format!("cf_expand: digit {kd} not representable")));
        }
        digits.push(kd as u64);
        if r < tol {
            break;
        }
        y = r;
    }
    CfWord::finite(digits)
}

/// Finite continued fraction by backward recurrence.
pub fn cf_value<T: Real>(word: &CfWord) -> Result<T> {
    if word.is_empty() {
        return Err(invalid("cf_value: empty word"));
    }
    let mut v = T::zero();
    for &k in word.digits().iter().rev() {
        v = (crate::scalar::from_usize::<T>(k as usize) + v).recip();
    }
    Ok(v)
}

/// Exact expansion of a rational in (0, 1]; the Gauss-map iteration terminates.
pub fn cf_expand_exact(x: &Rational) -> Result<CfWord> {
    let v = x.inner();
    if !(v > &BigRational::zero() && v <= &BigRational::one()) {
        return Err(domain(format!("cf_expand_exact: x = {x} outside (0, 1]")));
    }
    let mut digits = Vec::new();
    let mut y = v.clone();
    while !y.is_zero() {
        let inv = y.recip();
        let k = inv.floor();
        digits.push(k.to_integer().to_u64().ok_or_else(|| Error::Numerical("digit overflow".into()))?);
        y = inv - k;
    }
    CfWord::finite(digits)
}

pub fn cf_value_exact(word: &CfWord) -> Result<Rational> {
    if word.is_empty() {
        return Err(invalid("cf_value_exact: empty word"));
    }
    let mut v = BigRational::zero();
    for &k in word.digits().iter().rev() {
        v = (BigRational::from_integer(BigInt::from(k)) + v).recip();
    }
    Ok(Rational::from(v))
}

/// Integer Mobius matrix [[a, b], [c, d]] acting as x -> (ax+b)/(cx+d).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mobius {
    pub a: i128,
    pub b: i128,
    pub c: i128,
    pub d: i128,
}

impl Mobius {
    pub const IDENTITY: Mobius = Mobius { a: 1, b: 0, c: 0, d: 1 };

    /// Phi_k(x) = 1/(x+k).
    pub fn gauss_branch(k: u64) -> Mobius {
        Mobius { a: 0, b: 1, c: 1, d: k as i128 }
    }

    /// Psi_0 and Psi_1 of the Farey map.
    pub fn farey_branch(b: u8) -> Mobius {
        if b == 0 {
            Mobius { a: 1, b: 0, c: 1, d: 1 }
        } else {
            Mobius { a: 0, b: 1, c: 1, d: 1 }
        }
    }

    /// Matrix of `self` after `other`, i.e. x -> self(other(x)).
    pub fn compose(&self, other: &Mobius) -> Result<Mobius> {
        let m = |x: i128, y: i128, u: i128, v: i128| -> Result<i128> {
            x.checked_mul(y)
                .and_then(|p| u.checked_mul(v).and_then(|q| p.checked_add(q)))
                .ok_or_else(|| Error::Numerical("Mobius coefficient overflow".into()))
        };
        Ok(Mobius {
            a: m(self.a, other.a, self.b, other.c)?,
            b: m(self.a, other.b, self.b, other.d)?,
            c: m(self.c, other.a, self.d, other.c)?,
            d: m(self.c, other.b, self.d, other.d)?,
        })
    }

    /// Composition Phi_{k_1} o ... o Phi_{k_l}.
    pub fn of_word(digits: &[u64]) -> Result<Mobius> {
        digits.iter().try_fold(Mobius::IDENTITY, |acc, &k| acc.compose(&Mobius::gauss_branch(k)))
    }

    /// Root in [0, 1] of c x^2 + (d - a) x - b = 0, from exact integer coefficients.
    pub fn fixed_point<T: Real>(&self) -> Result<T> {
        let overflow = || Error::Numerical("discriminant overflow".into());
        let dma = self.d.checked_sub(self.a).ok_or_else(overflow)?;
        let disc = dma
            .checked_mul(dma)
            .and_then(|s| self.b.checked_mul(self.c).and_then(|p| p.checked_mul(4)).and_then(|p| s.checked_add(p)))
            .ok_or_else(overflow)?;
        if disc < 0 {
            return Err(Error::Numerical("negative discriminant".into()));
        }
        if self.c == 0 {
            return Err(Error::Numerical("degenerate Mobius map (c = 0)".into()));
        }
        let sq = i128_to::<T>(disc).sqrt();
        let dma_t = i128_to::<T>(dma);
        let two: T = lit(2.0);
        // pick the algebraically equivalent form without cancellation
        let x = if dma >= 0 {
            let den = dma_t + sq;
            if den == T::zero() {
                T::zero()
            } else {
                two * i128_to::<T>(self.b) / den
            }
        } else {
            (sq - dma_t) / (two * i128_to::<T>(self.c))
        };
        if !(x >= T::zero() && x <= T::one()) || !x.is_finite() {
            return Err(Error::Numerical(format!("fixed point {x} outside [0, 1]")));
        }
        Ok(x)
    }

    /// |derivative| at x: |det| / (cx+d)^2.
    pub fn abs_derivative<T: Real>(&self, x: T) -> T {
        let det: T = match self.a.checked_mul(self.d).zip(self.b.checked_mul(self.c)) {
            Some((p, q)) => i128_to(p.saturating_sub(q).abs()),
            None => (i128_to::<T>(self.a) * i128_to(self.d) - i128_to::<T>(self.b) * i128_to(self.c)).abs(),
        };
        let den = i128_to::<T>(self.c) * x + i128_to::<T>(self.d);
        det / (den * den)
    }
}

fn i128_to<T: Real>(v: i128) -> T {
    lit(v as f64)
}

/// Periodic point x = [(k_1..k_l)] together with its orbit weight and Farey period.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit<T> {
    pub word: CfWord,
    pub value: T,
    /// prod_{j<l} (G^j x)^2
    pub weight: T,
    /// k_1 + ... + k_l
    pub farey_period: u64,
}

/// Solves the fixed-point quadratic of Phi_{k_1} o ... o Phi_{k_l} and the same for every cyclic shift.
pub fn periodic_cf_value<T: Real>(word: &CfWord) -> Result<PeriodicOrbit<T>> {
    if !word.is_periodic() || word.is_empty() {
        return Err(invalid("periodic_cf_value needs a non-empty periodic word"));
    }
    let d = word.digits();
    let mut weight = T::one();
    let mut value = T::zero();
    let mut rot = d.to_vec();
    for j in 0..d.len() {
        let x: T = Mobius::of_word(&rot)?.fixed_point()?;
        if x <= T::zero() || x >= T::one() {
            return Err(Error::Numerical(format!("periodic point {x} not in (0, 1)")));
        }
        if j == 0 {
            value = x;
        }
        weight *= x * x;
        rot.rotate_left(1);
    }
    if weight <= T::zero() {
        return Err(Error::Numerical("orbit weight underflow".into()));
    }
    Ok(PeriodicOrbit { word: word.clone(), value, weight, farey_period: word.digit_sum() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expand_examples() {
        let w = cf_expand(3.0_f64.sqrt() - 1.0, 4).unwrap();
        assert_eq!(w.digits(), &[1, 2, 1, 2]);
        assert_eq!(cf_expand(0.4_f64, 20).unwrap().digits(), &[2, 2]);
        let g = cf_expand(0.6180339887498949_f64, 10).unwrap();
        assert!(g.digits().iter().all(|&k| k == 1));
        assert_eq!(cf_expand(0.7_f64, 20).unwrap().digits(), &[1, 2, 3]);
    }

    #[test]
    fn value_examples() {
        let v = |d: Vec<u64>| cf_value::<f64>(&CfWord::finite(d).unwrap()).unwrap();
        assert!((v(vec![2, 2]) - 0.4).abs() < 1e-16);
        assert_eq!(v(vec![1]), 1.0);
        assert!((v(vec![1, 2]) - 2.0 / 3.0).abs() < 1e-16);
        assert!(cf_value::<f64>(&CfWord::finite(vec![]).unwrap()).is_err());
    }

    #[test]
    fn periodic_examples() {
        let o = periodic_cf_value::<f64>(&CfWord::periodic(vec![1]).unwrap()).unwrap();
        let g = (5.0_f64.sqrt() - 1.0) / 2.0;
        assert!((o.value - g).abs() < 1e-15);
        assert!((o.weight - g * g).abs() < 1e-15);
        assert_eq!(o.farey_period, 1);
        let o2 = periodic_cf_value::<f64>(&CfWord::periodic(vec![2]).unwrap()).unwrap();
        assert!((o2.value - (2.0_f64.sqrt() - 1.0)).abs() < 1e-15);
        let o12 = periodic_cf_value::<f64>(&CfWord::periodic(vec![1, 2]).unwrap()).unwrap();
        assert!((o12.value - (3.0_f64.sqrt() - 1.0)).abs() < 1e-15);
        assert_eq!(o12.farey_period, 3);
        assert!(periodic_cf_value::<f64>(&CfWord::finite(vec![1]).unwrap()).is_err());
    }

    #[test]
    fn multiplier_weight_agrees_with_shift_product() {
        for d in [vec![1u64, 2], vec![3, 1, 4], vec![2, 2, 5, 1]] {
            let w = CfWord::periodic(d.clone()).unwrap();
            let slow = periodic_cf_value::<f64>(&w).unwrap().weight;
            let m = Mobius::of_word(&d).unwrap();
            let fast = m.abs_derivative(m.fixed_point::<f64>().unwrap());
            assert!((slow - fast).abs() < 1e-15 * slow.max(1e-300) * 10.0, "{slow} {fast}");
        }
    }

    #[test]
    fn exact_expansion() {
        let r = Rational::new(7.into(), 10.into());
        assert_eq!(cf_expand_exact(&r).unwrap().digits(), &[1, 2, 3]);
        assert_eq!(cf_value_exact(&CfWord::finite(vec![1, 2, 3]).unwrap()).unwrap(), r);
    }

    #[test]
    fn word_parsing() {
        assert_eq!("(1,2)".parse::<CfWord>().unwrap(), CfWord::periodic(vec![1, 2]).unwrap());
        assert_eq!("[3, 4]".parse::<CfWord>().unwrap(), CfWord::finite(vec![3, 4]).unwrap());
        assert!("1,0".parse::<CfWord>().is_err());
    }

    #[test]
    fn f32_orbit() {
        let o = periodic_cf_value::<f32>(&CfWord::periodic(vec![1]).unwrap()).unwrap();
        assert!((o.value - 0.618034).abs() < 1e-6);
    }
}
