use num_traits::{One, ToPrimitive, Zero};

use super::Rational;
use crate::error::{domain, invalid, Result};
use crate::scalar::{from_usize, to_f64, Real};

fn check_unit<T: Real>(x: T, what: &str) -> Result<()> {
    if x >= T::zero() && x <= T::one() {
        Ok(())
    } else {
        Err(domain(format!("{what}: x = {x} outside [0, 1]")))
    }
}

/// F(x) = x/(1-x) on [0, 1/2], (1-x)/x on (1/2, 1].
pub fn farey_map<T: Real>(x: T) -> Result<T> {
    check_unit(x, "farey_map")?;
    let half: T = crate::scalar::lit(0.5);
    Ok(if x <= half { x / (T::one() - x) } else { (T::one() - x) / x })
}

/// G(x) = {1/x}, with G(0) = 0.
pub fn gauss_map<T: Real>(x: T) -> Result<T> {
    check_unit(x, "gauss_map")?;
    if x == T::zero() {
        return Ok(T::zero());
    }
    let y = x.recip();
    Ok(y - y.floor())
}

/// Psi_0(x) = x/(1+x), Psi_1(x) = 1/(1+x).
pub fn inverse_branch_farey<T: Real>(branch: u8, x: T) -> Result<T> {
    check_unit(x, "inverse_branch_farey")?;
    match branch {
        0 => Ok(x / (T::one() + x)),
        1 => Ok((T::one() + x).recip()),
        b => Err(invalid(format!("branch index {b} is not 0 or 1"))),
    }
}

/// Phi_k(x) = 1/(x+k).
pub fn inverse_branch_gauss<T: Real>(k: u64, x: T) -> Result<T> {
    if k == 0 {
        return Err(invalid("Gauss branch index must be >= 1"));
    }
    check_unit(x, "inverse_branch_gauss")?;
    Ok((x + from_usize::<T>(k as usize)).recip())
}

/// n-fold iterate of Psi_0 in closed form, x/(1+nx).
pub fn psi0_iterate<T: Real>(n: u64, x: T) -> Result<T> {
    check_unit(x, "psi0_iterate")?;
    Ok(x / (T::one() + from_usize::<T>(n as usize) * x))
}

/// tau(x) = floor(1/x); saturates at `u64::MAX` for subnormal-scale inputs.
pub fn first_passage_time<T: Real>(x: T) -> Result<u64> {
    if !(x > T::zero() && x <= T::one()) {
        return Err(domain(format!("first_passage_time: x = {x} outside (0, 1]")));
    }
    let k = to_f64(x.recip().floor());
    Ok(if k >= u64::MAX as f64 { u64::MAX } else { k as u64 })
}

fn check_unit_exact(x: &Rational, what: &str) -> Result<()> {
    if x.inner() >= &num_rational::BigRational::zero() && x.inner() <= &num_rational::BigRational::one() {
        Ok(())
    } else {
        Err(domain(format!("{what}: x = {x} outside [0, 1]")))
    }
}

pub fn farey_map_exact(x: &Rational) -> Result<Rational> {
    check_unit_exact(x, "farey_map_exact")?;
    let one = num_rational::BigRational::one();
    let v = x.inner();
    let half = num_rational::BigRational::new(1.into(), 2.into());
    Ok(Rational::from(if *v <= half { v / (&one - v) } else { (&one - v) / v }))
}

pub fn gauss_map_exact(x: &Rational) -> Result<Rational> {
    check_unit_exact(x, "gauss_map_exact")?;
    if x.inner().is_zero() {
        return Ok(Rational::zero());
    }
    let y = x.inner().recip();
    Ok(Rational::from(&y - y.floor()))
}

pub fn inverse_branch_farey_exact(branch: u8, x: &Rational) -> Result<Rational> {
    check_unit_exact(x, "inverse_branch_farey_exact")?;
    let (p, q) = (x.numer().clone(), x.denom().clone());
    match branch {
        0 => Ok(Rational::new(p.clone(), p + q)),
        1 => Ok(Rational::new(q.clone(), p + q)),
        b => Err(invalid(format!("branch index {b} is not 0 or 1"))),
    }
}

#[allow(dead_code)]
pub(crate) fn first_passage_time_exact(x: &Rational) -> Option<u64> {
    if x.inner().is_zero() {
        return None;
    }
    x.inner().recip().floor().to_integer().to_u64()
}
