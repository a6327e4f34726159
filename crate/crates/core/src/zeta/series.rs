use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_traits::{FromPrimitive, Num};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Formal variable of a truncated series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Var {
    S,
    Z,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Var::S => "s",
            Var::Z => "z",
        })
    }
}

/// c_0 + c_1 v + ... + c_L v^L modulo v^{L+1}.
///
/// Binary operations truncate to the smaller order of the operands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerSeries<C> {
    coeffs: Vec<C>,
    var: Var,
}

impl<C> PowerSeries<C>
where
    C: Num + Clone + FromPrimitive,
{
    /// Coefficients beyond `order` are dropped; missing ones are zero.
    pub fn new(mut coeffs: Vec<C>, order: usize, var: Var) -> Self {
        coeffs.resize(order + 1, C::zero());
        PowerSeries { coeffs, var }
    }

    pub fn constant(c: C, order: usize, var: Var) -> Self {
        Self::new(vec![c], order, var)
    }

    /// The series of the variable itself.
    pub fn variable(order: usize, var: Var) -> Self {
        Self::new(vec![C::zero(), C::one()], order, var)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> C {
        self.coeffs.get(n).cloned().unwrap_or_else(C::zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs[..=order.min(self.order())].to_vec(), order.min(self.order()), self.var)
    }

    fn common(&self, other: &Self) -> Result<usize> {
        if self.var != other.var {
            return Err(invalid(format!("series in {} and {} cannot be combined", self.var, other.var)));
        }
        Ok(self.order().min(other.order()))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let l = self.common(other)?;
        Ok(Self::new((0..=l).map(|n| self.coeff(n) + other.coeff(n)).collect(), l, self.var))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let l = self.common(other)?;
        Ok(Self::new((0..=l).map(|n| self.coeff(n) - other.coeff(n)).collect(), l, self.var))
    }

    pub fn scale(&self, c: C) -> Self {
        Self { coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(), var: self.var }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let l = self.common(other)?;
        let coeffs = (0..=l)
            .map(|n| (0..=n).fold(C::zero(), |s, k| s + self.coeffs[k].clone() * other.coeffs[n - k].clone()))
            .collect();
        Ok(Self::new(coeffs, l, self.var))
    }

    /// self / other; needs other's constant term nonzero.
    pub fn div(&self, other: &Self) -> Result<Self> {
        let l = self.common(other)?;
        let d0 = other.coeffs[0].clone();
        if d0.is_zero() {
            return Err(Error::Numerical("series division by a series with zero constant term".into()));
        }
        let mut q: Vec<C> = Vec::with_capacity(l + 1);
        for n in 0..=l {
            let acc = (1..=n).fold(self.coeffs[n].clone(), |s, k| s - other.coeffs[k].clone() * q[n - k].clone());
            q.push(acc / d0.clone());
        }
        Ok(Self::new(q, l, self.var))
    }

    /// exp(f) for f with zero constant term: n g_n = sum_{k=1}^n k f_k g_{n-k}.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(invalid("series exp needs a zero constant term"));
        }
        let l = self.order();
        let mut g: Vec<C> = vec![C::one()];
        for n in 1..=l {
            let acc = (1..=n).fold(C::zero(), |s, k| s + int::<C>(k) * self.coeffs[k].clone() * g[n - k].clone());
            g.push(acc / int::<C>(n));
        }
        Ok(Self::new(g, l, self.var))
    }

    /// log(g) for g with constant term 1: n f_n = n g_n - sum_{k=1}^{n-1} k f_k g_{n-k}.
    pub fn log(&self) -> Result<Self> {
        if self.coeffs[0] != C::one() {
            return Err(invalid("series log needs constant term 1"));
        }
        let l = self.order();
        let mut f: Vec<C> = vec![C::zero()];
        for n in 1..=l {
            let acc = (1..n).fold(int::<C>(n) * self.coeffs[n].clone(), |s, k| {
                s - int::<C>(k) * f[k].clone() * self.coeffs[n - k].clone()
            });
            f.push(acc / int::<C>(n));
        }
        Ok(Self::new(f, l, self.var))
    }

    pub fn to_json(&self) -> Result<String>
    where
        C: Serialize,
    {
        serde_json::to_string(self).map_err(|e| Error::Numerical(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self>
    where
        C: for<'de> Deserialize<'de>,
    {
        let p: Self = serde_json::from_str(s).map_err(|e| invalid(e.to_string()))?;
        if p.coeffs.is_empty() {
            return Err(invalid("series without coefficients"));
        }
        Ok(p)
    }
}

fn int<C: FromPrimitive>(n: usize) -> C {
    C::from_usize(n).expect("coefficient type holds small integers")
}

macro_rules! forward_op {
    ($tr:ident, $m:ident) => {
        impl<C: Num + Clone + FromPrimitive> $tr for &PowerSeries<C> {
            type Output = Result<PowerSeries<C>>;
            fn $m(self, rhs: Self) -> Self::Output {
                PowerSeries::$m(self, rhs)
            }
        }
    };
}
forward_op!(Add, add);
forward_op!(Sub, sub);
forward_op!(Mul, mul);
