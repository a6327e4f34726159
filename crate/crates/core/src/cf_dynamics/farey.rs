use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::maps::inverse_branch_farey_exact;
use crate::error::{invalid, Error, Result};

/// Largest Farey level (and preimage depth) accepted.
pub const MAX_FAREY_LEVEL: usize = 20;

/// Reduced non-negative fraction with arbitrary-size numerator and denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `num/den` in lowest terms. Panics on a zero denominator.
    pub fn new(num: BigInt, den: BigInt) -> Self {
        Rational(BigRational::new(num, den))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    fn mediant(&self, other: &Rational) -> Rational {
        Rational(BigRational::new_raw(self.numer() + other.numer(), self.denom() + other.denom()))
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s.split_once('/').unwrap_or((s, "1"));
        let num: BigInt = a.trim().parse().map_err(|_| invalid(format!("bad numerator in {s:?}")))?;
        let den: BigInt = b.trim().parse().map_err(|_| invalid(format!("bad denominator in {s:?}")))?;
        if !den.is_positive() || num.is_negative() {
            return Err(invalid(format!("{s:?} is not a non-negative fraction")));
        }
        Ok(Rational::new(num, den))
    }
}

impl Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn guard(n: usize) -> Result<()> {
    if n > MAX_FAREY_LEVEL {
        Err(Error::SizeGuard { requested: n, limit: MAX_FAREY_LEVEL })
    } else {
        Ok(())
    }
}

/// Farey level n by mediant insertion from (0/1, 1/1); 2^n + 1 increasing fractions.
pub fn farey_level(n: usize) -> Result<Vec<Rational>> {
    guard(n)?;
    let mut level = vec![Rational::zero(), Rational::one()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(2 * level.len() - 1);
        for pair in level.windows(2) {
            next.push(pair[0].clone());
            next.push(pair[0].mediant(&pair[1]));
        }
        next.push(level.last().cloned().expect("non-empty"));
        level = next;
    }
    Ok(level)
}

/// Union of F^{-j}{0} for j = 0..=depth, pulled back exactly through both inverse branches.
pub fn preimages_of_zero(depth: usize) -> Result<BTreeSet<Rational>> {
    guard(depth)?;
    let mut all = BTreeSet::from([Rational::zero()]);
    let mut frontier = vec![Rational::zero()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for x in &frontier {
            for b in 0..2 {
                let y = inverse_branch_farey_exact(b, x)?;
                if all.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    Ok(all)
}
