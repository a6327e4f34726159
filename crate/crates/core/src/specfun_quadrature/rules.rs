use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::{lit, Real};

pub const MIN_ORDER: usize = 4;
pub const MAX_ORDER: usize = 512;

/// Measures on (0, inf) that rules can integrate against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    /// t/(e^t - 1) dt
    M,
    /// t e^{-t} dt
    MTilde,
    /// e^{-t}(1 - e^{-t})/(t log 2) dt
    MHat,
    /// dt
    Lebesgue,
}

impl MeasureKind {
    pub fn density<T: Real>(&self, t: T) -> T {
        match self {
            MeasureKind::M => {
                if t == T::zero() {
                    T::one()
                } else {
                    t / t.exp_m1()
                }
            }
            MeasureKind::MTilde => t * (-t).exp(),
            MeasureKind::MHat => {
                if t == T::zero() {
                    T::ln_2().recip()
                } else {
                    (-t).exp() * -(-t).exp_m1() / (t * T::ln_2())
                }
            }
            MeasureKind::Lebesgue => T::one(),
        }
    }

    /// Total mass, `None` for Lebesgue measure.
    pub fn total_mass<T: Real>(&self) -> Option<T> {
        match self {
            MeasureKind::M => Some(T::pi() * T::pi() / lit(6.0)),
            MeasureKind::MTilde | MeasureKind::MHat => Some(T::one()),
            MeasureKind::Lebesgue => None,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            MeasureKind::M => "m",
            MeasureKind::MTilde => "m_tilde",
            MeasureKind::MHat => "m_hat",
            MeasureKind::Lebesgue => "lebesgue",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for MeasureKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "m" => Ok(MeasureKind::M),
            "m_tilde" => Ok(MeasureKind::MTilde),
            "m_hat" => Ok(MeasureKind::MHat),
            "lebesgue" => Ok(MeasureKind::Lebesgue),
            _ => Err(invalid(format!("unknown measure {s:?}"))),
        }
    }
}

/// Nodes and positive weights for integrating against a `MeasureKind`.
///
/// Weights at nodes beyond about 700/rate underflow to zero in `f64`; that is their true size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule<T> {
    measure: MeasureKind,
    order: usize,
    /// Lebesgue rules integrate f(u/rate)/rate; 1 otherwise.
    rate: T,
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> QuadratureRule<T> {
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn measure(&self) -> MeasureKind {
        self.measure
    }

    pub fn rate(&self) -> T {
        self.rate
    }

    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        self.nodes.iter().zip(&self.weights).fold(T::zero(), |s, (&t, &w)| s + w * f(t))
    }

    pub fn integrate_complex(&self, f: impl Fn(T) -> Complex<T>) -> Complex<T> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(Complex::new(T::zero(), T::zero()), |s, (&t, &w)| s + f(t) * w)
    }

    pub fn dot(&self, values: &[T]) -> T {
        values.iter().zip(&self.weights).fold(T::zero(), |s, (&v, &w)| s + w * v)
    }

    /// Largest target t for which the Hankel transform built on this rule is trusted: 2 N rate.
    pub fn hankel_resolved_limit(&self) -> T {
        crate::scalar::from_usize::<T>(2 * self.order) * self.rate
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Numerical(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(s).map_err(|e| invalid(e.to_string()))?;
        if r.nodes.len() != r.order || r.weights.len() != r.order {
            return Err(invalid("rule length does not match its order"));
        }
        Ok(r)
    }
}

/// L_n(x) and L_{n-1}(x) scaled by exp(-log_scale).
fn laguerre_scaled(n: usize, x: f64) -> (f64, f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = 1.0 - x;
    if n == 0 {
        return (p0, 0.0, 0.0);
    }
    let mut scale = 0.0;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0 - x) * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
        if p1.abs() > 1e100 {
            p0 *= 1e-100;
            p1 *= 1e-100;
            scale += 100.0 * std::f64::consts::LN_10;
        }
    }
    (p1, p0, scale)
}

/// Gauss-Laguerre nodes and log-weights: Golub-Welsch start, Newton polish, weights x/((n+1) L_{n+1}(x))^2.
fn gauss_laguerre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            (2 * i + 1) as f64
        } else if i.abs_diff(j) == 1 {
            i.max(j) as f64
        } else {
            0.0
        }
    });
    let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.total_cmp(b));
    for x in nodes.iter_mut() {
        for _ in 0..6 {
            let (ln, lnm1, _) = laguerre_scaled(n, *x);
            let deriv = n as f64 * (ln - lnm1) / *x;
            let step = ln / deriv;
            *x -= step;
            if step.abs() <= 1e-17 * x.abs() {
                break;
            }
        }
    }
    if nodes.windows(2).any(|w| w[1] <= w[0]) || nodes[0] <= 0.0 {
        return Err(Error::Numerical("Gauss-Laguerre nodes not strictly increasing".into()));
    }
    let logw = nodes
        .iter()
        .map(|&x| {
            let (l, _, scale) = laguerre_scaled(n + 1, x);
            x.ln() - 2.0 * ((n + 1) as f64).ln() - 2.0 * (l.abs().ln() + scale)
        })
        .collect();
    Ok((nodes, logw))
}

fn check_order(n: usize) -> Result<()> {
    if (MIN_ORDER..=MAX_ORDER).contains(&n) {
        Ok(())
    } else {
        Err(invalid(format!("quadrature order {n} outside [{MIN_ORDER}, {MAX_ORDER}]")))
    }
}

/// Gauss-Laguerre rule with the density-over-e^{-t} correction folded into the weights.
pub fn build_rule<T: Real>(measure: MeasureKind, n: usize) -> Result<QuadratureRule<T>> {
    if measure == MeasureKind::Lebesgue {
        return lebesgue_rule(n, T::one());
    }
    check_order(n)?;
    let (x, logw) = gauss_laguerre(n)?;
    let ln2 = std::f64::consts::LN_2;
    let weights = x
        .iter()
        .zip(&logw)
        .map(|(&t, &lw)| {
            let lam = lw.exp();
            let w = match measure {
                MeasureKind::M => lam * t / -(-t).exp_m1(),
                MeasureKind::MTilde => lam * t,
                MeasureKind::MHat => lam * -(-t).exp_m1() / (t * ln2),
                MeasureKind::Lebesgue => unreachable!(),
            };
            lit(w)
        })
        .collect();
    Ok(QuadratureRule { measure, order: n, rate: T::one(), nodes: x.iter().map(|&t| lit(t)).collect(), weights })
}

/// Rule for plain dt on (0, inf), exact for e^{-rate t} times polynomials of degree < 2N.
pub fn lebesgue_rule<T: Real>(n: usize, rate: T) -> Result<QuadratureRule<T>> {
    check_order(n)?;
    if !(rate > T::zero()) || !rate.is_finite() {
        return Err(invalid(format!("Lebesgue rule rate {rate} must be positive")));
    }
    let (x, logw) = gauss_laguerre(n)?;
    let nodes = x.iter().map(|&u| lit::<T>(u) / rate).collect();
    let weights = x.iter().zip(&logw).map(|(&u, &lw)| lit::<T>((lw + u).exp()) / rate).collect();
    Ok(QuadratureRule { measure: MeasureKind::Lebesgue, order: n, rate, nodes, weights })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laguerre_weights_sum_to_one() {
        for n in [4, 10, 40, 100, 300] {
            let (_, lw) = gauss_laguerre(n).unwrap();
            let s: f64 = lw.iter().map(|w| w.exp()).sum();
            assert!((s - 1.0).abs() < 1e-11, "n={n}: {s}");
        }
    }

    #[test]
    fn mass_examples() {
        let r = build_rule::<f64>(MeasureKind::M, 40).unwrap();
        assert!((r.integrate(|_| 1.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-10);
        let rt = build_rule::<f64>(MeasureKind::MTilde, 40).unwrap();
        assert!((rt.integrate(|_| 1.0) - 1.0).abs() < 1e-13);
        let rh = build_rule::<f64>(MeasureKind::MHat, 80).unwrap();
        assert!((rh.integrate(|_| 1.0) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn order_guard() {
        assert!(build_rule::<f64>(MeasureKind::M, 3).is_err());
        assert!(build_rule::<f64>(MeasureKind::M, 513).is_err());
        assert!(lebesgue_rule::<f64>(10, -1.0).is_err());
    }

    #[test]
    fn lebesgue_exponential() {
        let r = lebesgue_rule::<f64>(30, 0.5).unwrap();
        // int_0^inf e^{-t/2} t^3 dt = 3! 2^4
        assert!((r.integrate(|t| (-0.5 * t).exp() * t.powi(3)) - 96.0).abs() < 1e-10);
    }

    #[test]
    fn json_round_trip() {
        let r = build_rule::<f64>(MeasureKind::MHat, 8).unwrap();
        let s = r.to_json().unwrap();
        assert!(s.contains("\"measure\":\"m_hat\""));
        assert_eq!(QuadratureRule::<f64>::from_json(&s).unwrap(), r);
    }

    #[test]
    fn tags_parse() {
        for m in [MeasureKind::M, MeasureKind::MTilde, MeasureKind::MHat, MeasureKind::Lebesgue] {
            assert_eq!(m.tag().parse::<MeasureKind>().unwrap(), m);
        }
    }
}
