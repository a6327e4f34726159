use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::series::{PowerSeries, Var};
use super::tuples::{multiplier_leaf, rotation_weight, tuple_sum, LeafKind, MAX_TUPLE_LEN, PRUNE_TOL};
use crate::error::{domain, Error, Result};
use crate::scalar::{cabs, cpowu, creal, from_usize, lit, pairwise_sum, Real};
use crate::specfun_quadrature::Tailed;
use crate::transfer_ops::power_tail;

/// Largest n for the Farey partition function (2^n words).
pub const MAX_FAREY_WORD: usize = 12;

/// x_k = [(k)] = (sqrt(k^2+4) - k)/2, the fixed point of the k-th Gauss branch.
pub fn gauss_fixed_point<T: Real>(k: u64) -> T {
    let kf: T = lit(k as f64);
    let two: T = lit(2.0);
    two / ((kf * kf + two * two).sqrt() + kf)
}

fn check_z<T: Real>(z: Complex<T>) -> Result<()> {
    if cabs(z) > T::one() {
        return Err(domain(format!("|z| = {} > 1: the periodic-orbit sums diverge", cabs(z))));
    }
    Ok(())
}

/// tr K_{z,q} = (-1)^q sum_k z^k x_k^{2(q+1)} / (1 + x_k^2); tail sum_{k>kmax} |z|^k k^{-2(q+1)}.
pub fn trace_kzq<T: Real>(z: Complex<T>, q: u32, kmax: u64) -> Result<Tailed<T>> {
    check_z(z)?;
    if kmax == 0 {
        return Err(domain("kmax must be positive"));
    }
    let sign = if q % 2 == 1 { -T::one() } else { T::one() };
    let mut zk = creal(T::one());
    let terms: Vec<Complex<T>> = (1..=kmax)
        .map(|k| {
            zk *= z;
            let x2 = gauss_fixed_point::<T>(k).powi(2);
            zk * (sign * x2.powi(q as i32 + 1) / (T::one() + x2))
        })
        .collect();
    let tail = power_tail(cabs(z), lit(2.0 * (q as f64 + 1.0)), kmax as usize);
    Ok(Tailed { value: pairwise_sum(&terms), tail_bound: tail })
}

/// tr K_{z,q}^l as a sum over period-l tuples; l = 1 is `trace_kzq`.
pub fn trace_power<T: Real>(l: usize, z: Complex<T>, q: u32, kmax: u64) -> Result<Tailed<T>> {
    check_z(z)?;
    if l == 1 {
        return trace_kzq(z, q, kmax);
    }
    let s = tuple_sum(l, z, kmax, LeafKind::Trace(q), lit(PRUNE_TOL))?;
    Ok(Tailed { value: s.value, tail_bound: s.tail })
}

/// How Xi_l(z) is summed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum XiRoute {
    /// tr K_{z,0}^l - tr K_{z,1}^l
    Trace,
    /// z^{p_F} prod (G^j x)^2 over period-l points
    Direct,
}

/// Xi_l(z) = sum over x = G^l x of z^{p_F(x)} prod_{j<l} (G^j x)^2.
pub fn grand_xi<T: Real>(l: usize, z: Complex<T>, kmax: u64, route: XiRoute) -> Result<Tailed<T>> {
    check_z(z)?;
    match route {
        XiRoute::Trace => {
            let a = trace_power(l, z, 0, kmax)?;
            let b = trace_power(l, z, 1, kmax)?;
            Ok(Tailed { value: a.value - b.value, tail_bound: a.tail_bound + b.tail_bound })
        }
        XiRoute::Direct => {
            let s = tuple_sum(l, z, kmax, LeafKind::Orbit, lit(PRUNE_TOL))?;
            Ok(Tailed { value: s.value, tail_bound: s.tail })
        }
    }
}

/// Z_n(G) = Xi_n(1), summed directly over tuples in [1, kmax]^n.
pub fn partition_z_g<T: Real>(n: usize, kmax: u64) -> Result<Tailed<T>> {
    grand_xi(n, creal(T::one()), kmax, XiRoute::Direct)
}

/// How Z_n(F) is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionMethod {
    /// all 2^n words in {Psi_0, Psi_1}, fixed points by iteration
    Brute,
    /// 1 + sum_m (n/m) sum over compositions of n into m parts
    Symbolic,
}

const FIXED_POINT_ITERS: usize = 100_000;

/// Fixed point and |derivative| of Psi_{b_1} o ... o Psi_{b_n} by contraction iteration.
fn word_fixed_point<T: Real>(bits: u32, n: usize) -> Result<(T, T)> {
    let apply = |x: T| -> (T, T) {
        let mut y = x;
        let mut deriv = T::one();
        for i in (0..n).rev() {
            let s = (T::one() + y).recip();
            deriv *= s * s;
            y = if bits >> i & 1 == 1 { s } else { y * s };
        }
        (y, deriv)
    };
    let tol = T::default_epsilon() * lit(4.0);
    let mut x: T = lit(0.5);
    for _ in 0..FIXED_POINT_ITERS {
        let y = apply(x).0;
        if (y - x).abs() <= tol * y.abs().max(T::one()) {
            return Ok((y, apply(y).1));
        }
        x = y;
    }
    Err(Error::NoConvergence(format!("fixed point of Farey word {bits:0n$b}")))
}

/// Compositions of n into m positive parts, in lexicographic order.
fn compositions(n: usize, m: usize, out: &mut Vec<Vec<u64>>, cur: &mut Vec<u64>) {
    if cur.len() + 1 == m {
        let used: u64 = cur.iter().sum();
        cur.push(n as u64 - used);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    let used: u64 = cur.iter().sum();
    let left = m - cur.len() - 1;
    for k in 1..=(n as u64 - used - left as u64) {
        cur.push(k);
        compositions(n, m, out, cur);
        cur.pop();
    }
}

fn all_compositions(n: usize, m: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    if m >= 1 && m <= n {
        compositions(n, m, &mut out, &mut Vec::new());
    }
    out
}

/// Z_n(F) = sum over x = F^n x of prod 1/|F'(F^k x)|; the neutral point 0 contributes 1.
pub fn partition_z_f<T: Real>(n: usize, method: PartitionMethod) -> Result<T> {
    if n == 0 || n > MAX_FAREY_WORD {
        return Err(domain(format!("n = {n} outside 1..={MAX_FAREY_WORD}")));
    }
    match method {
        PartitionMethod::Brute => {
            let mut terms = vec![T::one()];
            for bits in 1..(1u32 << n) {
                terms.push(word_fixed_point::<T>(bits, n)?.1);
            }
            Ok(pairwise_sum(&terms))
        }
        PartitionMethod::Symbolic => {
            let mut terms = vec![T::one()];
            for m in 1..=n {
                let ratio = from_usize::<T>(n) / from_usize::<T>(m);
                for c in all_compositions(n, m) {
                    terms.push(ratio * multiplier_leaf::<T>(&c).weight);
                }
            }
            Ok(pairwise_sum(&terms))
        }
    }
}

/// Xi_l(z) as a z-series through z^order: the coefficient of z^n sums the weights of all
/// compositions of n into l parts, so every coefficient is a finite sum.
pub fn xi_z_series<T: Real>(l: usize, order: usize) -> Result<PowerSeries<T>> {
    if l == 0 || l > MAX_TUPLE_LEN {
        return Err(domain(format!("l = {l} outside 1..={MAX_TUPLE_LEN}")));
    }
    if order > 2 * MAX_TUPLE_LEN {
        return Err(Error::SizeGuard { requested: order, limit: 2 * MAX_TUPLE_LEN });
    }
    let coeffs = (0..=order)
        .map(|n| {
            let w: Vec<T> = all_compositions(n, l).iter().map(|c| rotation_weight::<T>(c)).collect();
            pairwise_sum(&w)
        })
        .collect();
    Ok(PowerSeries::new(coeffs, order, Var::Z))
}

/// zeta_2(1, z) = exp sum_{l>=1} Xi_l(z)/l as a z-series through z^order.
pub fn zeta2_at_one_z_series<T: Real>(order: usize) -> Result<PowerSeries<T>> {
    let mut log = PowerSeries::constant(T::zero(), order, Var::Z);
    for l in 1..=order.min(MAX_TUPLE_LEN) {
        log = log.add(&xi_z_series::<T>(l, order)?.scale(from_usize::<T>(l).recip()))?;
    }
    log.exp()
}

/// zeta_F(z) = exp sum_{n=1}^{nmax} z^n Z_n(F)/n, truncated at z^nmax.
pub fn zeta_f_series<T: Real>(nmax: usize, method: PartitionMethod) -> Result<PowerSeries<T>> {
    if nmax > MAX_FAREY_WORD {
        return Err(Error::SizeGuard { requested: nmax, limit: MAX_FAREY_WORD });
    }
    let mut coeffs = vec![T::zero()];
    for n in 1..=nmax {
        coeffs.push(partition_z_f::<T>(n, method)? / from_usize::<T>(n));
    }
    PowerSeries::new(coeffs, nmax, Var::Z).exp()
}

/// Sum of z^k x_k^2 for k <= kmax, the closed form of Xi_1.
pub fn xi1_closed<T: Real>(z: Complex<T>, kmax: u64) -> Complex<T> {
    let terms: Vec<Complex<T>> =
        (1..=kmax).map(|k| cpowu(z, k) * gauss_fixed_point::<T>(k).powi(2)).collect();
    pairwise_sum(&terms)
}
