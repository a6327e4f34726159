use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::scalar::{cabs, cpowu, creal, from_usize, lit, pairwise_sum, Real};
use crate::specfun_quadrature::lerch_phi;
use crate::transfer_ops::power_tail;

/// Subtrees whose bound falls below this are skipped and their bound added to the tail.
pub const PRUNE_TOL: f64 = 1e-16;
/// Pruning threshold relative to the beyond-kmax tail.
pub const PRUNE_REL: f64 = 1e-6;

/// Largest tuple length accepted by the enumerators.
pub const MAX_TUPLE_LEN: usize = 12;

/// Periodic continued fraction [(k_1..k_l)] seen through its word matrix prod [[0,1],[1,k_i]].
#[derive(Clone, Copy, Debug)]
pub(crate) struct Leaf<T> {
    /// prod_i x_{k_i..k_{i-1}}^2, from the multiplier 1/(cx+d)^2
    pub weight: T,
    /// x_{k_1..k_l}
    pub value: T,
}

#[derive(Clone, Copy, Debug)]
struct Mat<T> {
    a: T,
    b: T,
    c: T,
    d: T,
}

impl<T: Real> Mat<T> {
    fn identity() -> Self {
        Mat { a: T::one(), b: T::zero(), c: T::zero(), d: T::one() }
    }

    /// self * [[0,1],[1,k]]
    fn push(&self, k: T) -> Self {
        Mat { a: self.b, b: self.a + self.b * k, c: self.d, d: self.c + self.d * k }
    }

    /// Attracting root of c x^2 + (d - a) x - b = 0 in (0, 1), then 1/(cx+d)^2.
    fn leaf(&self) -> Leaf<T> {
        let two = T::one() + T::one();
        let p = self.d - self.a;
        let disc = (p * p + two * two * self.b * self.c).sqrt();
        let x = if p >= T::zero() { two * self.b / (p + disc) } else { (disc - p) / (two * self.c) };
        let den = self.c * x + self.d;
        Leaf { weight: (den * den).recip(), value: x }
    }
}

/// Weight of the periodic orbit with period word `digits`, by the multiplier.
pub(crate) fn multiplier_leaf<T: Real>(digits: &[u64]) -> Leaf<T> {
    digits.iter().fold(Mat::identity(), |m, &k| m.push(lit(k as f64))).leaf()
}

/// prod_i x_{rot_i}^2 with every rotation recovered by the contracting backward recursion
/// x_{rot_i} = 1/(k_i + x_{rot_{i+1}}); independent of the multiplier formula.
pub(crate) fn rotation_weight<T: Real>(digits: &[u64]) -> T {
    let x1 = multiplier_leaf::<T>(digits).value;
    let mut x = x1;
    let mut w = x1 * x1;
    for &k in digits[1..].iter().rev() {
        x = (lit::<T>(k as f64) + x).recip();
        w *= x * x;
    }
    w
}

/// Partial sum over tuples together with the bound on everything not summed.
#[derive(Clone, Copy, Debug)]
pub(crate) struct TupleSum<T: Real> {
    pub value: Complex<T>,
    pub tail: T,
}

/// Which quantity a leaf contributes; `weight` is prod x_rot^2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum LeafKind {
    /// (-1)^{ql} P^{q+1} / (1 - (-1)^l P) with P from the multiplier
    Trace(u32),
    /// P, with P from the backward rotations
    Orbit,
}

/// Sup over tuples of |leaf| / P.
fn leaf_constant<T: Real>(kind: LeafKind) -> T {
    match kind {
        // P <= x_1^2 = (3 - sqrt 5)/2, so 1/(1 - P) <= (1 + sqrt 5)/2
        LeafKind::Trace(_) => (T::one() + lit::<T>(5.0).sqrt()) / lit(2.0),
        LeafKind::Orbit => T::one(),
    }
}

fn leaf_value<T: Real>(kind: LeafKind, digits: &[u64], m: &Mat<T>) -> T {
    match kind {
        LeafKind::Trace(q) => {
            let p = m.leaf().weight;
            let l = digits.len();
            let sign = if (q as usize * l) % 2 == 1 { -T::one() } else { T::one() };
            let den = if l % 2 == 1 { T::one() + p } else { T::one() - p };
            sign * p.powi(q as i32 + 1) / den
        }
        LeafKind::Orbit => rotation_weight(digits),
    }
}

/// Prefix sums of |z|^k / k^2 for k = 0..=kmax.
fn prefix_sums<T: Real>(za: T, kmax: u64) -> Vec<T> {
    let mut out = Vec::with_capacity(kmax as usize + 1);
    out.push(T::zero());
    let mut s = T::zero();
    let mut p = T::one();
    for k in 1..=kmax {
        p *= za;
        let kf: T = lit(k as f64);
        s += p / (kf * kf);
        out.push(s);
    }
    out
}

/// Li_2(|z|) = sum_{k>=1} |z|^k / k^2
fn full_sum<T: Real>(za: T) -> Result<T> {
    if za == T::zero() {
        return Ok(T::zero());
    }
    let v = lerch_phi(creal(za), lit(2.0), creal(T::one()))?;
    Ok(za * (v.value.re + v.tail_bound))
}

/// Neumaier-compensated running sum; the order of additions is fixed by the traversal.
#[derive(Clone, Copy)]
struct Acc<T: Real> {
    sum: Complex<T>,
    comp: Complex<T>,
}

impl<T: Real> Acc<T> {
    fn new() -> Self {
        Acc { sum: creal(T::zero()), comp: creal(T::zero()) }
    }

    fn add(&mut self, v: Complex<T>) {
        let step = |s: T, c: &mut T, x: T| -> T {
            let t = s + x;
            if s.abs() >= x.abs() {
                *c += (s - t) + x;
            } else {
                *c += (x - t) + s;
            }
            t
        };
        self.sum.re = step(self.sum.re, &mut self.comp.re, v.re);
        self.sum.im = step(self.sum.im, &mut self.comp.im, v.im);
    }

    fn value(&self) -> Complex<T> {
        self.sum + self.comp
    }
}

struct Dfs<'a, T: Real> {
    l: usize,
    kmax: u64,
    z: Complex<T>,
    za: T,
    kind: LeafKind,
    prune: T,
    /// box^j for j = 0..=l, box = sum_{k<=kmax} |z|^k/k^2
    rem: &'a [T],
    /// prefix sums of |z|^k/k^2
    cum: &'a [T],
    constant: T,
    digits: Vec<u64>,
    acc: Acc<T>,
    pruned: T,
}

impl<T: Real> Dfs<'_, T> {
    /// Visits the children of the current prefix. `fixed` bounds |z|^{k_i} x_rot_i^2 over
    /// positions i < d, each refined with k_{i+1}: x_rot_i < 1/(k_i + 1/(k_{i+1} + 1)).
    fn descend(&mut self, m: Mat<T>, zpow: Complex<T>, fixed: T) {
        let d = self.digits.len();
        let last = self.digits[d - 1];
        let lastf: T = lit(last as f64);
        let z_last = self.za.powi(last as i32);
        let rem = self.rem[self.l - d - 1];
        let mut zk = creal(T::one());
        for k in 1..=self.kmax {
            zk *= self.z;
            let kf: T = lit(k as f64);
            let pos = (lastf + (kf + T::one()).recip()).powi(-2) * z_last;
            let child = self.constant * fixed * pos * (self.cum[k as usize] - self.cum[k as usize - 1]) * rem;
            if child < self.prune {
                let rest = self.cum[self.kmax as usize] - self.cum[k as usize - 1];
                self.pruned += self.constant * fixed * z_last * lastf.powi(-2) * rest * rem;
                return;
            }
            let mk = m.push(kf);
            self.digits.push(k);
            if d + 1 == self.l {
                self.acc.add(zpow * zk * leaf_value(self.kind, &self.digits, &mk));
            } else {
                self.descend(mk, zpow * zk, fixed * pos);
            }
            self.digits.pop();
        }
    }
}

/// Sum over (k_1..k_l) in [1, kmax]^l of z^{k_1+..+k_l} times the leaf quantity, parallel over k_1.
///
/// The tail bounds everything left out: tuples with an entry above kmax (union bound with
/// x_{k..} < 1/k) plus subtrees skipped by pruning.
pub(crate) fn tuple_sum<T: Real>(l: usize, z: Complex<T>, kmax: u64, kind: LeafKind, prune: T) -> Result<TupleSum<T>> {
    if l == 0 || l > MAX_TUPLE_LEN {
        return Err(domain(format!("tuple length {l} outside 1..={MAX_TUPLE_LEN}")));
    }
    if kmax == 0 {
        return Err(domain("kmax must be positive"));
    }
    let za = cabs(z);
    if za > T::one() {
        return Err(domain(format!("|z| = {za} > 1: the tuple series diverges")));
    }
    if za == T::zero() {
        return Ok(TupleSum { value: creal(T::zero()), tail: T::zero() });
    }
    let constant = leaf_constant::<T>(kind);
    let cum = prefix_sums(za, kmax);
    let s_box = cum[kmax as usize];
    let rem: Vec<T> = (0..=l).map(|j| s_box.powi(j as i32)).collect();
    let beyond =
        constant * from_usize::<T>(l) * power_tail(za, lit(2.0), kmax as usize) * full_sum(za)?.powi(l as i32 - 1);
    // subtrees far below the truncation error are not worth visiting
    let prune = prune.max(beyond * lit(PRUNE_REL));
    let parts: Vec<(Complex<T>, T)> = (1..=kmax)
        .into_par_iter()
        .map(|k1| {
            let own = cum[k1 as usize] - cum[k1 as usize - 1];
            let bound = constant * own * rem[l - 1];
            if bound < prune {
                return (creal(T::zero()), bound);
            }
            let m = Mat::identity().push(lit(k1 as f64));
            let zk = cpowu(z, k1);
            if l == 1 {
                return (zk * leaf_value(kind, &[k1], &m), T::zero());
            }
            let mut dfs = Dfs {
                l,
                kmax,
                z,
                za,
                kind,
                prune,
                rem: &rem,
                cum: &cum,
                constant,
                digits: vec![k1],
                acc: Acc::new(),
                pruned: T::zero(),
            };
            dfs.descend(m, zk, T::one());
            (dfs.acc.value(), dfs.pruned)
        })
        .collect();
    let sums: Vec<Complex<T>> = parts.iter().map(|p| p.0).collect();
    let pruned: Vec<T> = parts.iter().map(|p| p.1).collect();
    let value = pairwise_sum(&sums);
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::Numerical("non-finite tuple sum".into()));
    }
    Ok(TupleSum { value, tail: beyond + pairwise_sum(&pruned) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf_dynamics::{periodic_cf_value, CfWord};

    #[test]
    fn weight_routes_agree() {
        for w in [vec![1u64], vec![2], vec![1, 2], vec![3, 1, 4], vec![1, 1, 7, 2], vec![50, 1, 9]] {
            let orbit = periodic_cf_value::<f64>(&CfWord::periodic(w.clone()).unwrap()).unwrap();
            let m = multiplier_leaf::<f64>(&w);
            assert!((m.value - orbit.value).abs() < 1e-15);
            assert!((m.weight - orbit.weight).abs() < 1e-14 * orbit.weight);
            assert!((rotation_weight::<f64>(&w) - orbit.weight).abs() < 1e-14 * orbit.weight);
        }
    }

    #[test]
    fn pruned_mass_is_counted() {
        let loose = tuple_sum(3, creal(0.8), 60, LeafKind::Orbit, 1e-6).unwrap();
        let tight = tuple_sum(3, creal(0.8), 60, LeafKind::Orbit, 1e-16).unwrap();
        assert!(loose.tail > tight.tail);
        assert!((loose.value - tight.value).norm() <= loose.tail);
    }

    #[test]
    fn deterministic_across_pools() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| tuple_sum(3, Complex::new(0.6, 0.3), 80, LeafKind::Trace(1), 1e-16).unwrap())
        };
        let (a, b) = (run(1), run(4));
        assert_eq!(a.value, b.value);
        assert_eq!(a.tail, b.tail);
    }
}
