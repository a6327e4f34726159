//! Invariant densities, the Kaluza sequence, Khinchin averages and Monte Carlo Birkhoff sums.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cf_dynamics::CfWord;
use crate::error::{domain, invalid, Error, Result};
use crate::scalar::{from_usize, lit, pairwise_product_m1, pairwise_sum, to_f64, Real};

/// e(x) = 1/(x log 2), the infinite invariant density of the Farey map.
pub fn density_e<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(domain(format!("density_e: x = {x} must be > 0")));
    }
    Ok((x * T::ln_2()).recip())
}

/// h(x) = 1/((1+x) log 2), the Gauss density. Accepts any x > -1 so shifted arguments stay valid.
pub fn density_h<T: Real>(x: T) -> Result<T> {
    if !(x > -T::one()) {
        return Err(domain(format!("density_h: x = {x} must be > -1")));
    }
    Ok(((T::one() + x) * T::ln_2()).recip())
}

/// H(x) = log(1+x)/log 2.
pub fn density_h_primitive<T: Real>(x: T) -> Result<T> {
    if !(x > -T::one()) {
        return Err(domain(format!("density_h_primitive: x = {x} must be > -1")));
    }
    Ok(x.ln_1p() / T::ln_2())
}

/// q_n = log(1 + 1/(n+1))/log 2 for n = 0..=N.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KaluzaSequence<T> {
    pub q: Vec<T>,
}

impl<T: Real> KaluzaSequence<T> {
    pub fn new(n: usize) -> Self {
        let q = (0..=n).map(|i| (from_usize::<T>(i + 1).recip()).ln_1p() / T::ln_2()).collect();
        KaluzaSequence { q }
    }

    /// q_n^2 < q_{n-1} q_{n+1} for every interior index.
    pub fn is_strict_kaluza(&self) -> bool {
        self.q.windows(3).all(|w| w[1] * w[1] < w[0] * w[2])
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.q.windows(2).all(|w| w[1] < w[0]) && self.q.iter().all(|&x| x > T::zero())
    }
}

/// Growth of |f(k)| beyond kmax, used to sum the Khinchin tail analytically.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TailEnvelope<T> {
    /// |f(k)| <= c
    Bounded(T),
    /// |f(k)| <= c k^p with p < 1
    Power { c: T, p: T },
    /// |f(k)| <= log k
    Log,
}

impl<T: Real> TailEnvelope<T> {
    /// Upper bound for sum_{k>K} g(k)/(k(k+2) log 2), using log(1+u) <= u and g(x)/x^2 decreasing.
    pub fn tail_bound(&self, kmax: u64) -> T {
        let k = from_usize::<T>(kmax as usize);
        let raw = match *self {
            TailEnvelope::Bounded(c) => c / k,
            TailEnvelope::Power { c, p } => c * k.powf(p - T::one()) / (T::one() - p),
            TailEnvelope::Log => (k.ln() + T::one()) / k,
        };
        raw / T::ln_2()
    }
}

/// Truncated Khinchin average with its analytic tail bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KhinchinSum<T> {
    pub value: T,
    pub tail_bound: T,
    pub kmax: u64,
}

/// log(1 + 1/(k(k+2)))/log 2, the Gauss measure of the cylinder {tau = k}.
pub fn digit_probability<T: Real>(k: u64) -> T {
    let kk = from_usize::<T>(k as usize);
    (kk * (kk + lit(2.0))).recip().ln_1p() / T::ln_2()
}

const CHUNK: u64 = 1 << 15;

fn chunked<T: Real, F>(kmax: u64, term: F) -> Vec<T>
where
    F: Fn(u64) -> T + Sync,
{
    let n_chunks = kmax.div_ceil(CHUNK);
    (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK + 1;
            let hi = ((c + 1) * CHUNK).min(kmax);
            let v: Vec<T> = (lo..=hi).map(&term).collect();
            pairwise_sum(&v)
        })
        .collect()
}

/// sum_{k<=kmax} f(k) log(1+1/(k(k+2)))/log 2, plus the tail bound implied by `envelope`.
pub fn khinchin_average<T, F>(f: F, kmax: u64, envelope: TailEnvelope<T>) -> Result<KhinchinSum<T>>
where
    T: Real,
    F: Fn(u64) -> T + Sync,
{
    if kmax < 1000 {
        return Err(invalid(format!("khinchin_average: kmax = {kmax} < 1000")));
    }
    let bad = std::sync::atomic::AtomicBool::new(false);
    let parts = chunked(kmax, |k| {
        let v = f(k);
        if !v.is_finite() {
            bad.store(true, std::sync::atomic::Ordering::Relaxed);
        }
        v * digit_probability::<T>(k)
    });
    if bad.into_inner() {
        return Err(Error::Numerical("khinchin_average: f returned a non-finite value".into()));
    }
    Ok(KhinchinSum { value: pairwise_sum(&parts), tail_bound: envelope.tail_bound(kmax), kmax })
}

/// Khinchin's constant from the truncated product, with tail estimate and bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KhinchinConstant<T> {
    pub kmax: u64,
    /// log of the truncated product
    pub log_partial: T,
    /// asymptotic estimate of the missing sum beyond kmax
    pub tail_estimate: T,
    /// rigorous upper bound for the missing sum
    pub tail_bound: T,
    /// K = log_partial + tail_estimate
    pub k: T,
    /// e^K
    pub exp_k: T,
    /// truncated product without the tail correction
    pub product_partial: T,
}

/// Estimate of sum_{k>K} log k log(1+1/(k(k+2)))/log 2 from the midpoint integral of the 1/x expansion.
fn khinchin_tail_estimate<T: Real>(kmax: u64) -> T {
    let a = from_usize::<T>(kmax as usize) + lit(0.5);
    let la = a.ln();
    // int_a^inf log x / x^p dx
    let i = |p: f64| {
        let pm1: T = lit(p - 1.0);
        a.powf(-pm1) * (la / pm1 + (pm1 * pm1).recip())
    };
    // log(1 + 1/(x(x+2))) = x^-2 - 2 x^-3 + 3.5 x^-4 - 6 x^-5 + ...
    (i(2.0) - i(3.0) * lit(2.0) + i(4.0) * lit(3.5) - i(5.0) * lit(6.0)) / T::ln_2()
}

/// e^K = prod_{k<=kmax} (1 + 1/(k(k+2)))^{log k / log 2}, extended by a multiplicative tail estimate.
pub fn khinchin_constant<T: Real>(kmax: u64) -> Result<KhinchinConstant<T>> {
    if kmax < 1000 {
        return Err(invalid(format!("khinchin_constant: kmax = {kmax} < 1000")));
    }
    let n_chunks = kmax.div_ceil(CHUNK);
    let parts: Vec<T> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK + 1;
            let hi = ((c + 1) * CHUNK).min(kmax);
            let v: Vec<T> = (lo..=hi)
                .map(|k| (from_usize::<T>(k as usize).ln() * digit_probability::<T>(k)).exp_m1())
                .collect();
            pairwise_product_m1(&v)
        })
        .collect();
    let excess = pairwise_product_m1(&parts);
    let product_partial = T::one() + excess;
    let log_partial = excess.ln_1p();
    let tail_estimate = khinchin_tail_estimate::<T>(kmax);
    let tail_bound = TailEnvelope::<T>::Log.tail_bound(kmax);
    let k = log_partial + tail_estimate;
    Ok(KhinchinConstant { kmax, log_partial, tail_estimate, tail_bound, k, exp_k: k.exp(), product_partial })
}

/// Monte Carlo summary; serializes with fields mean, stderr, n, seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsRecord {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub samples: Vec<f64>,
}

impl StatsRecord {
    fn from_samples(samples: Vec<f64>, seed: u64) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = if n > 1 { samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
        StatsRecord { mean, stderr: (var / n as f64).sqrt(), n, seed, samples }
    }
}

/// Generator for orbit `index`; streams of one ChaCha8 key, so results do not depend on thread count.
pub fn orbit_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

const MAX_RESTARTS: usize = 1000;

/// Gauss-map digits tau(G^j x), j < len, from a uniform start; restarts if the float orbit reaches 0.
fn random_digits(rng: &mut ChaCha8Rng, len: usize, mut visit: impl FnMut(usize, f64)) -> Result<()> {
    'restart: for _ in 0..MAX_RESTARTS {
        let mut x: f64 = rng.random();
        if x == 0.0 {
            continue;
        }
        let mut step = 0;
        while step < len {
            let inv = 1.0 / x;
            let k = inv.floor();
            visit(step, k);
            x = inv - k;
            step += 1;
            if x == 0.0 && step < len {
                continue 'restart;
            }
        }
        return Ok(());
    }
    Err(Error::NoConvergence("orbit kept hitting rationals".into()))
}

fn check_orbits(n_orbits: usize) -> Result<()> {
    if n_orbits == 0 {
        Err(invalid("n_orbits must be >= 1"))
    } else {
        Ok(())
    }
}

/// Birkhoff averages (1/n) sum log tau(G^j x) over independent random orbits.
pub fn birkhoff_log_tau(seed: u64, n_orbits: usize, orbit_len: usize) -> Result<StatsRecord> {
    check_orbits(n_orbits)?;
    if orbit_len < 1000 {
        return Err(invalid(format!("orbit_len = {orbit_len} < 1000")));
    }
    let samples = (0..n_orbits)
        .into_par_iter()
        .map(|i| {
            let mut rng = orbit_rng(seed, i as u64);
            let mut logs = vec![0.0; orbit_len];
            random_digits(&mut rng, orbit_len, |j, k| logs[j] = k.ln())?;
            Ok(pairwise_sum(&logs) / orbit_len as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(StatsRecord::from_samples(samples, seed))
}

/// Birkhoff average of log tau along the exact periodic orbit of `word`, over `orbit_len` steps.
pub fn birkhoff_log_tau_periodic(word: &CfWord, orbit_len: usize) -> Result<f64> {
    let d = periodic_digits(word, orbit_len)?;
    let logs: Vec<f64> = d.iter().map(|&k| (k as f64).ln()).collect();
    Ok(pairwise_sum(&logs) / orbit_len as f64)
}

fn periodic_digits(word: &CfWord, len: usize) -> Result<Vec<u64>> {
    if !word.is_periodic() || word.is_empty() {
        return Err(invalid("expected a non-empty periodic word"));
    }
    if len == 0 {
        return Err(invalid("orbit length must be >= 1"));
    }
    Ok(word.digits().iter().copied().cycle().take(len).collect())
}

/// S_n/n statistics at geometric checkpoints 10^2, 10^3, ... <= n_passages.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnGrowth {
    pub seed: u64,
    pub n: usize,
    pub checkpoints: Vec<usize>,
    pub medians: Vec<f64>,
    /// medians strictly increase across checkpoints
    pub increasing: bool,
}

fn checkpoints(n_passages: usize) -> Vec<usize> {
    std::iter::successors(Some(100usize), |c| c.checked_mul(10)).take_while(|&c| c <= n_passages).collect()
}

/// S_n = k_1 + ... + k_n, the number of Farey iterates spent in the first n passages.
pub fn sn_growth(seed: u64, n_orbits: usize, n_passages: usize) -> Result<SnGrowth> {
    check_orbits(n_orbits)?;
    if n_passages < 100 {
        return Err(invalid(format!("n_passages = {n_passages} < 100")));
    }
    let cps = checkpoints(n_passages);
    let last = *cps.last().expect("at least one checkpoint");
    let per_orbit = (0..n_orbits)
        .into_par_iter()
        .map(|i| {
            let mut rng = orbit_rng(seed, i as u64);
            let mut partial = vec![0.0; last];
            random_digits(&mut rng, last, |j, k| partial[j] = k)?;
            let mut out = Vec::with_capacity(cps.len());
            let mut s = 0.0;
            let mut c = 0;
            for (j, k) in partial.iter().enumerate() {
                s += k;
                if j + 1 == cps[c] {
                    out.push(s / cps[c] as f64);
                    c += 1;
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let medians: Vec<f64> = (0..cps.len())
        .map(|c| {
            let mut col: Vec<f64> = per_orbit.iter().map(|o| o[c]).collect();
            col.sort_by(|a, b| a.total_cmp(b));
            let m = col.len();
            if m % 2 == 1 {
                col[m / 2]
            } else {
                0.5 * (col[m / 2 - 1] + col[m / 2])
            }
        })
        .collect();
    let increasing = medians.windows(2).all(|w| w[1] > w[0]);
    Ok(SnGrowth { seed, n: n_orbits, checkpoints: cps, medians, increasing })
}

/// S_n/n along the exact periodic orbit of `word`.
pub fn sn_growth_periodic(word: &CfWord, n_passages: usize) -> Result<f64> {
    let d = periodic_digits(word, n_passages)?;
    Ok(d.iter().map(|&k| k as f64).sum::<f64>() / n_passages as f64)
}

/// Value of K with the tail estimate, handy as a Monte Carlo reference.
pub fn khinchin_log_constant(kmax: u64) -> Result<f64> {
    Ok(to_f64(khinchin_constant::<f64>(kmax)?.k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn densities() {
        assert!((density_e(1.0_f64).unwrap() - 1.0 / 2f64.ln()).abs() < 1e-15);
        assert!((density_e(0.5_f64).unwrap() - 2.0 / 2f64.ln()).abs() < 1e-15);
        assert!(density_e(0.0_f64).is_err());
        assert!((density_h(0.0_f64).unwrap() - 1.0 / 2f64.ln()).abs() < 1e-15);
        assert!((density_h(1.0_f64).unwrap() - 0.5 / 2f64.ln()).abs() < 1e-15);
        assert!((density_h_primitive(1.0_f64).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kaluza() {
        let k = KaluzaSequence::<f64>::new(10_000);
        assert_eq!(k.q[0], 1.0);
        assert!(k.is_strictly_decreasing());
        assert!(k.is_strict_kaluza());
    }

    #[test]
    fn indicator_average() {
        let s = khinchin_average(|k| if k == 1 { 1.0_f64 } else { 0.0 }, 1000, TailEnvelope::Bounded(0.0)).unwrap();
        assert!((s.value - (4.0_f64 / 3.0).ln() / 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn small_kmax_rejected() {
        assert!(khinchin_average(|_| 1.0_f64, 10, TailEnvelope::Bounded(1.0)).is_err());
        assert!(khinchin_constant::<f64>(10).is_err());
    }

    #[test]
    fn non_finite_rejected() {
        assert!(khinchin_average(|k| if k == 7 { f64::NAN } else { 1.0 }, 1000, TailEnvelope::Bounded(1.0)).is_err());
    }

    #[test]
    fn checkpoint_grid() {
        assert_eq!(checkpoints(10_000), vec![100, 1000, 10_000]);
        assert_eq!(checkpoints(5000), vec![100, 1000]);
    }

    #[test]
    fn periodic_orbits() {
        let w1 = CfWord::periodic(vec![1]).unwrap();
        let w3 = CfWord::periodic(vec![3]).unwrap();
        assert_eq!(birkhoff_log_tau_periodic(&w1, 10_000).unwrap(), 0.0);
        assert_eq!(sn_growth_periodic(&w1, 1000).unwrap(), 1.0);
        assert_eq!(sn_growth_periodic(&w3, 1000).unwrap(), 3.0);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let a = birkhoff_log_tau(7, 4, 1000).unwrap();
        let b = birkhoff_log_tau(7, 4, 1000).unwrap();
        assert_eq!(a, b);
        let c = birkhoff_log_tau(8, 4, 1000).unwrap();
        assert_ne!(a.mean, c.mean);
    }
}
