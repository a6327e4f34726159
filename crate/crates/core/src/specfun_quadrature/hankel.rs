use rayon::prelude::*;

use super::bessel::bessel_kernel;
use super::rules::{MeasureKind, QuadratureRule};
use crate::error::{invalid, Result};
use crate::scalar::{lit, Real};

/// Fraction of trailing nodes inspected by the decay check.
const DECAY_WINDOW: usize = 10;

/// Order-1 Hankel transform t -> int J_1(2 sqrt(st)) sqrt(t/s) psi(s) ds, with psi sampled on a Lebesgue rule.
///
/// Targets beyond `rule.hankel_resolved_limit()` are rejected: the oscillation of the kernel is not
/// resolved there. Inputs that have not decayed over the last tenth of the nodes are rejected too.
pub fn hankel_transform<T: Real>(samples: &[T], rule: &QuadratureRule<T>, targets: &[T]) -> Result<Vec<T>> {
    if rule.measure() != MeasureKind::Lebesgue {
        return Err(invalid("hankel_transform needs a rule over Lebesgue measure"));
    }
    if samples.len() != rule.order() {
        return Err(invalid(format!("{} samples for a rule of order {}", samples.len(), rule.order())));
    }
    let limit = rule.hankel_resolved_limit();
    if let Some(t) = targets.iter().find(|&&t| !(t >= T::zero() && t <= limit)) {
        return Err(invalid(format!("target {t} outside the resolved range [0, {limit}]")));
    }
    let peak = samples.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if peak == T::zero() {
        return Ok(vec![T::zero(); targets.len()]);
    }
    let n = samples.len();
    let window = n.div_ceil(DECAY_WINDOW);
    let tail = samples[n - window..].iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if tail > peak * lit(1e-6) || samples.iter().any(|v| !v.is_finite()) {
        return Err(invalid("input does not decay across the rule; conditionally convergent transforms are not supported"));
    }
    let nodes = rule.nodes();
    let weights = rule.weights();
    Ok(targets
        .par_iter()
        .map(|&t| {
            let mut acc = T::zero();
            for j in 0..n {
                if samples[j] != T::zero() {
                    acc += weights[j] * bessel_kernel(nodes[j], t, 0) * samples[j];
                }
            }
            acc * t
        })
        .collect())
}

/// Samples `psi` on the rule nodes and transforms.
pub fn hankel_transform_fn<T: Real>(psi: impl Fn(T) -> T, rule: &QuadratureRule<T>, targets: &[T]) -> Result<Vec<T>> {
    let samples: Vec<T> = rule.nodes().iter().map(|&s| psi(s)).collect();
    hankel_transform(&samples, rule, targets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun_quadrature::lebesgue_rule;

    #[test]
    fn zero_maps_to_zero() {
        let r = lebesgue_rule::<f64>(20, 1.0).unwrap();
        let out = hankel_transform(&vec![0.0; 20], &r, &[0.5, 3.0]).unwrap();
        assert_eq!(out, vec![0.0, 0.0]);
    }

    #[test]
    fn flags_non_decaying_input() {
        let r = lebesgue_rule::<f64>(20, 1.0).unwrap();
        assert!(hankel_transform_fn(|_| 1.0, &r, &[1.0]).is_err());
    }

    #[test]
    fn rejects_unresolved_target() {
        let r = lebesgue_rule::<f64>(20, 1.0).unwrap();
        assert!(hankel_transform_fn(|s: f64| (-s).exp(), &r, &[41.0]).is_err());
    }
}
