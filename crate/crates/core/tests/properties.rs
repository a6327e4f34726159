use farey_gauss::cf_dynamics::{
    cf_expand, cf_expand_exact, farey_map, farey_map_exact, first_passage_time, gauss_map, gauss_map_exact,
    inverse_branch_farey_exact, inverse_branch_gauss, periodic_cf_value, psi0_iterate, CfWord, Rational,
};
use farey_gauss::measures_ergodic::{digit_probability, KaluzaSequence};
use farey_gauss::specfun_quadrature::lerch_phi;
use farey_gauss::transfer_ops::apply_p;
use farey_gauss::zeta::{PowerSeries, Var};
use num_bigint::BigInt;
use num_complex::Complex64;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (2i64..1_000_000_000_000).prop_flat_map(|q| (1..q).prop_map(move |p| Rational::new(BigInt::from(p), BigInt::from(q))))
}

fn digits_of(x: &Rational) -> Vec<u64> {
    if *x == Rational::zero() {
        Vec::new()
    } else {
        cf_expand_exact(x).unwrap().digits().to_vec()
    }
}

proptest! {
    #[test]
    fn gauss_map_drops_first_digit(x in rational()) {
        let d = digits_of(&x);
        prop_assert_eq!(digits_of(&gauss_map_exact(&x).unwrap()), d[1..].to_vec());
    }

    #[test]
    fn farey_map_decrements_first_digit(x in rational()) {
        let mut d = digits_of(&x);
        if d[0] > 1 {
            d[0] -= 1;
        } else {
            d.remove(0);
        }
        prop_assert_eq!(digits_of(&farey_map_exact(&x).unwrap()), d);
    }

    #[test]
    fn farey_branches_invert_the_map(x in rational(), b in 0u8..2) {
        let y = inverse_branch_farey_exact(b, &x).unwrap();
        prop_assert_eq!(farey_map_exact(&y).unwrap(), x);
    }

    #[test]
    fn gauss_is_farey_at_first_passage(x in 1e-6f64..1.0) {
        let n = first_passage_time(x).unwrap();
        prop_assume!(n < 1000);
        let mut y = x;
        for _ in 0..n {
            y = farey_map(y).unwrap();
        }
        prop_assert!((y - gauss_map(x).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn gauss_branches_invert(k in 1u64..10_000, x in 0.0f64..1.0) {
        let y = inverse_branch_gauss(k, x).unwrap();
        prop_assert_eq!(first_passage_time(y).unwrap(), k);
        prop_assert!((gauss_map(y).unwrap() - x).abs() < 1e-12 * (k as f64).powi(2).max(1.0));
    }

    #[test]
    fn psi0_is_conjugate_translation(n in 0u64..1000, x in 1e-6f64..1.0) {
        let direct = 1.0 / (1.0 / x + n as f64);
        prop_assert!((psi0_iterate(n, x).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn periodic_value_round_trip(word in prop::collection::vec(1u64..=5, 1..=4)) {
        let orbit = periodic_cf_value::<f64>(&CfWord::periodic(word.clone()).unwrap()).unwrap();
        let n = (2 * word.len()).min(8);
        let expanded = cf_expand(orbit.value, n).unwrap();
        let cyclic: Vec<u64> = word.iter().copied().cycle().take(n).collect();
        prop_assert_eq!(expanded.digits(), cyclic.as_slice());
    }

    #[test]
    fn odd_polynomials_about_half_are_killed_by_p(c in prop::collection::vec(-10.0f64..10.0, 1..5), x in 0.01f64..=1.0) {
        let f = |y: f64| c.iter().enumerate().map(|(j, cj)| cj * (y - 0.5).powi(2 * j as i32 + 1)).sum::<f64>();
        prop_assert!(apply_p(f, x).unwrap().abs() < 1e-12);
    }

    #[test]
    fn lerch_shift_recurrence(zr in -1.0f64..1.0, a in 1.5f64..4.0, b in 0.2f64..5.0) {
        let z = Complex64::new(zr, 0.0);
        let b = Complex64::new(b, 0.0);
        let lhs = lerch_phi(z, a, b).unwrap().value;
        let rhs = b.powf(-a) + z * lerch_phi(z, a, b + 1.0).unwrap().value;
        prop_assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0));
    }

    #[test]
    fn series_log_inverts_exp(c in prop::collection::vec(-1.0f64..1.0, 1..8)) {
        let mut coeffs = vec![0.0];
        coeffs.extend(c);
        let order = coeffs.len() - 1;
        let p = PowerSeries::new(coeffs, order, Var::S);
        let back = p.exp().unwrap().log().unwrap();
        for n in 0..=order {
            prop_assert!((back.coeff(n) - p.coeff(n)).abs() < 1e-12);
        }
    }

    #[test]
    fn series_exp_is_multiplicative(a in prop::collection::vec(-1.0f64..1.0, 6), b in prop::collection::vec(-1.0f64..1.0, 6)) {
        let lift = |v: &[f64]| {
            let mut c = vec![0.0];
            c.extend_from_slice(v);
            PowerSeries::new(c, 6, Var::Z)
        };
        let (pa, pb) = (lift(&a), lift(&b));
        let lhs = pa.add(&pb).unwrap().exp().unwrap();
        let rhs = pa.exp().unwrap().mul(&pb.exp().unwrap()).unwrap();
        for n in 0..=6 {
            prop_assert!((lhs.coeff(n) - rhs.coeff(n)).abs() < 1e-12);
        }
    }
}

#[test]
fn cylinder_masses_telescope() {
    // sum_{k>=n} nu(tau = k) = log2(1 + 1/n), the mass of (0, 1/n]
    for n in 1..=50u64 {
        let big = 100_000u64;
        let head: f64 = (n..=big).map(digit_probability::<f64>).sum();
        let tail = ((big + 2) as f64 / (big + 1) as f64).log2();
        assert!((head + tail - (1.0 + 1.0 / n as f64).log2()).abs() < 1e-12, "n = {n}");
    }
}

#[test]
fn kaluza_up_to_ten_thousand() {
    let k = KaluzaSequence::<f64>::new(10_000);
    assert!(k.is_strict_kaluza());
}
