use farey_gauss::specfun_quadrature::{build_rule, MeasureKind, QuadratureRule};
use farey_gauss::transfer_ops::build_kzq;
use farey_gauss::zeta::*;
use num_complex::Complex;

fn c(x: f64) -> Complex<f64> {
    Complex::new(x, 0.0)
}

fn rule60() -> QuadratureRule<f64> {
    build_rule(MeasureKind::M, 60).unwrap()
}

const GOLDEN: f64 = 0.6180339887498949;

#[test]
fn partition_z_f_examples() {
    let z1 = partition_z_f::<f64>(1, PartitionMethod::Brute).unwrap();
    assert!((z1 - (1.0 + GOLDEN * GOLDEN)).abs() < 1e-14);
    // words 01 and 10 sit on the orbit of [(2)], word 11 on [(1)] counted twice around
    let x2 = 2f64.sqrt() - 1.0;
    let z2 = partition_z_f::<f64>(2, PartitionMethod::Brute).unwrap();
    assert!((z2 - (1.0 + 2.0 * x2 * x2 + GOLDEN.powi(4))).abs() < 1e-14);
    for n in 1..=10 {
        let a = partition_z_f::<f64>(n, PartitionMethod::Brute).unwrap();
        let b = partition_z_f::<f64>(n, PartitionMethod::Symbolic).unwrap();
        assert!((a - b).abs() < 1e-12, "n = {n}: {a} vs {b}");
    }
    assert!(partition_z_f::<f64>(0, PartitionMethod::Brute).is_err());
    assert!(partition_z_f::<f64>(13, PartitionMethod::Symbolic).is_err());
}

#[test]
fn single_tuple_weights() {
    assert!((grand_xi(1, c(1.0), 1, XiRoute::Direct).unwrap().value.re - GOLDEN * GOLDEN).abs() < 1e-15);
    let x2 = 2f64.sqrt() - 1.0;
    let two = grand_xi(1, c(1.0), 2, XiRoute::Direct).unwrap().value.re;
    assert!((two - GOLDEN * GOLDEN - x2 * x2).abs() < 1e-15);
}

#[test]
fn trace_closed_form_terms() {
    let t = trace_kzq(c(1.0), 0, 1).unwrap();
    assert!((t.value.re - 0.2763932022500210).abs() < 1e-15);
    assert_eq!(trace_kzq(c(0.0), 0, 100).unwrap().value, c(0.0));
    assert_eq!(trace_power(3, c(0.0), 1, 100).unwrap().value, c(0.0));
    assert!(trace_kzq(c(1.2), 0, 10).is_err());
    // x^2/(1+x^2) + x^4/(1+x^2) = x^2 term by term
    for k in 1..=1000u64 {
        let x2 = gauss_fixed_point::<f64>(k).powi(2);
        assert!((x2 / (1.0 + x2) + x2 * x2 / (1.0 + x2) - x2).abs() <= 1e-15 * x2.max(1e-300) + 1e-300);
    }
}

#[test]
fn traces_match_matrix_route() {
    let rule = rule60();
    for q in 0..=1 {
        let op = build_kzq(c(0.5), q, &rule).unwrap();
        let t = trace_kzq(c(0.5), q, 200).unwrap();
        assert!((t.value - op.trace()).norm() < 1e-8);
        let m = matrix_traces(&op, 2);
        let t2 = trace_power(2, c(0.5), q, 200).unwrap();
        assert!((t2.value - m[1]).norm() < 1e-7);
    }
    let l1 = trace_power(1, c(0.4), 1, 300).unwrap();
    assert_eq!(l1, trace_kzq(c(0.4), 1, 300).unwrap());
}

#[test]
fn xi_routes_agree() {
    for z in [0.3, 0.7, 1.0] {
        for l in 1..=3 {
            let kmax = if l == 3 { 120 } else { 1000 };
            let a = grand_xi(l, c(z), kmax, XiRoute::Trace).unwrap();
            let b = grand_xi(l, c(z), kmax, XiRoute::Direct).unwrap();
            assert!((a.value - b.value).norm() <= a.tail_bound + b.tail_bound + 1e-14);
            assert!((a.value - b.value).norm() < 1e-10 * a.value.norm());
        }
    }
    let closed = xi1_closed(c(0.5), 200);
    assert!((grand_xi(1, c(0.5), 200, XiRoute::Trace).unwrap().value - closed).norm() < 1e-10);
    assert_eq!(grand_xi(1, c(0.0), 50, XiRoute::Direct).unwrap().value, c(0.0));
}

#[test]
fn xi_at_one_is_partition_function() {
    let xi = grand_xi(2, c(1.0), 400, XiRoute::Trace).unwrap();
    let zg = partition_z_g::<f64>(2, 400).unwrap();
    assert!((xi.value - zg.value).norm() <= xi.tail_bound + zg.tail_bound);
}

#[test]
fn tails_shrink_with_kmax() {
    let mut last = f64::INFINITY;
    for kmax in [20, 40, 80, 160] {
        let t = TraceTable::build(c(0.9), 3, kmax).unwrap();
        let tail = t.get(3, 0).unwrap().tail;
        assert!(t.entries.iter().all(|e| e.tail >= 0.0));
        assert!(tail < last);
        last = tail;
    }
}

#[test]
fn trace_table_csv() {
    let t = TraceTable::build(c(0.5), 2, 50).unwrap();
    let csv = t.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("l,q,z,value,tail"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "1");
    assert_eq!(row[2], "5.0000000000000000e-1");
    let v: f64 = row[3].parse().unwrap();
    assert_eq!(v, t.entries[0].value.re);
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn zeta_f_and_two_variable_series() {
    let zf = zeta_f_series::<f64>(7, PartitionMethod::Brute).unwrap();
    assert_eq!(zf.coeff(0), 1.0);
    assert!((zf.coeff(1) - (1.0 + GOLDEN * GOLDEN)).abs() < 1e-14);
    let lhs = PowerSeries::new(vec![1.0, -1.0], 7, Var::Z).mul(&zf).unwrap();
    let rhs = zeta2_at_one_z_series::<f64>(7).unwrap();
    for n in 0..=6 {
        assert!((lhs.coeff(n) - rhs.coeff(n)).abs() <= 1e-4 * rhs.coeff(n).abs());
    }
    // sum z^n Z_n(F)/n = log 1/(1-z) + sum Xi_l(z)/l
    let lf = zf.log().unwrap();
    for n in 1..=6 {
        let xi: f64 = (1..=n).map(|l| xi_z_series::<f64>(l, 6).unwrap().coeff(n) / l as f64).sum();
        assert!((lf.coeff(n) - (1.0 / n as f64 + xi)).abs() < 1e-12);
    }
}

#[test]
fn determinant_routes_agree() {
    assert_eq!(fredholm_det(c(0.0), c(0.5), 0, DetRoute::Series { lmax: 4, kmax: 50 }, None).unwrap().value, c(1.0));
    let rule = rule60();
    for s in [0.1, 0.3, 0.5] {
        for z in [0.1, 0.3, 0.5] {
            let a = fredholm_det(c(s), c(z), 0, DetRoute::Series { lmax: 9, kmax: 200 }, None).unwrap();
            let b = fredholm_det(c(s), c(z), 0, DetRoute::Matrix { n: 60 }, Some(&rule)).unwrap();
            assert!((a.value - b.value).norm() < 1e-8, "s {s} z {z}");
        }
    }
    let d = fredholm_det(c(1.0), c(1.0), 0, DetRoute::Matrix { n: 60 }, Some(&rule)).unwrap();
    assert!(d.value.norm() < 1e-6);
    let e = fredholm_det(c(5.0), c(1.0), 0, DetRoute::Series { lmax: 4, kmax: 100 }, None).unwrap_err();
    assert!(matches!(e, farey_gauss::Error::SeriesDivergent(_)));
}

#[test]
fn zeta2_properties() {
    let rule = rule60();
    let r = DetRoute::Matrix { n: 60 };
    assert!((zeta2(c(0.7), c(0.0), r, Some(&rule)).unwrap() - 1.0).norm() < 1e-15);
    for s in [-0.8, 0.2, 0.6] {
        assert!(zeta2(c(s), c(1.0), r, Some(&rule)).unwrap().im.abs() < 1e-12);
    }
    assert!(matches!(zeta2(c(1.0), c(1.0), r, Some(&rule)), Err(farey_gauss::Error::PoleProximity(_))));
    let lz = log_zeta2_s_series(c(1.0), 3, &rule).unwrap();
    for l in 1..=3 {
        let zg = partition_z_g::<f64>(l, 200).unwrap();
        assert!((lz.coeff(l) - zg.value / l as f64).norm() <= zg.tail_bound / l as f64);
    }
    let series = zeta2_s_series(c(0.5), 6, &rule).unwrap();
    let direct = zeta2(c(0.1), c(0.5), r, Some(&rule)).unwrap();
    let summed: Complex<f64> = (0..=6).map(|n| series.coeff(n) * 0.1f64.powi(n as i32)).sum();
    assert!((summed - direct).norm() < 1e-8);
}

#[test]
fn poles() {
    let rule = rule60();
    let p = pole_locate(1.0, (0.9, 1.1), &rule).unwrap();
    assert!((p.s - 1.0).abs() < 1e-6);
    let q = pole_locate(1.0, (-3.4, -3.2), &rule).unwrap();
    assert!((q.s * -0.3036630029 - 1.0).abs() < 1e-8);
    assert!(matches!(pole_locate(0.0, (0.5, 2.0), &rule), Err(farey_gauss::Error::NoSignChange(..))));
    assert!(pole_locate(1.5, (0.5, 2.0), &rule).unwrap_err().is_validation());
}
