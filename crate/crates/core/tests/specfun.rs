use farey_gauss::specfun_quadrature::{bessel_j, bessel_kernel, build_rule, lebesgue_rule, MeasureKind};
use farey_gauss::transfer_ops::{build_kzq, build_t, build_t_tilde, eigenvalues, spectrum};
use num_bigint::BigInt;
use num_complex::{Complex, Complex32};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

// zeta(2), ..., zeta(8)
const ZETA: [f64; 7] = [
    1.6449340668482264,
    1.2020569031595943,
    1.0823232337111382,
    1.0369277551433699,
    1.0173430619844491,
    1.0083492773819228,
    1.0040773561979443,
];

#[test]
fn m_rule_moments() {
    for n in [40, 60, 100] {
        let r = build_rule::<f64>(MeasureKind::M, n).unwrap();
        let mut fact = 1.0;
        for k in 0..=6 {
            fact *= (k + 1) as f64;
            let exact = fact * ZETA[k];
            let got = r.integrate(|t| t.powi(k as i32));
            assert!((got - exact).abs() < 1e-9 * exact, "N {n} k {k}: {got} vs {exact}");
        }
    }
}

#[test]
fn laplace_bessel_identity() {
    for k in [1.0f64, 2.0, 3.0] {
        let r = lebesgue_rule(200, k).unwrap();
        for p in [1u32, 3] {
            let got = r.integrate(|t| (-k * t).exp() * bessel_j(p, 2.0 * t));
            let root = (k * k + 4.0).sqrt();
            let exact = (root - k).powi(p as i32) / (2f64.powi(p as i32) * root);
            assert!((got - exact).abs() < 1e-8, "k {k} p {p}: {got} vs {exact}");
        }
    }
}

/// sum_j (-u)^j / (j! (j+1)!) in exact arithmetic, the q = 0 kernel.
fn kernel_exact(u: f64) -> f64 {
    let u = BigRational::from_float(u).unwrap();
    let mut term = BigRational::one();
    let mut sum = BigRational::zero();
    for j in 0..200u64 {
        sum += &term;
        term = -term * &u / BigRational::from_integer(BigInt::from((j + 1) * (j + 2)));
    }
    sum.to_f64().unwrap()
}

#[test]
fn kernel_matches_exact_series() {
    for u in [0.0, 0.25, 1.5, 7.75, 20.0, 29.5, 30.5, 55.0, 80.25, 100.0] {
        let got = bessel_kernel(u, 1.0, 0);
        let exact = kernel_exact(u);
        assert!((got - exact).abs() < 1e-12, "st = {u}: {got} vs {exact}");
        assert_eq!(bessel_kernel(u / 4.0, 4.0, 0), got);
    }
}

#[test]
fn symmetric_frame_at_z_one() {
    let rule = build_rule::<f64>(MeasureKind::M, 60).unwrap();
    let op = build_kzq(Complex::new(1.0, 0.0), 0, &rule).unwrap();
    assert!(op.asymmetry().unwrap() < 1e-12);
    let s = spectrum(&op).unwrap();
    assert!(s.eigenvalues.iter().all(|l| l.im == 0.0));
    let a = eigenvalues(&op).unwrap();
    let b = eigenvalues(&build_kzq(Complex::new(1.0, 0.0), 0, &build_rule(MeasureKind::M, 80).unwrap()).unwrap()).unwrap();
    assert!((a[0] - b[0]).norm() < 1e-7 && (a[1] - b[1]).norm() < 1e-7);
}

#[test]
fn prellberg_frame_cross_check() {
    let t = eigenvalues(&build_t(&build_rule::<f64>(MeasureKind::M, 60).unwrap()).unwrap()).unwrap();
    let tt = eigenvalues(&build_t_tilde(&build_rule::<f64>(MeasureKind::MTilde, 60).unwrap()).unwrap()).unwrap();
    for k in 0..4 {
        assert!((t[k] - tt[k]).norm() < 1e-6);
    }
}

#[test]
fn single_precision_spectrum() {
    let rule = build_rule::<f32>(MeasureKind::M, 30).unwrap();
    let op = build_kzq(Complex32::new(1.0, 0.0), 0, &rule).unwrap();
    let s = spectrum(&op).unwrap();
    assert!((s.eigenvalues[0].re - 1.0).abs() < 1e-4);
    assert!((s.eigenvalues[1].re + 0.303663).abs() < 1e-3);
    assert!(s.residuals.iter().take(3).all(|&r| r < 1e-4), "{:?}", &s.residuals[..3]);
}
