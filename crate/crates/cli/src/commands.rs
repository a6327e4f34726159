use std::fmt::Write as _;
use std::process::ExitCode;

use farey_gauss::cf_dynamics::{farey_level, periodic_cf_value, CfWord, MAX_FAREY_LEVEL};
use farey_gauss::measures_ergodic::{
    birkhoff_log_tau, birkhoff_log_tau_periodic, khinchin_average, khinchin_constant, TailEnvelope,
};
use farey_gauss::specfun_quadrature::{build_rule, MeasureKind};
use farey_gauss::transfer_ops::{
    apply_p, apply_qz, build_kzq, conjecture_scan, spectrum as op_spectrum, verify_identity_first,
    verify_identity_second, ResidualReport,
};
use farey_gauss::zeta::{
    fredholm_det, pole_locate, zeta2, zeta2_s_series, DetRoute, DetValue, PoleLocation, TraceTable,
};
use farey_gauss::{Error, C64};
use num_complex::Complex64;
use serde::Serialize;

use crate::report::{emit, key_value_csv, sci, CliError, CliResult, Output};
use crate::{FareyArgs, KhinchinArgs, OrbitArgs, ScanArgs, SpectrumArgs, TraceArgs, VerifyArgs, ZetaArgs};

fn cstr(c: C64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else {
        format!("{}{:+}i", c.re, c.im)
    }
}

fn rule(n: usize) -> CliResult<farey_gauss::Rule> {
    Ok(build_rule(MeasureKind::M, n)?)
}

pub fn spectrum(a: &SpectrumArgs, out: &Output) -> CliResult<ExitCode> {
    let r = rule(a.n)?;
    let op = build_kzq(a.z, a.q, &r)?;
    if let Some(p) = &a.matrix_out {
        op.write_binary(std::io::BufWriter::new(std::fs::File::create(p)?))?;
    }
    let s = op_spectrum(&op)?;
    let mut summary = String::new();
    for (i, l) in s.eigenvalues.iter().take(5).enumerate() {
        let _ = writeln!(summary, "lambda_{i} = {}", cstr(*l));
    }
    let csv = || {
        let mut c = String::from("index,re,im,residual\n");
        for (i, (l, r)) in s.eigenvalues.iter().zip(&s.residuals).enumerate() {
            let _ = writeln!(c, "{i},{},{},{}", sci(l.re), sci(l.im), sci(*r));
        }
        c
    };
    emit(out, "spectrum", a, &s, csv, &summary)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct ZetaReport {
    zeta2: Option<C64>,
    pole_proximity: Option<f64>,
    det_q0: DetValue<f64>,
    det_q1: DetValue<f64>,
    det_series_q0: Option<DetValue<f64>>,
    series_note: Option<String>,
    /// coefficients of zeta_2(s, z) in s
    s_series: Vec<C64>,
    pole: Option<PoleLocation<f64>>,
}

pub fn zeta(a: &ZetaArgs, out: &Output) -> CliResult<ExitCode> {
    let r = rule(a.n)?;
    let route = DetRoute::Matrix { n: a.n };
    let det_q0 = fredholm_det(a.s, a.z, 0, route, Some(&r))?;
    let det_q1 = fredholm_det(a.s, a.z, 1, route, Some(&r))?;
    let (zeta2_value, pole_proximity) = match zeta2(a.s, a.z, route, Some(&r)) {
        Ok(v) => (Some(v), None),
        Err(Error::PoleProximity(d)) => (None, Some(d)),
        Err(e) => return Err(e.into()),
    };
    let (det_series_q0, series_note) = if a.z.norm() <= 1.0 {
        match fredholm_det(a.s, a.z, 0, DetRoute::Series { lmax: a.lmax, kmax: a.kmax }, None) {
            Ok(v) => (Some(v), None),
            Err(e @ Error::SeriesDivergent(_)) => (None, Some(e.to_string())),
            Err(e) => return Err(e.into()),
        }
    } else {
        (None, Some("trace series needs |z| <= 1".into()))
    };
    let s_series = zeta2_s_series(a.z, a.lmax, &r)?.coeffs().to_vec();
    let pole = match a.bracket {
        Some(b) => {
            if a.z.im != 0.0 {
                return Err(CliError::Usage("--bracket needs a real z".into()));
            }
            Some(pole_locate(a.z.re, b, &r)?)
        }
        None => None,
    };
    let mut summary = String::new();
    match zeta2_value {
        Some(v) => {
            let _ = writeln!(summary, "zeta2({}, {}) = {}", cstr(a.s), cstr(a.z), cstr(v));
        }
        None => {
            let _ = writeln!(summary, "zeta2({}, {}): pole (|det| = {:e})", cstr(a.s), cstr(a.z), pole_proximity.unwrap_or(0.0));
        }
    }
    if let Some(p) = &pole {
        let _ = writeln!(summary, "zero of det(1 - s K) at s = {}", p.s);
    }
    let rep = ZetaReport { zeta2: zeta2_value, pole_proximity, det_q0, det_q1, det_series_q0, series_note, s_series, pole };
    let csv = || {
        let mut rows = vec![
            ("det_q0_re", sci(rep.det_q0.value.re)),
            ("det_q0_im", sci(rep.det_q0.value.im)),
            ("det_q1_re", sci(rep.det_q1.value.re)),
            ("det_q1_im", sci(rep.det_q1.value.im)),
        ];
        if let Some(v) = rep.zeta2 {
            rows.push(("zeta2_re", sci(v.re)));
            rows.push(("zeta2_im", sci(v.im)));
        }
        if let Some(p) = &rep.pole {
            rows.push(("pole_s", sci(p.s)));
        }
        key_value_csv(&rows)
    };
    emit(out, "zeta", a, &rep, csv, &summary)?;
    Ok(ExitCode::SUCCESS)
}

pub fn trace(a: &TraceArgs, out: &Output) -> CliResult<ExitCode> {
    let t = TraceTable::build(a.z, a.lmax, a.kmax)?;
    let mut summary = String::new();
    for e in &t.entries {
        let _ = writeln!(summary, "tr K^{} (q={}) = {} (tail {:.2e})", e.l, e.q, cstr(e.value), e.tail);
    }
    emit(out, "trace", a, &t, || t.to_csv(), &summary)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct VerifyReport {
    checks: Vec<Check>,
    passed: bool,
}

#[derive(Serialize)]
struct Check {
    function: &'static str,
    #[serde(flatten)]
    report: ResidualReport<f64>,
}

fn density_report(name: &str, z: C64, nmax: usize, grid_len: usize, worst: f64, budget: f64) -> ResidualReport<f64> {
    ResidualReport { name: name.into(), z, nmax, grid_len, max_residual: worst, tail_budget: budget, passed: worst <= budget + 1e-10 }
}

fn gauss_density(x: f64) -> f64 {
    1.0 / ((1.0 + x) * std::f64::consts::LN_2)
}

/// P e = e for e(x) = 1/x, and Q h = h for the Gauss density with the series tail as budget.
fn density_checks(nmax: usize) -> CliResult<Vec<Check>> {
    let grid: Vec<f64> = (1..=100).map(|i| i as f64 / 100.0).collect();
    let mut p_worst = 0.0f64;
    let mut q_worst = 0.0f64;
    let mut q_budget = 0.0f64;
    let one = Complex64::new(1.0, 0.0);
    for &x in &grid {
        p_worst = p_worst.max((apply_p(|w: f64| 1.0 / w, x)? - 1.0 / x).abs());
        let v = apply_qz(|u: Complex64| (u + 1.0).inv() / std::f64::consts::LN_2, Complex64::new(x, 0.0), one, nmax)?;
        q_worst = q_worst.max((v.value - gauss_density(x)).norm());
        q_budget = q_budget.max(v.tail_bound);
    }
    Ok(vec![
        Check { function: "e", report: density_report("P e = e", one, nmax, grid.len(), p_worst, 0.0) },
        Check { function: "h", report: density_report("Q h = h", one, nmax, grid.len(), q_worst, q_budget) },
    ])
}

pub fn verify(a: &VerifyArgs, out: &Output) -> CliResult<ExitCode> {
    if a.nmax == 0 {
        return Err(CliError::Usage("--nmax must be positive".into()));
    }
    let grid: Vec<f64> = (1..=50).map(|i| i as f64 / 50.0).collect();
    let fs: [(&'static str, fn(f64) -> f64); 3] = [
        ("1/(1+w)", |w| 1.0 / (1.0 + w)),
        ("exp(-w)", |w| (-w).exp()),
        ("h", gauss_density),
    ];
    let mut checks = Vec::new();
    for (name, f) in fs {
        checks.push(Check { function: name, report: verify_identity_first(a.z, f, &grid, a.nmax)? });
        checks.push(Check { function: name, report: verify_identity_second(a.z, f, &grid, a.nmax)? });
    }
    if a.z == Complex64::new(1.0, 0.0) {
        checks.extend(density_checks(a.nmax)?);
    }
    let passed = checks.iter().all(|c| c.report.passed);
    let mut summary = String::new();
    for c in &checks {
        let _ = writeln!(
            summary,
            "{:<8} {:<10} residual {:.3e} budget {:.3e} {}",
            c.report.name,
            c.function,
            c.report.max_residual,
            c.report.tail_budget,
            if c.report.passed { "ok" } else { "FAIL" }
        );
    }
    let rep = VerifyReport { checks, passed };
    let csv = || {
        let mut s = String::from("name,function,max_residual,tail_budget,passed\n");
        for c in &rep.checks {
            let _ = writeln!(s, "{},{},{},{},{}", c.report.name, c.function, sci(c.report.max_residual), sci(c.report.tail_budget), c.report.passed);
        }
        s
    };
    emit(out, "verify", a, &rep, csv, &summary)?;
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

#[derive(Serialize)]
struct KhinchinReport {
    /// log of Khinchin's constant
    k: f64,
    exp_k: f64,
    tail_estimate: f64,
    tail_bound: f64,
    product_route: f64,
    weighted_sum_route: f64,
    monte_carlo: Option<farey_gauss::measures_ergodic::StatsRecord>,
}

pub fn khinchin(a: &KhinchinArgs, out: &Output) -> CliResult<ExitCode> {
    let c = khinchin_constant::<f64>(a.kmax)?;
    let w = khinchin_average(|k| (k as f64).ln(), a.kmax, TailEnvelope::Log)?;
    let monte_carlo = if a.orbits > 0 { Some(birkhoff_log_tau(a.seed, a.orbits, a.steps)?) } else { None };
    let rep = KhinchinReport {
        k: c.k,
        exp_k: c.exp_k,
        tail_estimate: c.tail_estimate,
        tail_bound: c.tail_bound,
        product_route: c.log_partial,
        weighted_sum_route: w.value,
        monte_carlo,
    };
    let mut summary = format!("K = {} (log), e^K = {}, tail bound {:.3e}\n", rep.k, rep.exp_k, rep.tail_bound);
    if let Some(m) = &rep.monte_carlo {
        let _ = writeln!(summary, "Birkhoff average {} +- {} ({} orbits)", m.mean, m.stderr, m.n);
    }
    let csv = || {
        let mut rows = vec![
            ("k", sci(rep.k)),
            ("exp_k", sci(rep.exp_k)),
            ("tail_estimate", sci(rep.tail_estimate)),
            ("tail_bound", sci(rep.tail_bound)),
            ("product_route", sci(rep.product_route)),
            ("weighted_sum_route", sci(rep.weighted_sum_route)),
        ];
        if let Some(m) = &rep.monte_carlo {
            rows.push(("mc_mean", sci(m.mean)));
            rows.push(("mc_stderr", sci(m.stderr)));
        }
        key_value_csv(&rows)
    };
    emit(out, "khinchin", a, &rep, csv, &summary)?;
    Ok(ExitCode::SUCCESS)
}

pub fn farey(a: &FareyArgs, out: &Output) -> CliResult<ExitCode> {
    if a.level > MAX_FAREY_LEVEL {
        return Err(Error::SizeGuard { requested: a.level, limit: MAX_FAREY_LEVEL }.into());
    }
    let level = farey_level(a.level)?;
    let list: Vec<String> = level.iter().map(|r| r.to_string()).collect();
    let summary = format!("{}\n", list.join(","));
    let csv = || {
        let mut s = String::from("numerator,denominator\n");
        for r in &level {
            let _ = writeln!(s, "{},{}", r.numer(), r.denom());
        }
        s
    };
    emit(out, "farey", a, &list, csv, &summary)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct OrbitReport {
    word: String,
    value: f64,
    weight: f64,
    farey_period: u64,
    /// x, G(x), ..., G^{l-1}(x)
    shifts: Vec<f64>,
    mean_log_digit: f64,
}

pub fn orbit(a: &OrbitArgs, out: &Output) -> CliResult<ExitCode> {
    let parsed: CfWord = a.word.parse()?;
    let word = CfWord::periodic(parsed.digits().to_vec())?;
    let o = periodic_cf_value::<f64>(&word)?;
    let shifts = (0..word.len())
        .map(|j| periodic_cf_value::<f64>(&word.rotated(j)).map(|r| r.value))
        .collect::<farey_gauss::Result<Vec<_>>>()?;
    let mean_log_digit = birkhoff_log_tau_periodic(&word, 1000 * word.len())?;
    let rep = OrbitReport {
        word: word.to_string(),
        value: o.value,
        weight: o.weight,
        farey_period: o.farey_period,
        shifts,
        mean_log_digit,
    };
    let summary = format!("x = {} weight = {} Farey period = {}\n", rep.value, rep.weight, rep.farey_period);
    let csv = || {
        key_value_csv(&[
            ("word", format!("\"{}\"", rep.word)),
            ("value", sci(rep.value)),
            ("weight", sci(rep.weight)),
            ("farey_period", rep.farey_period.to_string()),
            ("mean_log_digit", sci(rep.mean_log_digit)),
        ])
    };
    emit(out, "orbit", a, &rep, csv, &summary)?;
    Ok(ExitCode::SUCCESS)
}

/// 25 points in (0, 1), 25 in (1, 3], and 1 itself.
pub fn default_lambda_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (1..=25).map(|i| i as f64 / 26.0).collect();
    g.extend((1..=25).map(|i| 1.0 + 2.0 * i as f64 / 25.0));
    g.push(1.0);
    g
}

pub fn scan(a: &ScanArgs, out: &Output) -> CliResult<ExitCode> {
    let lambdas = if a.lambda.is_empty() { default_lambda_grid() } else { a.lambda.clone() };
    let rows = conjecture_scan(&lambdas, &rule(a.n)?)?;
    let mut summary = String::new();
    for r in &rows {
        let _ = writeln!(summary, "lambda {:<8} distance {:.6e}", r.lambda, r.distance);
    }
    let csv = || {
        let mut s = String::from("lambda,distance,nearest_re,nearest_im\n");
        for r in &rows {
            let _ = writeln!(s, "{},{},{},{}", sci(r.lambda), sci(r.distance), sci(r.nearest.re), sci(r.nearest.im));
        }
        s
    };
    emit(out, "scan", a, &rows, csv, &summary)?;
    Ok(ExitCode::SUCCESS)
}
