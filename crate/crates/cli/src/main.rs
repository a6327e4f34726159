//! `farey`: batch front end. Flags take precedence over `FAREY_*` environment variables,
//! which take precedence over the defaults.

mod commands;
mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "farey", version, about = "Farey/Gauss transfer operators and zeta functions")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Report file; `-` writes the report to stdout instead of the summary
    #[arg(long, global = true, env = "FAREY_OUT")]
    out: Option<String>,
    /// Report format
    #[arg(long, global = true, env = "FAREY_FORMAT", value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads; results do not depend on it
    #[arg(long, global = true, env = "FAREY_THREADS")]
    threads: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let c: Complex64 = s.trim().parse().map_err(|_| format!("cannot parse {s:?} as a number a or a+bi"))?;
    if c.re.is_finite() && c.im.is_finite() {
        Ok(c)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number {p:?}")))
        .collect()
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    match parse_list(s)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(format!("expected two numbers a,b, got {s:?}")),
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Spectrum of the discretized operator K_{z,q}
    Spectrum(SpectrumArgs),
    /// Two-variable zeta function, Fredholm determinants and pole location
    Zeta(ZetaArgs),
    /// Trace table tr K_{z,q}^l from periodic orbits
    Trace(TraceArgs),
    /// Operator identities and invariant densities against their tail budgets
    Verify(VerifyArgs),
    /// Khinchin's constant by product, weighted sum and optional Monte Carlo
    Khinchin(KhinchinArgs),
    /// Farey fractions of a level
    Farey(FareyArgs),
    /// Periodic orbit of a continued-fraction word
    Orbit(OrbitArgs),
    /// Distance from 1 to the spectrum of K_{1/lambda}
    Scan(ScanArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SpectrumArgs {
    #[arg(long, env = "FAREY_Z", default_value = "1", value_parser = parse_complex)]
    pub z: Complex64,
    #[arg(long, env = "FAREY_Q", default_value_t = 0)]
    pub q: u32,
    /// Quadrature order
    #[arg(long = "N", env = "FAREY_N", default_value_t = 60)]
    pub n: usize,
    /// Also write the matrix in the binary dump format
    #[arg(long)]
    pub matrix_out: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ZetaArgs {
    #[arg(long, env = "FAREY_S", default_value = "0.5", value_parser = parse_complex)]
    pub s: Complex64,
    #[arg(long, env = "FAREY_Z", default_value = "1", value_parser = parse_complex)]
    pub z: Complex64,
    #[arg(long = "N", env = "FAREY_N", default_value_t = 60)]
    pub n: usize,
    /// Order of the s-series and of the trace-series determinant
    #[arg(long = "Lmax", env = "FAREY_LMAX", default_value_t = 6)]
    pub lmax: usize,
    #[arg(long, env = "FAREY_KMAX", default_value_t = 200)]
    pub kmax: u64,
    /// Bracket a,b for a real zero of det(1 - s K_{z,0}); needs real z <= 1
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub bracket: Option<(f64, f64)>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct TraceArgs {
    #[arg(long, env = "FAREY_Z", default_value = "0.5", value_parser = parse_complex)]
    pub z: Complex64,
    #[arg(long = "Lmax", env = "FAREY_LMAX", default_value_t = 4)]
    pub lmax: usize,
    #[arg(long, env = "FAREY_KMAX", default_value_t = 200)]
    pub kmax: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyArgs {
    #[arg(long, env = "FAREY_Z", default_value = "1", value_parser = parse_complex)]
    pub z: Complex64,
    #[arg(long, env = "FAREY_NMAX", default_value_t = 10_000)]
    pub nmax: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct KhinchinArgs {
    #[arg(long, env = "FAREY_KMAX", default_value_t = 1_000_000)]
    pub kmax: u64,
    #[arg(long, env = "FAREY_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo orbits; 0 skips the Birkhoff average
    #[arg(long, default_value_t = 0)]
    pub orbits: usize,
    /// Gauss-map steps per orbit
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct FareyArgs {
    #[arg(long)]
    pub level: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OrbitArgs {
    /// Period word, "1,2" or "(1,2)"
    #[arg(long)]
    pub word: String,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ScanArgs {
    /// Comma-separated lambdas; default is the 50-point grid on (0,1) and (1,3] plus 1
    #[arg(long, env = "FAREY_LAMBDA", value_delimiter = ',', num_args = 1.., allow_hyphen_values = true)]
    pub lambda: Vec<f64>,
    #[arg(long = "N", env = "FAREY_N", default_value_t = 60)]
    pub n: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.global.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    let out = report::Output { path: cli.global.out.clone(), format: cli.global.format };
    let result = match &cli.command {
        Command::Spectrum(a) => commands::spectrum(a, &out),
        Command::Zeta(a) => commands::zeta(a, &out),
        Command::Trace(a) => commands::trace(a, &out),
        Command::Verify(a) => commands::verify(a, &out),
        Command::Khinchin(a) => commands::khinchin(a, &out),
        Command::Farey(a) => commands::farey(a, &out),
        Command::Orbit(a) => commands::orbit(a, &out),
        Command::Scan(a) => commands::scan(a, &out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
