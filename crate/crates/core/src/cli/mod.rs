//! The `ergolab` command line.
//!
//! Exit codes: 0 when every verdict passes, 1 on a failed verdict, 2 on a
//! usage or parameter error, 3 when a resource ceiling is hit.

pub mod commands;
pub mod report;
pub mod verify;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::Error;
use crate::lpspace::{Exponent, SeqFunction};
use crate::weights::Limits;
use commands::BackendChoice;
use report::{write_atomic, ExperimentReport, SCHEMA_VERSION};
use verify::{Suite, VerifyOptions};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ergolab", version, about = "Certified numerics for the barycenter operator A = sum_j alpha_j T^j")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Directory receiving `<command>.csv` and `<command>.json`.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Record wall-clock time in the JSON report.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate alpha^n_j for j < jmax.
    Alpha {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        jmax: u64,
        #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
        backend: BackendArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the invariant suites.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::Core)]
        suite: SuiteArg,
        /// Add this amount to every float-path weight (fault injection).
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        perturb: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 100)]
        reruns: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Norm growth of A^n on the witnesses 1[k >= n^2].
    Growth {
        #[arg(long, default_value = "2", value_parser = parse_exponent)]
        p: Exponent,
        #[arg(long, default_value_t = 32)]
        nmax: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// E f(S_n) for f(k) = k^beta.
    Blowup {
        #[arg(long, default_value = "2", value_parser = parse_exponent)]
        p: Exponent,
        /// Defaults to 2/(5p).
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 32)]
        nmax: u64,
        #[arg(long, default_value_t = 1 << 20)]
        truncation: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Maximal-function ratio of translation Cesaro means.
    Maximal {
        #[arg(long, default_value = "2", value_parser = parse_exponent)]
        p: Exponent,
        #[arg(long, value_delimiter = ',', default_value = "4,16,64,256")]
        mgrid: Vec<u64>,
        #[arg(long, default_value_t = 4)]
        horizon_factor: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Smallest alpha^n_j / (n alpha_j) with c0 j >= n^2.
    Probe {
        #[arg(long, default_value_t = 1.0)]
        c0: f64,
        #[arg(long, default_value_t = 32)]
        nmax: u64,
        #[arg(long, default_value_t = 2000)]
        jmax: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Powers of the 2x2 matrix [[1, a], [0, 1]].
    Sato {
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value = "2", value_parser = parse_exponent)]
        p: Exponent,
        #[arg(long, default_value_t = 32)]
        nmax: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo estimate of A^n f(k) against its enclosure.
    Simulate {
        /// power:B, ge:M, window:A:B or table:v0,v1,...
        #[arg(long = "fn", default_value = "table:1", value_parser = parse_function)]
        function: SeqFunction,
        #[arg(long, default_value_t = 2)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        k: u64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1 << 24)]
        truncation: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run every command at default parameters into one directory.
    Report {
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Exact,
    Log,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Core,
    All,
}

fn parse_exponent(s: &str) -> Result<Exponent, String> {
    let p: f64 = s.parse().map_err(|e| format!("{e}"))?;
    Exponent::new(p).map_err(|e| e.to_string())
}

fn parse_function(s: &str) -> Result<SeqFunction, String> {
    s.parse::<SeqFunction>().map_err(|e| e.to_string())
}

#[derive(Debug)]
pub enum CliError {
    Compute(Error),
    Io(PathBuf, std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute(Error::ResourceLimit { .. }) => EXIT_RESOURCE,
            _ => EXIT_USAGE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Compute(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_PASS,
                _ => EXIT_USAGE,
            };
        }
    };
    match execute(cli.command) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs one command; `Ok(pass)` carries the aggregate verdict.
pub fn execute(command: Command) -> Result<bool, CliError> {
    let limits = Limits::from_env()?;
    let start = Instant::now();
    let (report, output) = match command {
        Command::Report { out, seed, timing } => return run_report(&out, seed, timing, &limits),
        Command::Alpha {
            n,
            jmax,
            backend,
            output,
        } => {
            let b = match backend {
                BackendArg::Exact => BackendChoice::Exact,
                BackendArg::Log => BackendChoice::Log,
                BackendArg::Auto => BackendChoice::Auto,
            };
            (commands::alpha(n, jmax, b, &limits)?, output)
        }
        Command::Verify {
            suite,
            perturb,
            seed,
            trials,
            reruns,
            output,
        } => {
            if !perturb.is_finite() {
                return Err(Error::InvalidParameter("--perturb must be finite".into()).into());
            }
            if trials == 0 {
                return Err(Error::InvalidParameter("--trials must be >= 1".into()).into());
            }
            let suite = match suite {
                SuiteArg::Core => Suite::Core,
                SuiteArg::All => Suite::All,
            };
            let opts = VerifyOptions {
                perturb,
                seed,
                mc_trials: trials,
                mc_reruns: reruns,
            };
            (commands::verify(suite, &opts)?, output)
        }
        Command::Growth { p, nmax, output } => (commands::growth(p, nmax, &limits)?, output),
        Command::Blowup {
            p,
            beta,
            nmax,
            truncation,
            output,
        } => {
            let beta = beta.unwrap_or_else(|| p.witness_beta());
            (commands::blowup(p, beta, nmax, truncation, &limits)?, output)
        }
        Command::Maximal {
            p,
            mgrid,
            horizon_factor,
            output,
        } => (commands::maximal(p, &mgrid, horizon_factor)?, output),
        Command::Probe {
            c0,
            nmax,
            jmax,
            output,
        } => (commands::probe(c0, nmax, jmax)?, output),
        Command::Sato { a, p, nmax, output } => (commands::sato(a, p, nmax)?, output),
        Command::Simulate {
            function,
            n,
            k,
            trials,
            seed,
            truncation,
            output,
        } => (
            commands::simulate(&function, n, k, trials, seed, truncation, &limits)?,
            output,
        ),
    };
    let mut report = report;
    if output.timing {
        report.wall_time_seconds = Some(start.elapsed().as_secs_f64());
    }
    print!("{}", report.to_csv());
    print_verdicts(&report);
    if let Some(dir) = &output.out {
        ensure_dir(dir)?;
        report.write_to(dir).map_err(|e| CliError::Io(dir.clone(), e))?;
    }
    Ok(report.all_pass())
}

fn print_verdicts(report: &ExperimentReport) {
    for v in &report.verdicts {
        let tag = if v.pass { "PASS" } else { "FAIL" };
        if v.detail.is_empty() {
            eprintln!("{tag} {}/{}", report.command, v.name);
        } else {
            eprintln!("{tag} {}/{}: {}", report.command, v.name, v.detail);
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))
}

fn run_report(dir: &Path, seed: u64, timing: bool, limits: &Limits) -> Result<bool, CliError> {
    ensure_dir(dir)?;
    let p2 = Exponent::new(2.0)?;
    type Job<'a> = Box<dyn Fn() -> crate::Result<ExperimentReport> + 'a>;
    let jobs: Vec<Job> = vec![
        Box::new(|| commands::alpha(1, 64, BackendChoice::Auto, limits)),
        Box::new(|| {
            let opts = VerifyOptions {
                seed,
                ..VerifyOptions::default()
            };
            commands::verify(Suite::All, &opts)
        }),
        Box::new(|| commands::growth(p2, 32, limits)),
        Box::new(|| commands::blowup(p2, p2.witness_beta(), 32, 1 << 20, limits)),
        Box::new(|| commands::maximal(p2, &[4, 16, 64, 256], 4)),
        Box::new(|| commands::probe(1.0, 32, 2000)),
        Box::new(|| commands::sato(1.0, p2, 32)),
        Box::new(|| {
            let f = SeqFunction::finite_table(vec![1.0])?;
            commands::simulate(&f, 2, 0, 100_000, seed, 1 << 24, limits)
        }),
    ];
    let mut entries = Vec::new();
    let mut all_pass = true;
    for job in jobs {
        let start = Instant::now();
        let mut report = job()?;
        if timing {
            report.wall_time_seconds = Some(start.elapsed().as_secs_f64());
        }
        print_verdicts(&report);
        report.write_to(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
        all_pass &= report.all_pass();
        entries.push(json!({
            "command": report.command,
            "allPass": report.all_pass(),
            "verdicts": report.verdicts.iter().map(|v| json!({"name": v.name, "pass": v.pass})).collect::<Vec<_>>(),
        }));
    }
    let summary = json!({
        "schemaVersion": SCHEMA_VERSION,
        "command": "report",
        "seed": seed,
        "allPass": all_pass,
        "reports": entries,
    });
    let mut text = serde_json::to_string_pretty(&summary).expect("serializable summary");
    text.push('\n');
    let path = dir.join("summary.json");
    write_atomic(&path, text.as_bytes()).map_err(|e| CliError::Io(path.clone(), e))?;
    println!("{}", path.display());
    Ok(all_pass)
}
