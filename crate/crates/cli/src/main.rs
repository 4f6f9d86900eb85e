//! `deltashell`: band structures, truncated eigenvalues and spectral
//! experiments for radial δ-shell operators.
//!
//! Exit codes: 0 PASS / success, 1 FAIL, 2 usage or config error,
//! 3 solver error, 4 inconclusive.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use deltashell::experiments::{run_named, Verdict};
use deltashell::kp1d::discriminant_table;
use deltashell::radial::{eigenvalues_in, SpectralQuery};
use deltashell::{band_edges, Error, PartialWave};
use serde_json::json;

use config::{
    parse_window, resolve_experiment, resolve_out, BandsFlags, BandsSettings, ConfigFile,
    EigenFlags, EigenSettings, ExperimentFlags,
};
use manifest::OutputDir;

const EXIT_PASS: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_INCONCLUSIVE: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "deltashell",
    version,
    about = "Spectra of radial δ-shell Schrödinger operators"
)]
struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory [default: $DSS_OUT, else ./out].
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads [default: available parallelism].
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[arg(long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Band edges and discriminant samples of the periodic comparison operator.
    Bands {
        #[arg(long)]
        lambda_min: Option<f64>,
        #[arg(long)]
        lambda_max: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Eigenvalues of one truncated partial-wave operator in a window.
    Eigen {
        #[arg(long)]
        l: Option<u32>,
        #[arg(long)]
        nu: Option<u32>,
        #[arg(long)]
        radius: Option<f64>,
        /// Energy window `lo:hi`.
        #[arg(long, value_name = "LO:HI", allow_hyphen_values = true)]
        window: Option<String>,
    },
    /// Run one of the spectral experiments and write its report.
    Experiment {
        name: ExperimentName,
        #[arg(long)]
        nu: Option<u32>,
        #[arg(long)]
        l_max: Option<u32>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ExperimentName {
    Gapfill,
    Bandcount,
    Asymptote,
    Lipschitz,
    Bounds,
    Floor,
}

impl ExperimentName {
    fn as_str(self) -> &'static str {
        match self {
            ExperimentName::Gapfill => "gapfill",
            ExperimentName::Bandcount => "bandcount",
            ExperimentName::Asymptote => "asymptote",
            ExperimentName::Lipschitz => "lipschitz",
            ExperimentName::Bounds => "bounds",
            ExperimentName::Floor => "floor",
        }
    }
}

enum Failure {
    Usage(String),
    Solver(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. }
            | Error::Precondition(_)
            | Error::Range(_)
            | Error::Domain(_)
            | Error::Lattice(_) => Failure::Usage(e.to_string()),
            Error::Convergence { .. }
            | Error::Singularity { .. }
            | Error::Consistency(_)
            | Error::Grid(_) => Failure::Solver(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Solver(format!("i/o error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot size the thread pool: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("solver error: {msg}");
            ExitCode::from(EXIT_SOLVER)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let file = ConfigFile::load(cli.config.as_deref())?;
    let out_dir = resolve_out(cli.out.clone(), &file)?;
    match cli.command {
        Command::Bands {
            lambda_min,
            lambda_max,
            samples,
        } => {
            let flags = BandsFlags {
                lambda_min,
                lambda_max,
                samples,
            };
            let s = BandsSettings::resolve(&file, &flags)?;
            let a = s.lattice.period().expect("checked by resolve");
            let alpha = s.lattice.alpha();
            let bs = band_edges(alpha, a, s.lambda_min, s.lambda_max)?;
            let disc = discriminant_table(alpha, a, s.lambda_min, s.lambda_max, s.samples)?;
            let echo = json!({"command": "bands", "settings": s});
            let mut out = OutputDir::create(&out_dir, "bands", &echo, cli.verbose)?;
            out.write_table("bands.csv", &bs.table())?;
            out.write_table("discriminant.csv", &disc)?;
            out.finish()?;
            println!(
                "{} bands, {} gaps in [{}, {}] -> {}",
                bs.bands.len(),
                bs.gaps.len(),
                s.lambda_min,
                s.lambda_max,
                out_dir.display()
            );
            Ok(EXIT_PASS)
        }
        Command::Eigen {
            l,
            nu,
            radius,
            window,
        } => {
            let window = window.as_deref().map(parse_window).transpose()?;
            let flags = EigenFlags {
                nu,
                l,
                radius,
                window,
            };
            let s = EigenSettings::resolve(&file, &flags)?;
            let wave = PartialWave::new(s.nu, s.l)?;
            let q = SpectralQuery::new(wave, &s.lattice, s.radius, s.window.lo, s.window.hi)?
                .with_tol(s.tol_eig)?;
            let res = eigenvalues_in(&q)?;
            let echo = json!({"command": "eigen", "settings": s});
            let mut out = OutputDir::create(&out_dir, "eigen", &echo, cli.verbose)?;
            out.write_table("eigen.csv", &res.table())?;
            out.finish()?;
            println!(
                "{} eigenvalues in ({}, {}) at R = {} -> {}",
                res.eigenvalues.len(),
                s.window.lo,
                s.window.hi,
                s.radius,
                out_dir.display()
            );
            Ok(EXIT_PASS)
        }
        Command::Experiment { name, nu, l_max } => {
            let cfg = resolve_experiment(&file, &ExperimentFlags { nu, l_max })?;
            let name = name.as_str();
            let report = run_named(name, &cfg)?;
            let mut out = OutputDir::create(
                &out_dir,
                &format!("experiment {name}"),
                &cfg.to_json(),
                cli.verbose,
            )?;
            out.write_bytes(
                &format!("{name}_report.json"),
                report.to_json_string().as_bytes(),
            )?;
            for (file_name, table) in &report.tables {
                out.write_table(file_name, table)?;
            }
            out.finish()?;
            let verdict = match report.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::Inconclusive => "INCONCLUSIVE",
            };
            println!("{name}: {verdict} -> {}", out_dir.display());
            for note in &report.notes {
                println!("  note: {note}");
            }
            Ok(match report.verdict {
                Verdict::Pass => EXIT_PASS,
                Verdict::Fail => EXIT_FAIL,
                Verdict::Inconclusive => EXIT_INCONCLUSIVE,
            })
        }
    }
}
