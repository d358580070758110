//! Command-line front end: instance generation, recovery runs, benchmark
//! sweeps and the lower-bound experiment.
//!
//! Exit codes: 0 success, 1 usage, 2 input, 3 internal.

pub mod bench;
mod error;

pub use error::CliError;

use batchrec::gen::{generate, InstanceKind, InstanceSpec};
use batchrec::io::{read_matrix, write_matrix, write_sparse};
use batchrec::lowerbound::{experiment_csv, lowerbound_experiment, standard_profiles};
use batchrec::report::{run as run_algorithm, AlgorithmChoice, RunParams};
use batchrec::{RecoveryConfig, RecoveryMode};
use clap::{Parser, Subcommand, ValueEnum};
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(
    name = "batchrec",
    version,
    about = "Batch sparse recovery from counted linear measurements"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Planted,
    Adversarial,
    Powerlaw,
}

impl From<KindArg> for InstanceKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Planted => InstanceKind::Planted,
            KindArg::Adversarial => InstanceKind::Adversarial,
            KindArg::Powerlaw => InstanceKind::PowerLaw,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AlgoArg {
    Const,
    Eps,
    Noisecapped,
    Tworound,
}

impl From<AlgoArg> for AlgorithmChoice {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Const => AlgorithmChoice::Const,
            AlgoArg::Eps => AlgorithmChoice::Eps,
            AlgoArg::Noisecapped => AlgorithmChoice::NoiseCapped,
            AlgoArg::Tworound => AlgorithmChoice::TwoRound,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Idealized,
    Sketch,
}

impl From<ModeArg> for RecoveryMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Idealized => RecoveryMode::Idealized,
            ModeArg::Sketch => RecoveryMode::Sketch,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an instance and write it in the matrix text format.
    Gen {
        #[arg(long, value_enum, default_value = "planted")]
        kind: KindArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Total ℓ1 mass of the tail.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one algorithm on a matrix file and emit a JSON report line.
    Recover {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_enum, default_value = "const")]
        algo: AlgoArg,
        #[arg(long)]
        k: usize,
        /// Accuracy of the refined scheme.
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
        /// Target error of the noise-capped scheme.
        #[arg(long, default_value_t = 1e-6)]
        cap: f64,
        #[arg(long, value_enum, default_value = "idealized")]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Append the report to this JSON-lines file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the recovered matrix in sparse layout.
        #[arg(long)]
        estimate: Option<PathBuf>,
    },
    /// Run a sweep described by a key=value config and print a CSV table.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; defaults to the number of CPUs.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Non-adaptive lower-bound experiment against the adaptive baseline.
    Lowerbound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(stdout: &mut dyn Write, out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Internal(e.to_string())),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing regular output to `stdout`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            return stdout
                .write_all(e.render().to_string().as_bytes())
                .map_err(|e| CliError::Internal(e.to_string()));
        }
        Err(e) => return Err(CliError::Usage(e.render().to_string())),
    };
    match cli.command {
        Command::Gen {
            kind,
            n,
            m,
            k,
            noise,
            seed,
            out,
        } => {
            let a = generate(&InstanceSpec {
                kind: kind.into(),
                n,
                m,
                k,
                noise,
                seed,
            })?;
            write_matrix(&out, &a).map_err(|e| CliError::Input(format!("{}: {e}", out.display())))
        }
        Command::Recover {
            matrix,
            algo,
            k,
            eps,
            cap,
            mode,
            seed,
            out,
            estimate,
        } => {
            let a = read_matrix(&matrix)
                .map_err(|e| CliError::Input(format!("{}: {e}", matrix.display())))?;
            let algorithm: AlgorithmChoice = algo.into();
            let params = RunParams {
                algorithm,
                k,
                eps: if algorithm == AlgorithmChoice::NoiseCapped {
                    cap
                } else {
                    eps
                },
                config: RecoveryConfig {
                    mode: mode.into(),
                    seed,
                    ..RecoveryConfig::default()
                },
            };
            let (est, report) = run_algorithm(&a, &params)?;
            if report.ledger.total != report.ledger.t_j.iter().sum::<u64>() {
                return Err(CliError::Internal(
                    "ledger total disagrees with per-column counts".into(),
                ));
            }
            let line = report.to_json_line();
            writeln!(stdout, "{line}").map_err(|e| CliError::Internal(e.to_string()))?;
            if let Some(path) = out {
                let mut f = OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(&path)
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                writeln!(f, "{line}")?;
            }
            if let Some(path) = estimate {
                std::fs::write(&path, write_sparse(&est))
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            }
            Ok(())
        }
        Command::Bench {
            config,
            out,
            threads,
        } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::Input(format!("{}: {e}", config.display())))?;
            let cfg = bench::BenchConfig::parse(&text)?;
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(t) = threads {
                if t == 0 {
                    return Err(CliError::Input("--threads must be at least 1".into()));
                }
                pool = pool.num_threads(t);
            }
            let pool = pool
                .build()
                .map_err(|e| CliError::Internal(e.to_string()))?;
            let results = pool.install(|| bench::sweep(&cfg))?;
            emit(stdout, out.as_deref(), &bench::to_csv(&results))
        }
        Command::Lowerbound {
            n,
            m,
            trials,
            seed,
            out,
        } => {
            if n == 0 || m == 0 {
                return Err(CliError::Input("dimensions must be positive".into()));
            }
            let rows = lowerbound_experiment(n, m, &standard_profiles(n, m), trials, seed)?;
            emit(stdout, out.as_deref(), &experiment_csv(&rows))
        }
    }
}
