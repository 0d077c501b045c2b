//! `xzdress`: simulate, analyze, compare and sweep XZ-dressed qubit dynamics.

mod commands;
mod config;
mod error;
mod io;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use xz_dressing::analysis::FrequencyConvention;

use crate::commands::Source;
use crate::config::MethodName;
use crate::error::CliResult;

#[derive(Parser)]
#[command(name = "xzdress", version, about = "Qubit dynamics under XZ dual dressing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SourceArgs {
    /// JSON scenario config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named figure preset with default run settings.
    #[arg(long)]
    preset: Option<String>,
}

impl SourceArgs {
    fn source(&self) -> Source {
        match (&self.config, &self.preset) {
            (Some(p), _) => Source::File(p.clone()),
            (None, Some(n)) => Source::Preset(n.clone()),
            (None, None) => unreachable!("clap enforces one source"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    HalfPeriod,
    PaperVerbatim,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate one scenario and write its trace.
    Simulate {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value = "trace.csv")]
        out: PathBuf,
        /// Optional SVG plot of the trace.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// JSON report path; printed to stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Longest lag for the revival search, in drive periods.
        #[arg(long)]
        max_lag_tau: Option<f64>,
    },
    /// Zero-crossing frequency estimates and period searches on a trace CSV.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "estimates.csv")]
        estimates: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Signal column (default `sx`, or the only column of a two-column file).
        #[arg(long)]
        column: Option<String>,
        /// Drive frequency in kHz; inferred from `tau` and `t` when present.
        #[arg(long)]
        drive_khz: Option<f64>,
        #[arg(long, value_enum, default_value = "half-period")]
        convention: Convention,
        #[arg(long)]
        max_lag_tau: Option<f64>,
    },
    /// Run several methods on one grid and report their deviations.
    Compare {
        #[command(flatten)]
        source: SourceArgs,
        /// Comma-separated methods; the first is the reference.
        #[arg(long, value_delimiter = ',', default_value = "exact,floquet2")]
        methods: Vec<String>,
        #[arg(long, default_value = "compare.csv")]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Vary one parameter and tabulate periods and adiabatic deviation.
    Sweep {
        #[command(flatten)]
        source: SourceArgs,
        /// Config key to vary, e.g. `omega_khz` or `phi0z_over_pi`.
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        values: Vec<f64>,
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Number of concurrent sweep points.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        max_lag_tau: Option<f64>,
    },
    /// List the figure presets.
    Presets {
        #[arg(long)]
        json: bool,
    },
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate {
            source,
            out,
            svg,
            report,
            max_lag_tau,
        } => commands::simulate(&commands::SimulateArgs {
            source: source.source(),
            out,
            svg,
            report,
            max_lag_tau,
        }),
        Command::Analyze {
            input,
            estimates,
            report,
            column,
            drive_khz,
            convention,
            max_lag_tau,
        } => commands::analyze(&commands::AnalyzeArgs {
            input,
            estimates,
            report,
            column,
            drive_khz,
            convention: match convention {
                Convention::HalfPeriod => FrequencyConvention::HalfPeriod,
                Convention::PaperVerbatim => FrequencyConvention::PaperVerbatim,
            },
            max_lag_tau,
        }),
        Command::Compare {
            source,
            methods,
            out,
            report,
        } => commands::compare(&commands::CompareArgs {
            source: source.source(),
            methods: methods.iter().map(|m| MethodName::parse(m)).collect::<CliResult<_>>()?,
            out,
            report,
        }),
        Command::Sweep {
            source,
            param,
            values,
            out,
            report,
            jobs,
            max_lag_tau,
        } => commands::sweep(&commands::SweepArgs {
            source: source.source(),
            param,
            values,
            out,
            report,
            jobs,
            max_lag_tau,
        }),
        Command::Presets { json } => commands::presets(json),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
