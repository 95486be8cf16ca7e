//! Command-line front end: single-point evaluation, parameter sweeps to
//! CSV, SVG plots of sweep output and a built-in self test.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical failure,
//! 3 I/O error.

pub mod config;
pub mod error;
pub mod plot;
pub mod record;
pub mod selftest;
pub mod sweep;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::config::Config;
use crate::error::{CliError, Result};
use crate::plot::PlotSpec;
use crate::record::{Diagnostics, Outcome, Record};

#[derive(Debug, Parser)]
#[command(
    name = "welfare",
    version,
    about = "Cooperation and social welfare under peer and institutional incentives"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a single parameter point.
    Eval {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate every point of a parameter grid and write a CSV file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV; defaults to `[output] path` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of worker threads (default: all cores).
        #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
        jobs: Option<u16>,
    },
    /// Render a sweep CSV as SVG line charts, one file per panel.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

/// Runs the program with `args` (including the program name) and returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // help and version requests are not errors
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 1;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    let result = match cli.command {
        Command::Eval { config } => cmd_eval(&config, out),
        Command::Sweep {
            config,
            out: path,
            jobs,
        } => cmd_sweep(&config, path, jobs.map(usize::from), err),
        Command::Plot {
            input,
            spec,
            out: dir,
        } => cmd_plot(&input, &spec, &dir, out, err),
        Command::Selftest => cmd_selftest(out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn cmd_eval(path: &Path, out: &mut dyn Write) -> Result<i32> {
    let config = Config::load(path)?;
    if !config.is_single_point() {
        return Err(CliError::Config(
            "eval takes a single point; this config describes a grid (use sweep)".into(),
        ));
    }
    let point = config.points()?[0];
    let start = Instant::now();
    let (report, diag) = sweep::evaluate(&point, &config.method, 0)?;
    let elapsed = start.elapsed().as_secs_f64();

    let io = |e| CliError::io("<stdout>", e);
    let mut text = String::new();
    let mut line = |k: &str, v: String| text.push_str(&format!("{k:<16}{v}\n"));
    line("scheme", point.scheme.name().to_owned());
    line("method", config.method.name().to_owned());
    line("coop_frequency", report.coop_frequency.to_string());
    line("gross_welfare", report.gross_welfare_per_capita.to_string());
    line(
        "incentive_cost",
        report.incentive_cost_per_capita.to_string(),
    );
    line("net_welfare", report.net_welfare_per_capita.to_string());
    match diag {
        Diagnostics::Exact {
            states, residual, ..
        } => {
            line("states", states.to_string());
            line("residual", format!("{residual:e}"));
        }
        Diagnostics::MonteCarlo {
            samples, coop_se, ..
        } => {
            line("samples", samples.to_string());
            line("coop_std_error", format!("{coop_se:e}"));
        }
    }
    line("wall_time_s", format!("{elapsed:.3}"));
    writeln!(out, "{text}").map_err(io)?;

    let record = Record {
        point,
        method: config.method.name(),
        outcome: Outcome::Ok { report, diag },
    };
    record::write_csv(&mut *out, &[record]).map_err(|e| CliError::io("<stdout>", e.into()))?;
    Ok(0)
}

fn cmd_sweep(
    path: &Path,
    out_path: Option<PathBuf>,
    jobs: Option<usize>,
    err: &mut dyn Write,
) -> Result<i32> {
    let config = Config::load(path)?;
    let out_path = out_path.or_else(|| config.output.clone()).ok_or_else(|| {
        CliError::Config("no output path: pass --out or set [output] path".into())
    })?;
    // fail on an unwritable destination before doing any work
    let file = std::fs::File::create(&out_path).map_err(|e| CliError::io(&out_path, e))?;

    let records = sweep::run_sweep(&config, jobs)?;
    record::write_csv(std::io::BufWriter::new(file), &records)
        .map_err(|e| CliError::io(&out_path, e.into()))?;

    let failed = records
        .iter()
        .filter(|r| matches!(r.outcome, Outcome::Failed(_)))
        .count();
    let _ = writeln!(
        err,
        "wrote {} rows to {} ({failed} failed)",
        records.len(),
        out_path.display()
    );
    Ok(if failed > 0 { 2 } else { 0 })
}

fn cmd_plot(
    input: &Path,
    spec: &Path,
    dir: &Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let spec = PlotSpec::load(spec)?;
    let result = plot::plot(input, &spec, dir)?;
    for w in &result.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    for f in &result.files {
        let _ = writeln!(out, "{}", f.display());
    }
    Ok(0)
}

fn cmd_selftest(out: &mut dyn Write) -> Result<i32> {
    let mut failed = 0;
    for c in selftest::run() {
        let _ = match &c.outcome {
            Ok(()) => writeln!(out, "PASS  {}", c.name),
            Err(m) => {
                failed += 1;
                writeln!(out, "FAIL  {}: {m}", c.name)
            }
        };
    }
    Ok(if failed > 0 { 2 } else { 0 })
}
