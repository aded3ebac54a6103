//! `lifshitz`: Casimir–Lifshitz forces from the command line.
//!
//! Exit codes: 0 success, 1 failed validation check, 2 usage error,
//! 3 numerical non-convergence.

mod compute;
mod report;
mod stack;
mod sweep;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lifshitz_core::validation::{run_validation, validation_spec, ValidationReport};
use lifshitz_core::PhysicalConstants;
use thiserror::Error;

use crate::report::{fmt_f64, write_csv, MaterialRow};
use crate::stack::{registry_for, StackArgs};
use crate::sweep::{range_values, Axis, Spacing, SweepPlan};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Output(#[from] io::Error),
    #[error("validation failed")]
    ValidationFailed,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::ValidationFailed => 1,
            CliError::Usage(_) | CliError::Output(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "lifshitz", version, about = "Zero-temperature Casimir-Lifshitz forces between dielectric half-spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Force for a single stack.
    Force {
        #[command(flatten)]
        stack: StackArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Force over a range of one parameter, written as CSV.
    Sweep(SweepArgs),
    /// Re-run the reference checkpoints.
    Validate {
        #[arg(long)]
        json: bool,
    },
    /// Inspect a materials registry.
    Materials {
        #[command(subcommand)]
        command: MaterialsCommand,
    },
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    axis: Axis,
    /// Comma-separated axis values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with_all = ["start", "stop", "count"])]
    values: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true, requires_all = ["stop", "count"])]
    start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    stop: Option<f64>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, value_enum, default_value_t = Spacing::Linear)]
    spacing: Spacing,
    /// CSV output path.
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    stack: StackArgs,
}

#[derive(Debug, Subcommand)]
enum MaterialsCommand {
    List {
        #[arg(long)]
        materials_file: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

fn cmd_force(stack: &StackArgs, format: Format) -> Result<(), CliError> {
    let scenario = stack.scenario()?;
    let row = compute::run(&scenario)?;
    let mut out = io::stdout().lock();
    match format {
        Format::Json => writeln!(out, "{}", row.to_json())?,
        Format::Csv => write_csv(&mut out, std::slice::from_ref(&row))
            .map_err(|e| CliError::Output(io::Error::other(e)))?,
    }
    Ok(())
}

fn sweep_base(args: &SweepArgs) -> Result<StackArgs, CliError> {
    let mut stack = args.stack.clone();
    // the swept quantity does not have to be given as a base flag
    match args.axis {
        Axis::Gap if stack.gap.is_none() => stack.gap = Some(1.0),
        Axis::Delta if stack.delta.is_none() => {
            if stack.eps1.is_some() || stack.eps2.is_some() {
                return Err(CliError::Usage(
                    "--axis delta builds eps1/eps2 from --eps3; drop --eps1/--eps2".into(),
                ));
            }
            stack.delta = Some(0.0)
        }
        Axis::Eps1 if stack.eps1.is_none() && stack.material1.is_none() => stack.eps1 = Some(1.0),
        Axis::Eps2 if stack.eps2.is_none() && stack.material2.is_none() => stack.eps2 = Some(1.0),
        Axis::Eps3 if stack.eps3.is_none() && stack.material3.is_none() => stack.eps3 = Some(1.0),
        _ => {}
    }
    Ok(stack)
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let values = match (&args.values, args.start, args.stop, args.count) {
        (Some(v), ..) => v.clone(),
        (None, Some(start), Some(stop), Some(count)) => {
            range_values(start, stop, count, args.spacing)?
        }
        _ => Vec::new(),
    };
    let base = sweep_base(args)?.scenario()?;
    let plan = SweepPlan::new(args.axis, values, base)?;
    let n = plan.run_to_file(&args.output)?;
    eprintln!("wrote {n} rows to {}", args.output.display());
    Ok(())
}

fn print_validation(report: &ValidationReport, json: bool) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    if json {
        let text = serde_json::to_string_pretty(report)
            .map_err(|e| CliError::Output(io::Error::other(e)))?;
        writeln!(out, "{text}")?;
        return Ok(());
    }
    writeln!(
        out,
        "{:<6} {:<66} {:>24} {:>24} {:>12}",
        "status", "check", "expected", "actual", "tolerance"
    )?;
    for c in &report.checks {
        let tol = if c.absolute {
            format!("±{:.3e}", c.tolerance)
        } else {
            format!("{:.3e} rel", c.tolerance)
        };
        writeln!(
            out,
            "{:<6} {:<66} {:>24} {:>24} {:>12}{}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            fmt_f64(c.expected),
            fmt_f64(c.actual),
            tol,
            c.note.as_ref().map(|n| format!("  ({n})")).unwrap_or_default()
        )?;
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    writeln!(out, "{} checks, {failed} failed", report.checks.len())?;
    Ok(())
}

fn cmd_validate(json: bool) -> Result<(), CliError> {
    let report = run_validation(&PhysicalConstants::CODATA_2018, &validation_spec());
    print_validation(&report, json)?;
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError::ValidationFailed)
    }
}

fn cmd_materials_list(path: Option<&PathBuf>, json: bool) -> Result<(), CliError> {
    let materials = registry_for(path)?;
    let rows: Vec<MaterialRow> = materials
        .iter()
        .map(|m| MaterialRow {
            name: &m.name,
            model: match m.model {
                lifshitz_core::PermittivityModel::Constant { .. } => "constant",
                lifshitz_core::PermittivityModel::Drude { .. } => "drude",
                lifshitz_core::PermittivityModel::Lorentz { .. } => "lorentz",
            },
            static_eps: m.model.static_value(),
            provenance: &m.provenance,
        })
        .collect();
    let mut out = io::stdout().lock();
    if json {
        let text = serde_json::to_string_pretty(&rows)
            .map_err(|e| CliError::Output(io::Error::other(e)))?;
        writeln!(out, "{text}")?;
    } else {
        for r in &rows {
            let eps = r
                .static_eps
                .map(|e| format!("{e}"))
                .unwrap_or_else(|| "inf".into());
            writeln!(out, "{:<24} {:<9} eps(0)={:<10} {}", r.name, r.model, eps, r.provenance)?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Force { stack, format } => cmd_force(&stack, format),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Validate { json } => cmd_validate(json),
        Command::Materials {
            command: MaterialsCommand::List {
                materials_file,
                json,
            },
        } => cmd_materials_list(materials_file.as_ref(), json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::ValidationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
