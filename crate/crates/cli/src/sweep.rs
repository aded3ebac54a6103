use std::fs;
use std::io::BufWriter;
use std::path::Path;

use clap::ValueEnum;

use crate::compute;
use crate::report::{write_csv, ReportRow};
use crate::stack::{Medium, Scenario};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    #[value(name = "gap", alias = "gap_d")]
    Gap,
    #[value(name = "delta", alias = "delta_rel")]
    Delta,
    Eps1,
    Eps2,
    Eps3,
}

impl Axis {
    pub fn flag(self) -> &'static str {
        match self {
            Axis::Gap => "--gap",
            Axis::Delta => "--delta",
            Axis::Eps1 => "--eps1",
            Axis::Eps2 => "--eps2",
            Axis::Eps3 => "--eps3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub axis: Axis,
    pub values: Vec<f64>,
    pub base: Scenario,
}

pub fn range_values(start: f64, stop: f64, count: usize, spacing: Spacing) -> Result<Vec<f64>, CliError> {
    if count == 0 {
        return Err(CliError::Usage("--count must be at least 1".into()));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    if spacing == Spacing::Log && !(start > 0.0 && stop > 0.0) {
        return Err(CliError::Usage(
            "--start and --stop must be positive for --spacing log".into(),
        ));
    }
    let n = (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            let f = i as f64 / n;
            if i == 0 {
                return start;
            }
            if i == count - 1 {
                return stop;
            }
            match spacing {
                Spacing::Linear => start + (stop - start) * f,
                Spacing::Log => start * (stop / start).powf(f),
            }
        })
        .collect())
}

impl SweepPlan {
    pub fn new(axis: Axis, values: Vec<f64>, base: Scenario) -> Result<Self, CliError> {
        if values.is_empty() {
            return Err(CliError::Usage("sweep needs at least one value (--values or --start/--stop/--count)".into()));
        }
        let increasing = values.windows(2).all(|w| w[1] > w[0]);
        let decreasing = values.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return Err(CliError::Usage(
                "sweep values must be strictly monotone".into(),
            ));
        }
        let plan = SweepPlan { axis, values, base };
        for v in &plan.values {
            plan.scenario(*v)?;
        }
        Ok(plan)
    }

    pub fn scenario(&self, v: f64) -> Result<Scenario, CliError> {
        let mut s = self.base.clone();
        let flag = self.axis.flag();
        match self.axis {
            Axis::Gap => s.gap = v,
            Axis::Delta => s.apply_delta(v)?,
            Axis::Eps1 | Axis::Eps2 | Axis::Eps3 => {
                if !(v.is_finite() && v > 0.0) {
                    return Err(CliError::Usage(format!(
                        "{flag} sweep value must be positive, got {v}"
                    )));
                }
                let idx = match self.axis {
                    Axis::Eps1 => 0,
                    Axis::Eps2 => 1,
                    _ => 2,
                };
                s.media[idx] = Medium::constant(v);
                if let (Some(d), Axis::Eps3) = (s.delta, self.axis) {
                    s.apply_delta(d)?;
                }
            }
        }
        s.check()
            .map_err(|e| CliError::Usage(format!("{flag} = {v}: {e}")))?;
        Ok(s)
    }

    pub fn rows(&self) -> Result<Vec<ReportRow>, CliError> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let s = self.scenario(v)?;
                compute::run(&s).map_err(|e| match e {
                    CliError::Numerical(m) => CliError::Numerical(format!(
                        "row {i} ({} = {v}): {m}",
                        self.axis.flag()
                    )),
                    other => other,
                })
            })
            .collect()
    }

    /// Writes the CSV via a sibling temporary file so a failed sweep never
    /// leaves a partial output behind.
    pub fn run_to_file(&self, path: &Path) -> Result<usize, CliError> {
        let rows = self.rows()?;
        let tmp = path.with_extension("partial");
        let write = || -> Result<(), CliError> {
            let file = fs::File::create(&tmp)
                .map_err(|e| CliError::Usage(format!("--output {}: {e}", path.display())))?;
            write_csv(BufWriter::new(file), &rows)
                .map_err(|e| CliError::Usage(format!("--output {}: {e}", path.display())))?;
            fs::rename(&tmp, path)
                .map_err(|e| CliError::Usage(format!("--output {}: {e}", path.display())))
        };
        if let Err(e) = write() {
            let _ = fs::remove_file(&tmp);
            return Err(e);
        }
        Ok(rows.len())
    }
}
