//! Turns command-line flags into a stack description.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use lifshitz_core::dielectric::{builtin_materials, find_material, registry_load, Material};
use lifshitz_core::{PermittivityModel, QuadratureSpec, StackConfig, UnitSystem};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Rational,
    Series,
    Perturbative,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Rational => "rational",
            Method::Series => "series",
            Method::Perturbative => "perturbative",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Units {
    Si,
    Cgs,
}

impl From<Units> for UnitSystem {
    fn from(u: Units) -> Self {
        match u {
            Units::Si => UnitSystem::Si,
            Units::Cgs => UnitSystem::Cgs,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct StackArgs {
    /// Constant permittivity of half-space 1.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "material1")]
    pub eps1: Option<f64>,
    /// Constant permittivity of half-space 2.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "material2")]
    pub eps2: Option<f64>,
    /// Constant permittivity of the gap.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "material3")]
    pub eps3: Option<f64>,
    /// Half-space 1 by registry name.
    #[arg(long)]
    pub material1: Option<String>,
    /// Half-space 2 by registry name.
    #[arg(long)]
    pub material2: Option<String>,
    /// Gap medium by registry name.
    #[arg(long)]
    pub material3: Option<String>,
    /// Materials registry (TOML). The bundled registry is used when omitted.
    #[arg(long)]
    pub materials_file: Option<PathBuf>,
    /// Relative contrast: sets eps1 = eps3(1+delta), eps2 = eps3(1-delta).
    #[arg(
        long,
        allow_hyphen_values = true,
        conflicts_with_all = ["eps1", "eps2", "material1", "material2"]
    )]
    pub delta: Option<f64>,
    /// Gap width in metres.
    #[arg(long, allow_hyphen_values = true)]
    pub gap: Option<f64>,
    /// Plate area in square metres.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub area: f64,
    #[arg(long, value_enum, default_value_t = Units::Si)]
    pub units: Units,
    #[arg(long, value_enum, default_value_t = Method::Rational)]
    pub method: Method,
    /// Relative quadrature tolerance.
    #[arg(long, default_value_t = 1e-8, allow_hyphen_values = true)]
    pub tol: f64,
    /// Last reflection-series term for --method series; summed until
    /// converged when omitted.
    #[arg(long)]
    pub n_max: Option<u32>,
}

/// One side of the stack as given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct Medium {
    pub label: String,
    pub model: PermittivityModel,
}

impl Medium {
    pub fn constant(eps: f64) -> Self {
        Medium {
            label: crate::report::fmt_f64(eps),
            model: PermittivityModel::constant(eps),
        }
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self.model {
            PermittivityModel::Constant { eps } => Some(eps),
            _ => None,
        }
    }
}

/// Validated stack plus the bookkeeping the reports echo back.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub media: [Medium; 3],
    pub delta: Option<f64>,
    pub gap: f64,
    pub area: f64,
    pub units: UnitSystem,
    pub method: Method,
    pub spec: QuadratureSpec,
    pub n_max: Option<u32>,
}

impl Scenario {
    pub fn stack(&self) -> StackConfig {
        StackConfig::new(
            self.media[0].model.clone(),
            self.media[1].model.clone(),
            self.media[2].model.clone(),
            self.gap,
            self.area,
        )
    }

    pub fn labels(&self) -> [String; 3] {
        self.media.clone().map(|m| m.label)
    }

    /// Rebuild eps1/eps2 from delta and eps3.
    pub fn apply_delta(&mut self, delta: f64) -> Result<(), CliError> {
        if !(delta.is_finite() && (0.0..1.0).contains(&delta)) {
            return Err(CliError::Usage(format!(
                "--delta must lie in [0, 1), got {delta}"
            )));
        }
        let eps3 = self.media[2].constant_value().ok_or_else(|| {
            CliError::Usage("--delta requires a constant gap permittivity (--eps3)".into())
        })?;
        self.media[0] = Medium::constant(eps3 * (1.0 + delta));
        self.media[1] = Medium::constant(eps3 * (1.0 - delta));
        self.delta = Some(delta);
        Ok(())
    }

    pub fn check(&self) -> Result<(), CliError> {
        if !(self.gap.is_finite() && self.gap > 0.0) {
            return Err(CliError::Usage(format!(
                "--gap must be a positive length in metres, got {}",
                self.gap
            )));
        }
        for (i, m) in self.media.iter().enumerate() {
            m.model.validate().map_err(|e| {
                CliError::Usage(format!("--eps{} / --material{}: {e}", i + 1, i + 1))
            })?;
        }
        self.stack()
            .validate()
            .map_err(|e| CliError::Usage(format!("--eps3 / --material3: {e}")))
    }
}

fn load_registry(path: Option<&PathBuf>) -> Result<Vec<Material>, CliError> {
    match path {
        Some(p) => registry_load(p)
            .map_err(|e| CliError::Usage(format!("--materials-file: {e}"))),
        None => Ok(builtin_materials()),
    }
}

pub fn registry_for(args_path: Option<&PathBuf>) -> Result<Vec<Material>, CliError> {
    load_registry(args_path)
}

impl StackArgs {
    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let needs_registry = self.material1.is_some()
            || self.material2.is_some()
            || self.material3.is_some();
        let registry = if needs_registry {
            load_registry(self.materials_file.as_ref())?
        } else {
            Vec::new()
        };
        let medium = |idx: usize, eps: Option<f64>, name: &Option<String>| {
            let flag = format!("--eps{idx}");
            match (eps, name) {
                (Some(e), _) => {
                    if !(e.is_finite() && e > 0.0) {
                        return Err(CliError::Usage(format!(
                            "{flag} must be a positive permittivity, got {e}"
                        )));
                    }
                    Ok(Medium::constant(e))
                }
                (None, Some(n)) => {
                    let m = find_material(&registry, n).ok_or_else(|| {
                        CliError::Usage(format!("--material{idx}: unknown material `{n}`"))
                    })?;
                    Ok(Medium {
                        label: m.name.clone(),
                        model: m.model.clone(),
                    })
                }
                (None, None) => Err(CliError::Usage(format!(
                    "{flag} or --material{idx} is required"
                ))),
            }
        };

        let eps3 = medium(3, self.eps3, &self.material3)?;
        let (m1, m2) = if self.delta.is_some() {
            // placeholders, replaced by apply_delta
            (eps3.clone(), eps3.clone())
        } else {
            (
                medium(1, self.eps1, &self.material1)?,
                medium(2, self.eps2, &self.material2)?,
            )
        };

        let gap = self
            .gap
            .ok_or_else(|| CliError::Usage("--gap is required".into()))?;
        if !(self.area.is_finite() && self.area > 0.0) {
            return Err(CliError::Usage(format!(
                "--area must be a positive area in square metres, got {}",
                self.area
            )));
        }
        let spec = QuadratureSpec::with_rel_tol(self.tol);
        spec.validate()
            .map_err(|e| CliError::Usage(format!("--tol: {e}")))?;
        if self.n_max.is_some() && self.method != Method::Series {
            return Err(CliError::Usage("--n-max only applies to --method series".into()));
        }

        let mut scenario = Scenario {
            media: [m1, m2, eps3],
            delta: None,
            gap,
            area: self.area,
            units: self.units.into(),
            method: self.method,
            spec,
            n_max: self.n_max,
        };
        if let Some(d) = self.delta {
            scenario.apply_delta(d)?;
        }
        scenario.check()?;
        Ok(scenario)
    }
}
