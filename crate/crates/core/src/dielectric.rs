//! Dielectric response on the imaginary frequency axis, ε(iξ), and a small
//! TOML registry of named materials.
//!
//! Three models are provided:
//!
//! * `Constant` — frequency independent ε.
//! * `Drude` — free-carrier response `1 + ω_p² / (ξ (ξ + γ))`.
//! * `Lorentz` — damped oscillators in Ninham–Parsegian form
//!   `1 + Σ C_k ω_k² / (ω_k² + ξ² + γ_k ξ)`.
//!
//! All three are real, at least one (except a `Constant` below one) and
//! non-increasing in ξ.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DielectricError {
    #[error("imaginary frequency must be non-negative, got {0}")]
    NegativeFrequency(f64),
    #[error("undamped Drude model has a pole at zero frequency")]
    DrudePole,
    #[error("invalid {model} parameter `{field}`: {value}")]
    InvalidParameter {
        model: &'static str,
        field: &'static str,
        value: f64,
    },
}

/// One Ninham–Parsegian oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Oscillator {
    /// Dimensionless strength C_k ≥ 0.
    pub strength: f64,
    /// Resonance ω_k in rad/s.
    pub frequency: f64,
    /// Damping γ_k in rad/s.
    #[serde(default)]
    pub damping: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
pub enum PermittivityModel {
    Constant {
        eps: f64,
    },
    Drude {
        plasma_frequency: f64,
        #[serde(default)]
        damping: f64,
    },
    Lorentz {
        oscillators: Vec<Oscillator>,
    },
}

impl PermittivityModel {
    pub fn constant(eps: f64) -> Self {
        PermittivityModel::Constant { eps }
    }

    pub fn drude(plasma_frequency: f64, damping: f64) -> Self {
        PermittivityModel::Drude {
            plasma_frequency,
            damping,
        }
    }

    pub fn lorentz(oscillators: Vec<Oscillator>) -> Self {
        PermittivityModel::Lorentz { oscillators }
    }

    pub fn validate(&self) -> Result<(), DielectricError> {
        fn check(
            ok: bool,
            model: &'static str,
            field: &'static str,
            value: f64,
        ) -> Result<(), DielectricError> {
            if ok {
                Ok(())
            } else {
                Err(DielectricError::InvalidParameter {
                    model,
                    field,
                    value,
                })
            }
        }
        match self {
            PermittivityModel::Constant { eps } => {
                check(eps.is_finite() && *eps > 0.0, "constant", "eps", *eps)
            }
            PermittivityModel::Drude {
                plasma_frequency,
                damping,
            } => {
                check(
                    plasma_frequency.is_finite() && *plasma_frequency > 0.0,
                    "drude",
                    "plasma_frequency",
                    *plasma_frequency,
                )?;
                check(
                    damping.is_finite() && *damping >= 0.0,
                    "drude",
                    "damping",
                    *damping,
                )
            }
            PermittivityModel::Lorentz { oscillators } => {
                for osc in oscillators {
                    check(
                        osc.strength.is_finite() && osc.strength >= 0.0,
                        "lorentz",
                        "strength",
                        osc.strength,
                    )?;
                    check(
                        osc.frequency.is_finite() && osc.frequency > 0.0,
                        "lorentz",
                        "frequency",
                        osc.frequency,
                    )?;
                    check(
                        osc.damping.is_finite() && osc.damping >= 0.0,
                        "lorentz",
                        "damping",
                        osc.damping,
                    )?;
                }
                Ok(())
            }
        }
    }

    /// ε(iξ) for ξ ≥ 0 in rad/s.
    pub fn permittivity_at(&self, xi: f64) -> Result<f64, DielectricError> {
        if !(xi >= 0.0) {
            return Err(DielectricError::NegativeFrequency(xi));
        }
        Ok(match self {
            PermittivityModel::Constant { eps } => *eps,
            PermittivityModel::Drude {
                plasma_frequency,
                damping,
            } => {
                let denom = xi * (xi + damping);
                if denom == 0.0 {
                    return Err(DielectricError::DrudePole);
                }
                1.0 + plasma_frequency * plasma_frequency / denom
            }
            PermittivityModel::Lorentz { oscillators } => {
                1.0 + oscillators
                    .iter()
                    .map(|o| {
                        let w2 = o.frequency * o.frequency;
                        o.strength * w2 / (w2 + xi * xi + o.damping * xi)
                    })
                    .sum::<f64>()
            }
        })
    }

    /// The ξ → 0 value, `None` when it diverges (Drude).
    pub fn static_value(&self) -> Option<f64> {
        match self {
            PermittivityModel::Drude { .. } => None,
            _ => self.permittivity_at(0.0).ok(),
        }
    }

    pub fn is_dispersive(&self) -> bool {
        match self {
            PermittivityModel::Constant { .. } => false,
            PermittivityModel::Drude { .. } => true,
            PermittivityModel::Lorentz { oscillators } => {
                oscillators.iter().any(|o| o.strength > 0.0)
            }
        }
    }
}

/// Free-function form of [`PermittivityModel::permittivity_at`].
pub fn permittivity_at(model: &PermittivityModel, xi: f64) -> Result<f64, DielectricError> {
    model.permittivity_at(xi)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Material {
    pub name: String,
    #[serde(flatten)]
    pub model: PermittivityModel,
    #[serde(default)]
    pub provenance: String,
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("failed to read materials file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to parse materials file: {0}")]
    Parse(String),
    #[error("duplicate material name `{0}`")]
    DuplicateName(String),
    #[error("material `{name}`: {source}")]
    InvalidModel {
        name: String,
        #[source]
        source: DielectricError,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistryFile {
    #[serde(default)]
    material: Vec<RawMaterial>,
}

// `flatten` does not combine with `deny_unknown_fields`, so the file
// schema is spelled out here and converted afterwards.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMaterial {
    name: String,
    model: ModelKind,
    #[serde(default)]
    provenance: String,
    eps: Option<f64>,
    plasma_frequency: Option<f64>,
    damping: Option<f64>,
    oscillators: Option<Vec<Oscillator>>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ModelKind {
    Constant,
    Drude,
    Lorentz,
}

impl RawMaterial {
    fn into_material(self) -> Result<Material, RegistryError> {
        let fail = |msg: String| RegistryError::Parse(format!("material `{}`: {msg}", self.name));
        let reject = |field: &str, present: bool, model: &str| {
            if present {
                Err(fail(format!("field `{field}` is not valid for model `{model}`")))
            } else {
                Ok(())
            }
        };
        let model = match self.model {
            ModelKind::Constant => {
                reject("plasma_frequency", self.plasma_frequency.is_some(), "constant")?;
                reject("damping", self.damping.is_some(), "constant")?;
                reject("oscillators", self.oscillators.is_some(), "constant")?;
                let eps = self
                    .eps
                    .ok_or_else(|| fail("missing field `eps`".into()))?;
                PermittivityModel::Constant { eps }
            }
            ModelKind::Drude => {
                reject("eps", self.eps.is_some(), "drude")?;
                reject("oscillators", self.oscillators.is_some(), "drude")?;
                let plasma_frequency = self
                    .plasma_frequency
                    .ok_or_else(|| fail("missing field `plasma_frequency`".into()))?;
                PermittivityModel::Drude {
                    plasma_frequency,
                    damping: self.damping.unwrap_or(0.0),
                }
            }
            ModelKind::Lorentz => {
                reject("eps", self.eps.is_some(), "lorentz")?;
                reject("plasma_frequency", self.plasma_frequency.is_some(), "lorentz")?;
                reject("damping", self.damping.is_some(), "lorentz")?;
                let oscillators = self
                    .oscillators
                    .clone()
                    .ok_or_else(|| fail("missing field `oscillators`".into()))?;
                PermittivityModel::Lorentz { oscillators }
            }
        };
        model
            .validate()
            .map_err(|source| RegistryError::InvalidModel {
                name: self.name.clone(),
                source,
            })?;
        Ok(Material {
            name: self.name,
            model,
            provenance: self.provenance,
        })
    }
}

/// Parses a materials registry from TOML text.
///
/// ```toml
/// [[material]]
/// name = "toluene"
/// model = "constant"
/// eps = 2.25
/// provenance = "static value"
/// ```
///
/// `model = "drude"` takes `plasma_frequency` and optional `damping`;
/// `model = "lorentz"` takes `oscillators = [{ strength, frequency, damping }]`.
/// Frequencies are in rad/s. Unknown fields are rejected.
pub fn registry_parse(text: &str) -> Result<Vec<Material>, RegistryError> {
    let file: RegistryFile =
        toml::from_str(text).map_err(|e| RegistryError::Parse(e.to_string()))?;
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(file.material.len());
    for raw in file.material {
        if !seen.insert(raw.name.clone()) {
            return Err(RegistryError::DuplicateName(raw.name));
        }
        out.push(raw.into_material()?);
    }
    Ok(out)
}

pub fn registry_load(path: impl AsRef<Path>) -> Result<Vec<Material>, RegistryError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| RegistryError::Io {
        path: path.display().to_string(),
        source,
    })?;
    registry_parse(&text)
}

/// The bundled registry: toluene and the two half-space materials of the
/// flint glass / fluorite scenario.
pub const BUILTIN_MATERIALS: &str = include_str!("../data/materials.toml");

pub fn builtin_materials() -> Vec<Material> {
    registry_parse(BUILTIN_MATERIALS).expect("bundled materials file is valid")
}

pub fn find_material<'a>(materials: &'a [Material], name: &str) -> Option<&'a Material> {
    materials.iter().find(|m| m.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn model_examples() {
        let c = PermittivityModel::constant(2.25);
        assert_eq!(c.permittivity_at(1e15).unwrap(), 2.25);

        let l = PermittivityModel::lorentz(vec![Oscillator {
            strength: 1.0,
            frequency: 1e16,
            damping: 0.0,
        }]);
        assert!((l.permittivity_at(1e16).unwrap() - 1.5).abs() < 1e-15);
        assert_eq!(l.permittivity_at(0.0).unwrap(), 2.0);

        let d = PermittivityModel::drude(1e16, 0.0);
        assert!((d.permittivity_at(1e16).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        let c = PermittivityModel::constant(2.0);
        assert_eq!(
            c.permittivity_at(-1.0),
            Err(DielectricError::NegativeFrequency(-1.0))
        );
        assert!(c.permittivity_at(f64::NAN).is_err());
        let d = PermittivityModel::drude(1e16, 0.0);
        assert_eq!(d.permittivity_at(0.0), Err(DielectricError::DrudePole));
        // damped Drude still diverges at zero frequency
        let d = PermittivityModel::drude(1e16, 1e14);
        assert_eq!(d.permittivity_at(0.0), Err(DielectricError::DrudePole));
        assert!(d.static_value().is_none());
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        assert!(PermittivityModel::constant(0.0).validate().is_err());
        assert!(PermittivityModel::constant(-2.0).validate().is_err());
        assert!(PermittivityModel::drude(0.0, 0.0).validate().is_err());
        assert!(PermittivityModel::drude(1e16, -1.0).validate().is_err());
        let bad = PermittivityModel::lorentz(vec![Oscillator {
            strength: -0.1,
            frequency: 1e16,
            damping: 0.0,
        }]);
        assert!(bad.validate().is_err());
    }

    #[test]
    fn registry_single_constant() {
        let text = r#"
[[material]]
name = "toluene"
model = "constant"
eps = 2.25
"#;
        let mats = registry_parse(text).unwrap();
        assert_eq!(mats.len(), 1);
        assert_eq!(mats[0].name, "toluene");
        for xi in [0.0, 1e12, 1e15, 1e18] {
            assert_eq!(mats[0].model.permittivity_at(xi).unwrap(), 2.25);
        }
    }

    #[test]
    fn registry_empty() {
        assert!(registry_parse("").unwrap().is_empty());
    }

    #[test]
    fn registry_duplicate_name() {
        let text = r#"
[[material]]
name = "x"
model = "constant"
eps = 2.0

[[material]]
name = "x"
model = "constant"
eps = 3.0
"#;
        assert!(matches!(
            registry_parse(text),
            Err(RegistryError::DuplicateName(n)) if n == "x"
        ));
    }

    #[test]
    fn registry_rejects_unknown_and_misplaced_fields() {
        let unknown = "[[material]]\nname = \"a\"\nmodel = \"constant\"\neps = 2.0\ncolour = 1\n";
        let err = registry_parse(unknown).unwrap_err().to_string();
        assert!(err.contains("colour"), "{err}");
        assert!(err.contains("line 5"), "{err}");

        let misplaced =
            "[[material]]\nname = \"a\"\nmodel = \"constant\"\neps = 2.0\ndamping = 1.0\n";
        let err = registry_parse(misplaced).unwrap_err().to_string();
        assert!(err.contains("damping"), "{err}");

        let missing = "[[material]]\nname = \"a\"\nmodel = \"drude\"\n";
        assert!(registry_parse(missing).is_err());

        let unknown_model = "[[material]]\nname = \"a\"\nmodel = \"debye\"\n";
        assert!(registry_parse(unknown_model).is_err());
    }

    #[test]
    fn registry_dispersive_models() {
        let text = r#"
[[material]]
name = "metal"
model = "drude"
plasma_frequency = 1.37e16
damping = 5.32e13

[[material]]
name = "water-uv"
model = "lorentz"
oscillators = [
  { strength = 0.8, frequency = 2.0e16, damping = 1.0e15 },
  { strength = 0.1, frequency = 5.0e16 },
]
"#;
        let mats = registry_parse(text).unwrap();
        assert_eq!(mats.len(), 2);
        assert!(matches!(mats[0].model, PermittivityModel::Drude { .. }));
        let eps0 = mats[1].model.permittivity_at(0.0).unwrap();
        assert!((eps0 - 1.9).abs() < 1e-12);
    }

    #[test]
    fn builtin_registry_matches_scenario() {
        let mats = builtin_materials();
        let eps = |n: &str| {
            find_material(&mats, n)
                .unwrap()
                .model
                .permittivity_at(1e15)
                .unwrap()
        };
        let tol = eps("toluene");
        assert_eq!(tol, 2.25);
        let delta = 0.09;
        assert!((eps("light-flint-glass") - tol * (1.0 + delta)).abs() < 1e-12);
        assert!((eps("fluorite") - tol * (1.0 - delta)).abs() < 1e-12);
    }

    fn oscillator() -> impl Strategy<Value = Oscillator> {
        (0.0f64..5.0, 1e13f64..1e17, 0.0f64..1e16).prop_map(|(strength, frequency, damping)| {
            Oscillator {
                strength,
                frequency,
                damping,
            }
        })
    }

    proptest! {
        #[test]
        fn lorentz_bounded_and_monotone(
            oscs in prop::collection::vec(oscillator(), 0..5),
            mut xis in prop::collection::vec(0.0f64..1e18, 2..20),
        ) {
            let total: f64 = oscs.iter().map(|o| o.strength).sum();
            let model = PermittivityModel::lorentz(oscs);
            xis.sort_by(f64::total_cmp);
            let vals: Vec<f64> = xis.iter().map(|&x| model.permittivity_at(x).unwrap()).collect();
            for v in &vals {
                prop_assert!(*v >= 1.0);
                prop_assert!(*v <= 1.0 + total + 1e-12);
            }
            for w in vals.windows(2) {
                prop_assert!(w[1] <= w[0] * (1.0 + 1e-14));
            }
        }

        #[test]
        fn drude_positive_and_monotone(
            wp in 1e13f64..1e17,
            gamma in 0.0f64..1e15,
            mut xis in prop::collection::vec(1e10f64..1e18, 2..20),
        ) {
            let model = PermittivityModel::drude(wp, gamma);
            xis.sort_by(f64::total_cmp);
            let vals: Vec<f64> = xis.iter().map(|&x| model.permittivity_at(x).unwrap()).collect();
            for v in &vals {
                prop_assert!(*v > 1.0);
            }
            for w in vals.windows(2) {
                prop_assert!(w[1] <= w[0] * (1.0 + 1e-14));
            }
        }
    }
}
