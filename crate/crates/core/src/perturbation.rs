//! Small-contrast results for the symmetric stack ε₁ = ε₃(1+Δ), ε₂ = ε₃(1−Δ),
//! and the perfect-conductor Casimir pressure they are compared against.
//!
//! To second order in Δ only the first reflection term survives and
//!
//! ```text
//! G ≈ −(Δ/2)² (1 − 1/(2p²))² e^{−x},   H ≈ −(Δ/2)² (1/(2p²))² e^{−x},
//! ```
//!
//! which integrates to the repulsive pressure `23ħcΔ²/(640π²√ε₃ d⁴)`.

use std::f64::consts::PI;

use thiserror::Error;

use crate::constants::PhysicalConstants;
use crate::lifshitz::{force_rational, ForceResult, LifshitzError, StackConfig};
use crate::quadrature::QuadratureSpec;

/// Dimensionless constant of the second-order pressure, `23/(2⁷·5·π²)`.
pub fn second_order_constant() -> f64 {
    23.0 / (128.0 * 5.0 * PI * PI)
}

/// `|P₂ / P_Casimir|` at Δ = 1, ε₃ = 1: `69/(8π⁴)`.
pub fn casimir_ratio_constant() -> f64 {
    69.0 / (8.0 * PI.powi(4))
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PerturbationError {
    #[error("invalid perturbative input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Lifshitz(#[from] LifshitzError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbativeInput {
    /// Relative contrast Δ = δ/ε₃.
    pub delta_rel: f64,
    /// Gap permittivity ε₃.
    pub eps3: f64,
    /// Gap width, m.
    pub gap: f64,
    /// Plate area, m².
    pub area: f64,
}

impl PerturbativeInput {
    pub fn new(delta_rel: f64, eps3: f64, gap: f64, area: f64) -> Self {
        PerturbativeInput {
            delta_rel,
            eps3,
            gap,
            area,
        }
    }

    /// Δ = 0 is accepted and gives a vanishing force.
    pub fn validate(&self) -> Result<(), PerturbationError> {
        let bad = |m: String| Err(PerturbationError::InvalidInput(m));
        if !(self.delta_rel >= 0.0 && self.delta_rel < 1.0) {
            return bad(format!("delta must lie in [0, 1), got {}", self.delta_rel));
        }
        if !(self.eps3.is_finite() && self.eps3 > 0.0) {
            return bad(format!("eps3 must be positive, got {}", self.eps3));
        }
        if !(self.gap.is_finite() && self.gap > 0.0) {
            return bad(format!("gap must be positive, got {}", self.gap));
        }
        if !(self.area.is_finite() && self.area > 0.0) {
            return bad(format!("area must be positive, got {}", self.area));
        }
        Ok(())
    }

    /// The exact constant-ε stack this input approximates.
    pub fn stack(&self) -> StackConfig {
        StackConfig::symmetric_contrast(self.delta_rel, self.eps3, self.gap, self.area)
    }
}

/// Second-order (G₂, H₂) at momentum p ≥ 1 and dimensionless frequency x.
pub fn expand_gh_second_order(p: f64, x: f64, delta_rel: f64) -> (f64, f64) {
    let amp = -(0.5 * delta_rel).powi(2) * (-x).exp();
    let half_inv_p2 = 0.5 / (p * p);
    (amp * (1.0 - half_inv_p2).powi(2), amp * half_inv_p2.powi(2))
}

/// Second-order repulsive force.
pub fn force_perturbative(input: &PerturbativeInput) -> Result<ForceResult, PerturbationError> {
    force_perturbative_with(input, &PhysicalConstants::CODATA_2018)
}

pub fn force_perturbative_with(
    input: &PerturbativeInput,
    constants: &PhysicalConstants,
) -> Result<ForceResult, PerturbationError> {
    input.validate()?;
    let pressure = second_order_constant() * constants.hbar_c() * input.delta_rel.powi(2)
        / (input.eps3.sqrt() * input.gap.powi(4));
    Ok(ForceResult::exact(pressure, input.area))
}

/// Magnitude of the second-order force relative to the perfect-conductor
/// Casimir force at the same gap.
pub fn ratio_to_casimir(delta_rel: f64, eps3: f64) -> Result<f64, PerturbationError> {
    if !(delta_rel >= 0.0 && delta_rel < 1.0 + f64::EPSILON) {
        return Err(PerturbationError::InvalidInput(format!(
            "delta must lie in [0, 1], got {delta_rel}"
        )));
    }
    if !(eps3 > 0.0) {
        return Err(PerturbationError::InvalidInput(format!(
            "eps3 must be positive, got {eps3}"
        )));
    }
    Ok(casimir_ratio_constant() * delta_rel * delta_rel / eps3.sqrt())
}

/// Perfect-conductor pressure `−π²ħc/(240d⁴)`.
pub fn casimir_pressure(constants: &PhysicalConstants, gap: f64) -> f64 {
    -PI * PI * constants.hbar_c() / (240.0 * gap.powi(4))
}

pub fn casimir_ideal(gap: f64, area: f64) -> Result<ForceResult, PerturbationError> {
    casimir_ideal_with(gap, area, &PhysicalConstants::CODATA_2018)
}

pub fn casimir_ideal_with(
    gap: f64,
    area: f64,
    constants: &PhysicalConstants,
) -> Result<ForceResult, PerturbationError> {
    if !(gap.is_finite() && gap > 0.0) {
        return Err(PerturbationError::InvalidInput(format!(
            "gap must be positive, got {gap}"
        )));
    }
    if !(area.is_finite() && area > 0.0) {
        return Err(PerturbationError::InvalidInput(format!(
            "area must be positive, got {area}"
        )));
    }
    Ok(ForceResult::exact(casimir_pressure(constants, gap), area))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Residual {
    /// `force_rational − force_perturbative`, N/m².
    Resolved { residual: f64, noise_floor: f64 },
    NotResolvable { residual: f64, noise_floor: f64 },
}

impl Residual {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Residual::Resolved { residual, .. } => Some(residual),
            Residual::NotResolvable { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualPoint {
    pub delta_rel: f64,
    pub residual: Residual,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualRatio {
    pub delta_rel: f64,
    pub next_delta_rel: f64,
    /// `residual(Δ)/residual(Δ_next)`, `None` if either is unresolvable.
    pub ratio: Option<f64>,
    /// `ln(ratio)/ln(Δ/Δ_next)`; 4 for pure Δ⁴ scaling.
    pub exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualScaling {
    pub points: Vec<ResidualPoint>,
    pub ratios: Vec<ResidualRatio>,
}

/// Tightest relative tolerance the residual check will ask for.
pub const RESIDUAL_MIN_REL_TOL: f64 = 1e-11;

/// Relative tolerance for the exact force at contrast Δ: the residual is
/// O(Δ²) relative to the force, and the integration is held 100× below it.
pub fn residual_rel_tol(delta_rel: f64, spec: &QuadratureSpec) -> f64 {
    (1e-2 * delta_rel * delta_rel)
        .min(spec.rel_tol)
        .max(RESIDUAL_MIN_REL_TOL)
}

/// Fourth-order scaling check of the exact-minus-second-order residual.
///
/// For each Δ the exact force is integrated at [`residual_rel_tol`]; a
/// residual smaller than the larger of ten error bars and the requested
/// tolerance (or the rounding floor of ε₁/ε₃ − 1) is reported as
/// [`Residual::NotResolvable`]. Ratios are formed
/// between consecutive entries of `deltas`.
pub fn residual_scaling_check(
    eps3: f64,
    gap: f64,
    deltas: &[f64],
    spec: &QuadratureSpec,
) -> Result<ResidualScaling, PerturbationError> {
    let mut points = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let input = PerturbativeInput::new(delta, eps3, gap, 1.0);
        input.validate()?;
        let tight = QuadratureSpec {
            rel_tol: residual_rel_tol(delta, spec),
            max_subdivisions: spec.max_subdivisions.max(400),
            ..*spec
        };
        let exact = force_rational(&input.stack(), &tight)?;
        let approx = force_perturbative(&input)?;
        let residual = exact.pressure - approx.pressure;
        // ε₁/ε₃ − 1 carries a rounding error of order ε_mach/Δ relative
        let conditioning = 10.0 * f64::EPSILON / delta;
        let noise_floor = (10.0 * exact.abs_error)
            .max(tight.rel_tol.max(conditioning) * exact.pressure.abs());
        let residual = if residual.abs() > noise_floor {
            Residual::Resolved {
                residual,
                noise_floor,
            }
        } else {
            Residual::NotResolvable {
                residual,
                noise_floor,
            }
        };
        points.push(ResidualPoint {
            delta_rel: delta,
            residual,
        });
    }
    let ratios = points
        .windows(2)
        .map(|w| {
            let ratio = match (w[0].residual.value(), w[1].residual.value()) {
                (Some(a), Some(b)) => Some(a / b),
                _ => None,
            };
            let exponent = ratio.map(|r| r.abs().ln() / (w[0].delta_rel / w[1].delta_rel).ln());
            ResidualRatio {
                delta_rel: w[0].delta_rel,
                next_delta_rel: w[1].delta_rel,
                ratio,
                exponent,
            }
        })
        .collect();
    Ok(ResidualScaling { points, ratios })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifshitz::{reflection_point, SignClass};

    const UM: f64 = 1e-6;

    #[test]
    fn expansion_examples() {
        assert_eq!(expand_gh_second_order(1.3, 0.7, 0.0), (-0.0, -0.0));
        let (g, h) = expand_gh_second_order(1.0, 0.0, 0.2);
        assert!((g + 2.5e-3).abs() < 1e-17);
        assert!((h + 2.5e-3).abs() < 1e-17);
        let (g, h) = expand_gh_second_order(1e9, 0.0, 0.2);
        assert!((g + 0.01).abs() < 1e-15);
        assert!(h.abs() < 1e-30);
    }

    #[test]
    fn expansion_is_never_positive() {
        for p in [1.0, 1.5, 4.0, 100.0] {
            for x in [0.0, 0.3, 5.0] {
                let (g, h) = expand_gh_second_order(p, x, 0.3);
                assert!(g <= 0.0 && h <= 0.0);
            }
        }
    }

    fn exact_gh(delta: f64, eps3: f64, p: f64, x: f64) -> (f64, f64) {
        let stack = StackConfig::symmetric_contrast(delta, eps3, UM, 1.0);
        let c = PhysicalConstants::CODATA_2018.c;
        let xi = x * c / (2.0 * p * eps3.sqrt() * UM);
        let pt = reflection_point(&stack, p, xi).unwrap();
        (pt.g(), pt.h())
    }

    #[test]
    fn expansion_error_is_higher_order() {
        // halving Δ must shrink the remainder by at least ~2³
        for &p in &[1.0, 1.3, 2.0, 5.0, 20.0] {
            for &x in &[0.0, 0.5, 2.0] {
                let rem = |d: f64| {
                    let (g, h) = exact_gh(d, 2.0, p, x);
                    let (g2, h2) = expand_gh_second_order(p, x, d);
                    ((g - g2).abs(), (h - h2).abs())
                };
                let (ga, ha) = rem(0.01);
                let (gb, hb) = rem(0.005);
                let (g2, h2) = expand_gh_second_order(p, x, 0.01);
                assert!(ga <= 0.05 * g2.abs(), "p={p} x={x}");
                assert!(ha <= 0.05 * h2.abs(), "p={p} x={x}");
                assert!(ga / gb > 7.0, "G p={p} x={x}: {}", ga / gb);
                assert!(ha / hb > 7.0, "H p={p} x={x}: {}", ha / hb);
            }
        }
    }

    #[test]
    fn constant_reassembles_from_integrals() {
        // prefactor 1/(2π²) · (Δ/2)² · x-integral Γ(4) · p-integral 23/30 ·
        // Jacobian 1/16 from ξ³dξ = x³dx c⁴/(16p⁴ε²d⁴)
        let rebuilt = (1.0 / (2.0 * PI * PI)) * 0.25 * 6.0 * (23.0 / 30.0) / 16.0;
        assert!((rebuilt - second_order_constant()).abs() <= f64::EPSILON * rebuilt);
    }

    #[test]
    fn perturbative_examples() {
        let base = force_perturbative(&PerturbativeInput::new(0.09, 2.25, UM, 1e-4)).unwrap();
        let cgs = base.pressure * 10.0;
        assert!(cgs > 6.1e-6 && cgs < 6.3e-6, "{cgs}");
        assert_eq!(base.sign_class, SignClass::Repulsive);

        let zero = force_perturbative(&PerturbativeInput::new(0.0, 2.25, UM, 1e-4)).unwrap();
        assert_eq!(zero.pressure, 0.0);
        assert_eq!(zero.sign_class, SignClass::Null);

        let half = force_perturbative(&PerturbativeInput::new(0.09, 2.25, 0.5 * UM, 1e-4)).unwrap();
        assert!((half.pressure / base.pressure - 16.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_perturbative_input() {
        for input in [
            PerturbativeInput::new(-0.1, 2.0, UM, 1.0),
            PerturbativeInput::new(1.0, 2.0, UM, 1.0),
            PerturbativeInput::new(0.1, 0.0, UM, 1.0),
            PerturbativeInput::new(0.1, 2.0, 0.0, 1.0),
            PerturbativeInput::new(0.1, 2.0, UM, 0.0),
        ] {
            assert!(force_perturbative(&input).is_err(), "{input:?}");
        }
    }

    #[test]
    fn ratio_examples() {
        let r = ratio_to_casimir(1.0, 1.0).unwrap();
        assert_eq!(format!("{r:.4}"), "0.0885");
        assert!((r - 0.088544).abs() < 1e-6, "{r}");
        let r = ratio_to_casimir(0.09, 2.25).unwrap();
        assert!((r - 4.78e-4).abs() < 0.01e-4, "{r}");
        assert_eq!(ratio_to_casimir(0.0, 2.0).unwrap(), 0.0);
        assert!(ratio_to_casimir(0.5, 0.0).is_err());
    }

    #[test]
    fn ratio_times_casimir_is_perturbative() {
        for &(d, e, gap) in &[(0.09, 2.25, UM), (0.3, 1.0, 2e-7), (0.01, 4.0, 3e-6)] {
            let pc = casimir_ideal(gap, 1.0).unwrap().pressure;
            let pp = force_perturbative(&PerturbativeInput::new(d, e, gap, 1.0))
                .unwrap()
                .pressure;
            let lhs = ratio_to_casimir(d, e).unwrap() * pc.abs();
            assert!((lhs - pp).abs() <= 4.0 * f64::EPSILON * pp, "{lhs} {pp}");
        }
    }

    #[test]
    fn casimir_examples() {
        let f = casimir_ideal(UM, 1e-4).unwrap();
        let dyn_force = f.force * 1e5;
        assert!((dyn_force + 0.013).abs() < 0.013 * 0.01, "{dyn_force}");
        assert_eq!(f.sign_class, SignClass::Attractive);
        let f2 = casimir_ideal(2.0 * UM, 1e-4).unwrap();
        assert!((f.pressure / f2.pressure - 16.0).abs() < 1e-12);
        let big = casimir_ideal(UM, 2e-4).unwrap();
        assert_eq!(big.pressure, f.pressure);
        assert_eq!(big.force, 2.0 * f.force);
        assert!(casimir_ideal(0.0, 1.0).is_err());
    }

    #[test]
    fn residual_single_entry_has_no_ratios() {
        let r = residual_scaling_check(2.0, UM, &[0.1], &QuadratureSpec::default()).unwrap();
        assert_eq!(r.points.len(), 1);
        assert!(r.ratios.is_empty());
    }

    #[test]
    fn residual_tiny_delta_not_resolvable() {
        let r = residual_scaling_check(2.0, UM, &[1e-6], &QuadratureSpec::default()).unwrap();
        assert!(
            matches!(r.points[0].residual, Residual::NotResolvable { .. }),
            "{:?}",
            r.points[0]
        );
    }
}
