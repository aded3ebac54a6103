//! Zero-temperature Lifshitz force between two dielectric half-spaces
//! separated by a dielectric gap.
//!
//! With p ≥ 1 and the dimensionless frequency `x = 2ξp√ε₃(0)·d/c`, the
//! pressure is
//!
//! ```text
//! P = −ħc/(32π²d⁴) ∫₁^∞ dp p⁻² ∫₀^∞ dx x³ w(x) [G/(1−G) + H/(1−H)]
//! ```
//!
//! where `w = ε₃(iξ)^{3/2} / ε₃(0)²` (just `1/√ε₃` for a constant gap) and
//! G, H are the TM- and TE-like round-trip reflection products.
//!
//! Sign convention: a negative pressure attracts the plates, a positive one
//! pushes them apart.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::constants::PhysicalConstants;
use crate::dielectric::{DielectricError, PermittivityModel};
use crate::quadrature::{
    integrate_unit_to_inf_with, integrate_zero_to_inf_with, IntegralEstimate, QuadratureError,
    QuadratureSpec, Sample,
};

/// Pressures below this magnitude are never given a sign (N/m²).
pub const PRESSURE_ZERO_FLOOR: f64 = 1e-30;

/// Hard cap on the number of reflection-series terms.
pub const MAX_SERIES_TERMS: usize = 5000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LifshitzError {
    #[error("invalid stack: {0}")]
    InvalidStack(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Dielectric(#[from] DielectricError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(
        "force integral did not converge after {subdivisions} subdivisions \
         (partial pressure {} ± {} N/m²)",
        partial.pressure, partial.abs_error
    )]
    NonConvergence {
        partial: ForceResult,
        subdivisions: usize,
    },
    #[error("inner frequency integral did not converge at p = {p}")]
    InnerNonConvergence { p: f64 },
    #[error("reflection series did not reach the requested tolerance within {terms} terms")]
    SeriesNotConverged { terms: usize, partial: ForceResult },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StackConfig {
    /// Half-space 1.
    pub eps1: PermittivityModel,
    /// Half-space 2.
    pub eps2: PermittivityModel,
    /// Gap medium.
    pub eps3: PermittivityModel,
    /// Gap width in m.
    pub gap: f64,
    /// Plate area in m².
    pub area: f64,
}

impl StackConfig {
    pub fn new(
        eps1: PermittivityModel,
        eps2: PermittivityModel,
        eps3: PermittivityModel,
        gap: f64,
        area: f64,
    ) -> Self {
        StackConfig {
            eps1,
            eps2,
            eps3,
            gap,
            area,
        }
    }

    /// Frequency-independent stack.
    pub fn constant(eps1: f64, eps2: f64, eps3: f64, gap: f64, area: f64) -> Self {
        Self::new(
            PermittivityModel::constant(eps1),
            PermittivityModel::constant(eps2),
            PermittivityModel::constant(eps3),
            gap,
            area,
        )
    }

    /// ε₁ = ε₃(1+Δ), ε₂ = ε₃(1−Δ).
    pub fn symmetric_contrast(delta_rel: f64, eps3: f64, gap: f64, area: f64) -> Self {
        Self::constant(eps3 * (1.0 + delta_rel), eps3 * (1.0 - delta_rel), eps3, gap, area)
    }

    pub fn validate(&self) -> Result<(), LifshitzError> {
        if !(self.gap.is_finite() && self.gap > 0.0) {
            return Err(LifshitzError::InvalidStack(format!(
                "gap must be positive, got {}",
                self.gap
            )));
        }
        if !(self.area.is_finite() && self.area > 0.0) {
            return Err(LifshitzError::InvalidStack(format!(
                "area must be positive, got {}",
                self.area
            )));
        }
        self.eps1.validate()?;
        self.eps2.validate()?;
        self.eps3.validate()?;
        if self.static_gap_permittivity().is_none() {
            return Err(LifshitzError::InvalidStack(
                "gap medium needs a finite static permittivity".into(),
            ));
        }
        Ok(())
    }

    fn static_gap_permittivity(&self) -> Option<f64> {
        self.eps3.static_value().filter(|e| e.is_finite() && *e > 0.0)
    }

    pub fn is_dispersive(&self) -> bool {
        self.eps1.is_dispersive() || self.eps2.is_dispersive() || self.eps3.is_dispersive()
    }

    /// Swap the two half-spaces.
    pub fn mirrored(&self) -> Self {
        StackConfig {
            eps1: self.eps2.clone(),
            eps2: self.eps1.clone(),
            ..self.clone()
        }
    }

    pub fn with_gap(&self, gap: f64) -> Self {
        StackConfig {
            gap,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SignClass {
    Attractive,
    Repulsive,
    Null,
}

impl std::fmt::Display for SignClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SignClass::Attractive => "Attractive",
            SignClass::Repulsive => "Repulsive",
            SignClass::Null => "Null",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForceResult {
    /// Signed pressure, N/m². Negative is attraction.
    pub pressure: f64,
    /// Signed total force, N.
    pub force: f64,
    pub sign_class: SignClass,
    /// Absolute error estimate of `pressure`, N/m².
    pub abs_error: f64,
    pub rel_error: f64,
    pub evaluations: usize,
}

impl ForceResult {
    pub fn new(pressure: f64, area: f64, abs_error: f64, evaluations: usize) -> Self {
        // no signed zeros in reports
        let pressure = if pressure == 0.0 { 0.0 } else { pressure };
        let rel_error = if pressure == 0.0 {
            0.0
        } else {
            abs_error / pressure.abs()
        };
        let mut r = ForceResult {
            pressure,
            force: pressure * area,
            sign_class: SignClass::Null,
            abs_error,
            rel_error,
            evaluations,
        };
        r.sign_class = classify_sign(&r);
        r
    }

    pub fn exact(pressure: f64, area: f64) -> Self {
        Self::new(pressure, area, 0.0, 1)
    }
}

/// Threshold below which a pressure counts as zero.
pub fn zero_tolerance(abs_error: f64) -> f64 {
    (10.0 * abs_error).max(PRESSURE_ZERO_FLOOR)
}

pub fn classify_sign(result: &ForceResult) -> SignClass {
    let tol = zero_tolerance(result.abs_error);
    if result.pressure < -tol {
        SignClass::Attractive
    } else if result.pressure > tol {
        SignClass::Repulsive
    } else {
        SignClass::Null
    }
}

/// `sqrt(p² − 1 + ε_j/ε₃)`.
pub fn s_parameter(p: f64, eps_ratio: f64) -> Result<f64, LifshitzError> {
    if !(p >= 1.0) {
        return Err(LifshitzError::Domain(format!("p must be at least 1, got {p}")));
    }
    if !(eps_ratio > 0.0) {
        return Err(LifshitzError::Domain(format!(
            "permittivity ratio must be positive, got {eps_ratio}"
        )));
    }
    Ok(s_unchecked(p, eps_ratio))
}

fn s_unchecked(p: f64, ratio: f64) -> f64 {
    // p² − 1 + r, written so that large p does not cancel the small terms
    ((p - 1.0) * (p + 1.0) + ratio).sqrt()
}

/// TM-like interface factor `(s − r p)/(s + r p)` with r = ε_j/ε₃.
///
/// The numerator is expanded as `(1 − r)(p²(1 + r) − 1)/(s + r p)` so it is
/// exactly zero when r = 1.
pub fn tm_factor(p: f64, ratio: f64) -> f64 {
    let s = s_unchecked(p, ratio);
    let sum = s + ratio * p;
    (1.0 - ratio) * (p * p * (1.0 + ratio) - 1.0) / (sum * sum)
}

/// TE-like interface factor `(s − p)/(s + p)`, numerator `(r − 1)/(s + p)`.
pub fn te_factor(p: f64, ratio: f64) -> f64 {
    let s = s_unchecked(p, ratio);
    let sum = s + p;
    (ratio - 1.0) / (sum * sum)
}

/// The two reflection products at one (p, ξ) node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrandPoint {
    pub p: f64,
    pub xi: f64,
    pub s1: f64,
    pub s2: f64,
    /// Product of the TM-like interface factors, without the exponential.
    pub tm: f64,
    /// Product of the TE-like interface factors, without the exponential.
    pub te: f64,
    /// Round-trip exponent `2ξp√ε₃(iξ)·d/c`.
    pub exponent: f64,
}

impl IntegrandPoint {
    pub fn g(&self) -> f64 {
        self.tm * (-self.exponent).exp()
    }

    pub fn h(&self) -> f64 {
        self.te * (-self.exponent).exp()
    }
}

/// Evaluates s₁, s₂ and the reflection products from permittivities.
fn point_from_eps(p: f64, xi: f64, eps: [f64; 3], exponent: f64) -> IntegrandPoint {
    let [e1, e2, e3] = eps;
    let (r1, r2) = (e1 / e3, e2 / e3);
    IntegrandPoint {
        p,
        xi,
        s1: s_unchecked(p, r1),
        s2: s_unchecked(p, r2),
        tm: tm_factor(p, r1) * tm_factor(p, r2),
        te: te_factor(p, r1) * te_factor(p, r2),
        exponent,
    }
}

fn permittivities(stack: &StackConfig, xi: f64) -> Result<[f64; 3], LifshitzError> {
    Ok([
        stack.eps1.permittivity_at(xi)?,
        stack.eps2.permittivity_at(xi)?,
        stack.eps3.permittivity_at(xi)?,
    ])
}

/// Reflection products G and H at physical imaginary frequency ξ (rad/s).
pub fn reflection_point(
    stack: &StackConfig,
    p: f64,
    xi: f64,
) -> Result<IntegrandPoint, LifshitzError> {
    if !(p >= 1.0) {
        return Err(LifshitzError::Domain(format!("p must be at least 1, got {p}")));
    }
    let eps = permittivities(stack, xi)?;
    let c = PhysicalConstants::CODATA_2018.c;
    let exponent = 2.0 * xi * p * eps[2].sqrt() * stack.gap / c;
    Ok(point_from_eps(p, xi, eps, exponent))
}

/// `(G, H)` at (p, ξ).
pub fn reflection_factors(
    stack: &StackConfig,
    p: f64,
    xi: f64,
) -> Result<(f64, f64), LifshitzError> {
    let pt = reflection_point(stack, p, xi)?;
    Ok((pt.g(), pt.h()))
}

/// `q/(1 − q)` for `q = amp·e^{−a}`, with `1 − q` formed without cancelling
/// `1 − e^{−a}` when `a` is small.
fn ratio_term(amp: f64, a: f64) -> f64 {
    if amp == 0.0 {
        return 0.0;
    }
    let q = amp * (-a).exp();
    let one_minus = (1.0 - amp) - amp * (-a).exp_m1();
    q / one_minus
}

/// Which terms of `G/(1−G) + H/(1−H)` an integral collects.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Kernel {
    Rational,
    /// `G^{n+1} + H^{n+1}`.
    SeriesTerm(u32),
}

/// Dimensionless integrand of the force in the (p, x) variables, without
/// the p⁻² weight:
/// `x³ w(x) K(p, x)`.
struct ForceIntegrand<'a> {
    stack: &'a StackConfig,
    eps3_static: f64,
    /// ξ = xi_per_x · x / p
    xi_per_x: f64,
    constant: Option<[f64; 3]>,
    kernel: Kernel,
}

impl<'a> ForceIntegrand<'a> {
    fn new(stack: &'a StackConfig, kernel: Kernel) -> Result<Self, LifshitzError> {
        stack.validate()?;
        let eps3_static = stack
            .static_gap_permittivity()
            .expect("validated stack has a static gap permittivity");
        let c = PhysicalConstants::CODATA_2018.c;
        let constant = if stack.is_dispersive() {
            None
        } else {
            Some(permittivities(stack, 0.0)?)
        };
        Ok(ForceIntegrand {
            stack,
            eps3_static,
            xi_per_x: c / (2.0 * eps3_static.sqrt() * stack.gap),
            constant,
            kernel,
        })
    }

    fn point(&self, p: f64, x: f64) -> Result<(IntegrandPoint, f64), LifshitzError> {
        let xi = self.xi_per_x * x / p;
        let eps = match self.constant {
            Some(eps) => eps,
            None => permittivities(self.stack, xi)?,
        };
        let q = (eps[2] / self.eps3_static).sqrt();
        let weight = eps[2].powf(1.5) / (self.eps3_static * self.eps3_static);
        Ok((point_from_eps(p, xi, eps, x * q), weight))
    }

    fn eval(&self, p: f64, x: f64) -> Result<f64, LifshitzError> {
        if x == 0.0 {
            return Ok(0.0);
        }
        let (pt, weight) = self.point(p, x)?;
        debug_assert!(pt.g().abs() < 1.0 && pt.h().abs() < 1.0, "{pt:?}");
        let k = match self.kernel {
            Kernel::Rational => ratio_term(pt.tm, pt.exponent) + ratio_term(pt.te, pt.exponent),
            Kernel::SeriesTerm(n) => {
                let m = n as i32 + 1;
                let decay = (-(m as f64) * pt.exponent).exp();
                (pt.tm.powi(m) + pt.te.powi(m)) * decay
            }
        };
        Ok(x * x * x * weight * k)
    }

    /// ∫₁^∞ dp p⁻² ∫₀^∞ dx x³ w K, nested adaptively.
    fn integrate(&self, spec: &QuadratureSpec) -> Result<IntegralEstimate, LifshitzError> {
        let inner_spec = spec.inner();
        integrate_unit_to_inf_with(
            |p| {
                let inner = integrate_zero_to_inf_with(
                    |x| self.eval(p, x).map(Sample::exact),
                    &inner_spec,
                )
                .map_err(|e| match e {
                    LifshitzError::Quadrature(QuadratureError::NonConvergence { .. }) => {
                        LifshitzError::InnerNonConvergence { p }
                    }
                    other => other,
                })?;
                let w = 1.0 / (p * p);
                Ok::<_, LifshitzError>(Sample {
                    value: inner.value * w,
                    error: inner.abs_error_estimate * w,
                    evaluations: inner.evaluations,
                })
            },
            spec,
        )
    }
}

/// `−ħc/(32π²d⁴)`: converts the dimensionless double integral into N/m².
pub fn pressure_prefactor(constants: &PhysicalConstants, gap: f64) -> f64 {
    -constants.hbar_c() / (32.0 * PI * PI * gap.powi(4))
}

/// The dimensionless double integral of `G/(1−G) + H/(1−H)`.
pub fn rational_integral(
    stack: &StackConfig,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate, LifshitzError> {
    ForceIntegrand::new(stack, Kernel::Rational)?.integrate(spec)
}

/// The dimensionless integrand behind [`rational_integral`], as a function
/// of (p, x) including the p⁻² weight. Intended for independent
/// cross-checks.
pub fn rational_integrand(
    stack: &StackConfig,
) -> Result<impl Fn(f64, f64) -> f64 + '_, LifshitzError> {
    let integrand = ForceIntegrand::new(stack, Kernel::Rational)?;
    Ok(move |p: f64, x: f64| {
        integrand
            .eval(p, x)
            .map(|v| v / (p * p))
            .unwrap_or(f64::NAN)
    })
}

fn to_force(
    est: IntegralEstimate,
    stack: &StackConfig,
    constants: &PhysicalConstants,
) -> ForceResult {
    let pre = pressure_prefactor(constants, stack.gap);
    ForceResult::new(
        pre * est.value,
        stack.area,
        pre.abs() * est.abs_error_estimate,
        est.evaluations,
    )
}

fn with_partial(
    err: LifshitzError,
    stack: &StackConfig,
    constants: &PhysicalConstants,
) -> LifshitzError {
    match err {
        LifshitzError::Quadrature(QuadratureError::NonConvergence { best, subdivisions }) => {
            LifshitzError::NonConvergence {
                partial: to_force(best, stack, constants),
                subdivisions,
            }
        }
        other => other,
    }
}

/// Force from the closed `G/(1−G) + H/(1−H)` integrand.
pub fn force_rational(
    stack: &StackConfig,
    spec: &QuadratureSpec,
) -> Result<ForceResult, LifshitzError> {
    force_rational_with(stack, spec, &PhysicalConstants::CODATA_2018)
}

pub fn force_rational_with(
    stack: &StackConfig,
    spec: &QuadratureSpec,
    constants: &PhysicalConstants,
) -> Result<ForceResult, LifshitzError> {
    match rational_integral(stack, spec) {
        Ok(est) => Ok(to_force(est, stack, constants)),
        Err(e) => Err(with_partial(e, stack, constants)),
    }
}

/// Dimensionless integral of the single series term `G^{n+1} + H^{n+1}`.
pub fn series_term_integral(
    stack: &StackConfig,
    spec: &QuadratureSpec,
    n: u32,
) -> Result<IntegralEstimate, LifshitzError> {
    ForceIntegrand::new(stack, Kernel::SeriesTerm(n))?.integrate(spec)
}

/// Upper bound on the magnitude of the TM and TE interface factors of one
/// half-space over all p ≥ 1, given the permittivity ratio r = ε_j/ε₃.
pub fn interface_factor_bound(ratio: f64) -> f64 {
    (1.0 - ratio).abs() / (1.0 + ratio)
}

/// Bound on the dimensionless contribution of all series terms beyond
/// `n_max`, i.e. of `Σ_{k ≥ n_max+2} ∫∫ p⁻² x³ w (|G|^k + |H|^k)`.
///
/// Uses `|G|, |H| ≤ ρ e^{−x q}` with ρ the product of the interface bounds
/// and `∫x³e^{−kx} = 6/k⁴`. Dispersive stacks fall back to ρ = 1 and the
/// slowest possible decay.
pub fn series_tail_bound(stack: &StackConfig, n_max: usize) -> Result<f64, LifshitzError> {
    stack.validate()?;
    let eps3_static = stack.static_gap_permittivity().unwrap();
    let (rho, scale) = if stack.is_dispersive() {
        (1.0, eps3_static.powf(1.5))
    } else {
        let [e1, e2, e3] = permittivities(stack, 0.0)?;
        (
            interface_factor_bound(e1 / e3) * interface_factor_bound(e2 / e3),
            1.0 / e3.sqrt(),
        )
    };
    if rho == 0.0 {
        return Ok(0.0);
    }
    let first = n_max + 2;
    const EXPLICIT: usize = 20_000;
    let mut sum = 0.0;
    let mut pow = rho.powi(first as i32);
    for k in first..first + EXPLICIT {
        let kf = k as f64;
        sum += pow / (kf * kf * kf * kf);
        pow *= rho;
        if pow == 0.0 {
            break;
        }
    }
    // Σ_{k ≥ M} ρ^k/k⁴ ≤ ρ^M/(3(M−1)³)
    let m = (first + EXPLICIT) as f64;
    if pow > 0.0 {
        sum += pow / (3.0 * (m - 1.0).powi(3));
    }
    Ok(scale * 2.0 * 6.0 * sum)
}

fn sum_series(
    stack: &StackConfig,
    spec: &QuadratureSpec,
    constants: &PhysicalConstants,
    terms: impl Iterator<Item = u32>,
    mut stop: impl FnMut(u32, f64) -> bool,
) -> Result<(ForceResult, u32, bool), LifshitzError> {
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evals = 0;
    let mut last = 0;
    let mut stopped = false;
    for n in terms {
        let est = series_term_integral(stack, spec, n)
            .map_err(|e| with_partial(e, stack, constants))?;
        value += est.value;
        error += est.abs_error_estimate;
        evals += est.evaluations;
        last = n;
        if stop(n, value) {
            stopped = true;
            break;
        }
    }
    let tail = series_tail_bound(stack, last as usize)?;
    let est = IntegralEstimate {
        value,
        abs_error_estimate: error + tail,
        evaluations: evals,
    };
    Ok((to_force(est, stack, constants), last, stopped))
}

/// Force from the reflection series `Σ_{n=0}^{n_max} (G^{n+1} + H^{n+1})`,
/// each term a separate double integral. The reported error includes the
/// bound on the truncated tail.
pub fn force_series(
    stack: &StackConfig,
    spec: &QuadratureSpec,
    n_max: u32,
) -> Result<ForceResult, LifshitzError> {
    force_series_with(stack, spec, n_max, &PhysicalConstants::CODATA_2018)
}

pub fn force_series_with(
    stack: &StackConfig,
    spec: &QuadratureSpec,
    n_max: u32,
    constants: &PhysicalConstants,
) -> Result<ForceResult, LifshitzError> {
    sum_series(stack, spec, constants, 0..=n_max, |_, _| false).map(|(r, _, _)| r)
}

/// Sums series terms until the tail bound drops below `rel_tol` of the
/// running total. Returns the result and the last term index used.
pub fn force_series_converged(
    stack: &StackConfig,
    spec: &QuadratureSpec,
) -> Result<(ForceResult, u32), LifshitzError> {
    let tails = |n: u32| series_tail_bound(stack, n as usize).unwrap_or(f64::INFINITY);
    if tails(0) == 0.0 {
        let (r, n, _) = sum_series(
            stack,
            spec,
            &PhysicalConstants::CODATA_2018,
            0..1,
            |_, _| true,
        )?;
        return Ok((r, n));
    }
    let (r, n, stopped) = sum_series(
        stack,
        spec,
        &PhysicalConstants::CODATA_2018,
        0..MAX_SERIES_TERMS as u32,
        |n, total| tails(n) <= spec.rel_tol * total.abs(),
    )?;
    if stopped {
        Ok((r, n))
    } else {
        Err(LifshitzError::SeriesNotConverged {
            terms: MAX_SERIES_TERMS,
            partial: r,
        })
    }
}
