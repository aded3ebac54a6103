//! Adaptive Gauss–Kronrod (7/15) integration on semi-infinite ranges and a
//! brute-force composite Simpson oracle for cross-checks.
//!
//! Both semi-infinite ranges are mapped onto `(0, 1]` and integrated with
//! bisection of the panel carrying the largest error estimate. Integrands
//! may themselves be integrals: a [`Sample`] carries its own error, which is
//! propagated through the Kronrod weights into the outer estimate.

use thiserror::Error;

/// Kronrod abscissae on [-1, 1] (non-negative half, descending).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Smallest panel width that is still bisected.
const MIN_PANEL_WIDTH: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Relative tolerance, in (0, 1e-2].
    pub rel_tol: f64,
    /// Absolute tolerance floor in integrand units.
    pub abs_tol: f64,
    /// Maximum number of panels per integral, at least 10.
    pub max_subdivisions: usize,
    /// Total tensor-grid points used by [`oracle_double_integral`].
    pub oracle_grid_points: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-8,
            abs_tol: 1e-30,
            max_subdivisions: 200,
            oracle_grid_points: 400_000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadratureSpec {
            rel_tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return Err(QuadratureError::InvalidSpec(format!(
                "rel_tol must lie in (0, 1e-2], got {}",
                self.rel_tol
            )));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(QuadratureError::InvalidSpec(format!(
                "abs_tol must be non-negative, got {}",
                self.abs_tol
            )));
        }
        if self.max_subdivisions < 10 {
            return Err(QuadratureError::InvalidSpec(format!(
                "max_subdivisions must be at least 10, got {}",
                self.max_subdivisions
            )));
        }
        Ok(())
    }

    /// Spec for an integral nested inside an outer one.
    pub fn inner(&self) -> QuadratureSpec {
        QuadratureSpec {
            rel_tol: self.rel_tol / 10.0,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IntegralEstimate {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

impl IntegralEstimate {
    pub fn rel_error(&self) -> f64 {
        if self.value == 0.0 {
            if self.abs_error_estimate == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.abs_error_estimate / self.value.abs()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),
    #[error(
        "no convergence after {subdivisions} subdivisions: best estimate {} ± {}",
        best.value, best.abs_error_estimate
    )]
    NonConvergence {
        best: IntegralEstimate,
        subdivisions: usize,
    },
    #[error("integrand is not finite at {at}")]
    NonFinite { at: f64 },
}

/// One integrand evaluation: a value, its own uncertainty, and the number of
/// primitive evaluations it cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

impl Sample {
    pub fn exact(value: f64) -> Self {
        Sample {
            value,
            error: 0.0,
            evaluations: 1,
        }
    }
}

impl From<IntegralEstimate> for Sample {
    fn from(e: IntegralEstimate) -> Self {
        Sample {
            value: e.value,
            error: e.abs_error_estimate,
            evaluations: e.evaluations,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// QUADPACK error rescaling for the 7/15 pair.
fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

fn gk15_panel<F, E>(f: &mut F, a: f64, b: f64, evals: &mut usize) -> Result<Panel, E>
where
    F: FnMut(f64) -> Result<Sample, E>,
    E: From<QuadratureError>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut values = [0.0f64; 15];
    let mut propagated = 0.0;
    for i in 0..15 {
        let x = if i < 7 {
            center - half * XGK[i]
        } else if i == 7 {
            center
        } else {
            center + half * XGK[14 - i]
        };
        let s = f(x)?;
        if !s.value.is_finite() || !s.error.is_finite() {
            return Err(QuadratureError::NonFinite { at: x }.into());
        }
        *evals += s.evaluations;
        values[i] = s.value;
        let w = WGK[if i <= 7 { i } else { 14 - i }];
        propagated += w * s.error;
    }

    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    let mut resabs = 0.0;
    for i in 0..15 {
        let k = if i <= 7 { i } else { 14 - i };
        kronrod += WGK[k] * values[i];
        resabs += WGK[k] * values[i].abs();
        if k % 2 == 1 {
            gauss += WG[k / 2] * values[i];
        }
    }
    let mean = 0.5 * kronrod;
    let mut resasc = 0.0;
    for i in 0..15 {
        let k = if i <= 7 { i } else { 14 - i };
        resasc += WGK[k] * (values[i] - mean).abs();
    }
    let err = rescale_error((kronrod - gauss) * half, resabs * half, resasc * half);
    Ok(Panel {
        a,
        b,
        value: kronrod * half,
        error: err + propagated * half,
    })
}

/// Neumaier-compensated sum in panel order.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Adaptive integration over `[a, b]` of an integrand that may carry its
/// own error. Panels are kept sorted by position so the final sum does not
/// depend on the refinement history.
pub fn integrate_interval<F, E>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate, E>
where
    F: FnMut(f64) -> Result<Sample, E>,
    E: From<QuadratureError>,
{
    spec.validate()?;
    let mut evals = 0usize;
    let mut panels = vec![gk15_panel(&mut f, a, b, &mut evals)?];

    loop {
        let value = compensated_sum(panels.iter().map(|p| p.value));
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let estimate = IntegralEstimate {
            value,
            abs_error_estimate: error,
            evaluations: evals,
        };
        if error <= spec.abs_tol.max(spec.rel_tol * value.abs()) {
            return Ok(estimate);
        }

        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, be), (i, p)| {
                if p.error > be {
                    (i, p.error)
                } else {
                    (bi, be)
                }
            });
        let target = panels[worst];
        if panels.len() >= spec.max_subdivisions || target.b - target.a < MIN_PANEL_WIDTH {
            return Err(QuadratureError::NonConvergence {
                best: estimate,
                subdivisions: panels.len(),
            }
            .into());
        }
        let mid = 0.5 * (target.a + target.b);
        let left = gk15_panel(&mut f, target.a, mid, &mut evals)?;
        let right = gk15_panel(&mut f, mid, target.b, &mut evals)?;
        panels.splice(worst..=worst, [left, right]);
    }
}

/// ∫₁^∞ f(p) dp with an integrand that carries its own error, via p = 1/t.
pub fn integrate_unit_to_inf_with<F, E>(
    mut f: F,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate, E>
where
    F: FnMut(f64) -> Result<Sample, E>,
    E: From<QuadratureError>,
{
    integrate_interval(
        |t: f64| {
            let jac = 1.0 / (t * t);
            let s = f(1.0 / t)?;
            Ok(Sample {
                value: s.value * jac,
                error: s.error * jac,
                evaluations: s.evaluations,
            })
        },
        0.0,
        1.0,
        spec,
    )
}

/// ∫₀^∞ f(x) dx with an integrand that carries its own error, via
/// x = (1 − t)/t.
pub fn integrate_zero_to_inf_with<F, E>(
    mut f: F,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate, E>
where
    F: FnMut(f64) -> Result<Sample, E>,
    E: From<QuadratureError>,
{
    integrate_interval(
        |t: f64| {
            let x = (1.0 - t) / t;
            let jac = 1.0 / (t * t);
            let s = f(x)?;
            let value = if s.value == 0.0 { 0.0 } else { s.value * jac };
            Ok(Sample {
                value,
                error: s.error * jac,
                evaluations: s.evaluations,
            })
        },
        0.0,
        1.0,
        spec,
    )
}

/// ∫₁^∞ f(p) dp. `f` should decay at least as p⁻².
pub fn integrate_unit_to_inf<F>(
    f: F,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    integrate_unit_to_inf_with(|p| Ok::<_, QuadratureError>(Sample::exact(f(p))), spec)
}

/// ∫₀^∞ f(x) dx for integrands decaying exponentially.
pub fn integrate_zero_to_inf<F>(
    f: F,
    spec: &QuadratureSpec,
) -> Result<IntegralEstimate, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    integrate_zero_to_inf_with(|x| Ok::<_, QuadratureError>(Sample::exact(f(x))), spec)
}

/// Where the oracle truncates the x axis: e^{-37} < 1e-16.
pub const ORACLE_X_MAX: f64 = 37.0;
/// Stand-in for the t = 0 (p = ∞) edge of the oracle grid.
pub const ORACLE_T_MIN: f64 = 1e-12;

fn simpson_weights(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            }
        })
        .collect()
}

/// Composite Simpson estimate of ∫₁^∞ dp ∫₀^∞ dx f(p, x) on a uniform
/// tensor grid in (t, x), with p = 1/t and x truncated at
/// [`ORACLE_X_MAX`]. `budget` is the total number of grid points.
///
/// Deliberately naive: it shares nothing with the adaptive path and is
/// meant for verification only.
pub fn oracle_double_integral<F>(f: F, budget: usize) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    let mut n = (budget as f64).sqrt().floor() as usize;
    n = n.max(3);
    if n % 2 == 0 {
        n -= 1;
    }
    let w = simpson_weights(n);
    let ht = 1.0 / (n - 1) as f64;
    let hx = ORACLE_X_MAX / (n - 1) as f64;

    let mut total = 0.0;
    for (i, wt) in w.iter().enumerate() {
        let t = if i == 0 { ORACLE_T_MIN } else { i as f64 * ht };
        let p = 1.0 / t;
        let jac = 1.0 / (t * t);
        let mut row = 0.0;
        for (j, wx) in w.iter().enumerate() {
            let x = j as f64 * hx;
            row += wx * f(p, x);
        }
        total += wt * row * hx / 3.0 * jac;
    }
    total * ht / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn check(est: IntegralEstimate, exact: f64, tol: f64) {
        let err = (est.value - exact).abs();
        assert!(err <= tol * exact.abs(), "{est:?} vs {exact}");
        assert!(
            est.abs_error_estimate >= err,
            "estimate {} does not bound true error {err}",
            est.abs_error_estimate
        );
        assert!(est.evaluations > 0);
    }

    #[test]
    fn unit_to_inf_examples() {
        check(integrate_unit_to_inf(|p| p.powi(-2), &spec()).unwrap(), 1.0, 1e-8);
        check(
            integrate_unit_to_inf(|p| p.powi(-2) - p.powi(-4) + 0.5 * p.powi(-6), &spec()).unwrap(),
            23.0 / 30.0,
            1e-8,
        );
        check(integrate_unit_to_inf(|p| (1.0 - p).exp(), &spec()).unwrap(), 1.0, 1e-8);
    }

    #[test]
    fn zero_to_inf_examples() {
        check(
            integrate_zero_to_inf(|x| x.powi(3) * (-x).exp(), &spec()).unwrap(),
            6.0,
            1e-8,
        );
        let bose = |x: f64| if x == 0.0 { 0.0 } else { x.powi(3) / x.exp_m1() };
        check(integrate_zero_to_inf(bose, &spec()).unwrap(), PI.powi(4) / 15.0, 1e-8);
        check(integrate_zero_to_inf(|x| (-x).exp(), &spec()).unwrap(), 1.0, 1e-8);
    }

    #[test]
    fn zero_integrand_converges_immediately() {
        let est = integrate_zero_to_inf(|_| 0.0, &spec()).unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(est.abs_error_estimate, 0.0);
        assert_eq!(est.evaluations, 15);
    }

    #[test]
    fn non_convergence_reports_best_estimate() {
        let tight = QuadratureSpec {
            max_subdivisions: 10,
            rel_tol: 1e-12,
            ..Default::default()
        };
        // p^-1.01 is barely integrable and needs far more than 10 panels
        let err = integrate_unit_to_inf(|p| p.powf(-1.01) * (1.0 + (50.0 * p).sin()), &tight)
            .unwrap_err();
        match err {
            QuadratureError::NonConvergence { best, subdivisions } => {
                assert_eq!(subdivisions, 10);
                assert!(best.value.is_finite());
                assert!(best.evaluations > 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        for bad in [
            QuadratureSpec::with_rel_tol(0.0),
            QuadratureSpec::with_rel_tol(0.1),
            QuadratureSpec {
                max_subdivisions: 5,
                ..Default::default()
            },
        ] {
            assert!(matches!(
                integrate_unit_to_inf(|p| p.powi(-2), &bad),
                Err(QuadratureError::InvalidSpec(_))
            ));
        }
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let r = integrate_zero_to_inf(|x| if x < 1.0 { f64::NAN } else { 0.0 }, &spec());
        assert!(matches!(r, Err(QuadratureError::NonFinite { .. })));
    }

    #[test]
    fn deterministic() {
        let f = |x: f64| x.powi(3) / (1.0 + x.powi(6)) * (-0.3 * x).exp();
        let a = integrate_zero_to_inf(f, &spec()).unwrap();
        let b = integrate_zero_to_inf(f, &spec()).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.abs_error_estimate.to_bits(), b.abs_error_estimate.to_bits());
    }

    #[test]
    fn nested_error_propagates() {
        let inner_spec = spec().inner();
        let est = integrate_unit_to_inf_with(
            |p| {
                let inner = integrate_zero_to_inf(|x| x.powi(3) * (-x).exp(), &inner_spec)?;
                Ok::<_, QuadratureError>(Sample {
                    value: inner.value / (p * p),
                    error: inner.abs_error_estimate / (p * p),
                    evaluations: inner.evaluations,
                })
            },
            &spec(),
        )
        .unwrap();
        check(est, 6.0, 1e-8);
    }

    #[test]
    fn oracle_examples() {
        let v = oracle_double_integral(|p, x| p.powi(-2) * x.powi(3) * (-x).exp(), 400_000);
        assert!((v / 6.0 - 1.0).abs() < 1e-4, "{v}");
        assert_eq!(oracle_double_integral(|_, _| 0.0, 10_000), 0.0);
        let ideal = |p: f64, x: f64| {
            if x == 0.0 {
                0.0
            } else {
                p.powi(-2) * 2.0 * x.powi(3) / x.exp_m1()
            }
        };
        let v = oracle_double_integral(ideal, 400_000);
        let exact = 2.0 * PI.powi(4) / 15.0;
        assert!((v / exact - 1.0).abs() < 1e-4, "{v}");
    }
}
