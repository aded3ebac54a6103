use lifshitz_core::lifshitz::LifshitzError;
use lifshitz_core::perturbation::{casimir_pressure, PerturbationError};
use lifshitz_core::{
    force_perturbative, force_rational, force_series, force_series_converged, PerturbativeInput,
    PhysicalConstants, QuadratureError,
};

use crate::report::ReportRow;
use crate::stack::{Method, Scenario};
use crate::CliError;

fn lifshitz_error(e: LifshitzError) -> CliError {
    match e {
        LifshitzError::InvalidStack(_) | LifshitzError::Domain(_) | LifshitzError::Dielectric(_) => {
            CliError::Usage(e.to_string())
        }
        LifshitzError::Quadrature(QuadratureError::InvalidSpec(_)) => {
            CliError::Usage(format!("--tol: {e}"))
        }
        _ => CliError::Numerical(e.to_string()),
    }
}

/// Δ for a symmetric constant-ε stack.
fn symmetric_delta(s: &Scenario) -> Result<f64, CliError> {
    if let Some(d) = s.delta {
        return Ok(d);
    }
    let err = || {
        CliError::Usage(
            "--method perturbative needs constant eps with eps1 = eps3(1+delta), \
             eps2 = eps3(1-delta) (or pass --delta)"
                .into(),
        )
    };
    let [e1, e2, e3] = [0, 1, 2].map(|i| s.media[i].constant_value());
    let (e1, e2, e3) = (e1.ok_or_else(err)?, e2.ok_or_else(err)?, e3.ok_or_else(err)?);
    if (e1 + e2 - 2.0 * e3).abs() > 1e-9 * e3 {
        return Err(err());
    }
    Ok(((e1 - e2) / (2.0 * e3)).abs())
}

pub fn run(s: &Scenario) -> Result<ReportRow, CliError> {
    let stack = s.stack();
    let mut delta = s.delta;
    let mut terms = None;
    let result = match s.method {
        Method::Rational => force_rational(&stack, &s.spec).map_err(lifshitz_error)?,
        Method::Series => match s.n_max {
            Some(n) => {
                terms = Some(n);
                force_series(&stack, &s.spec, n).map_err(lifshitz_error)?
            }
            None => {
                let (r, n) = force_series_converged(&stack, &s.spec).map_err(lifshitz_error)?;
                terms = Some(n);
                r
            }
        },
        Method::Perturbative => {
            let d = symmetric_delta(s)?;
            delta = Some(d);
            let eps3 = s.media[2].constant_value().expect("checked by symmetric_delta");
            force_perturbative(&PerturbativeInput::new(d, eps3, s.gap, s.area)).map_err(
                |e| match e {
                    PerturbationError::InvalidInput(m) => CliError::Usage(m),
                    PerturbationError::Lifshitz(l) => lifshitz_error(l),
                },
            )?
        }
    };
    let casimir = casimir_pressure(&PhysicalConstants::CODATA_2018, s.gap);
    Ok(ReportRow::from_result(
        s.method.name(),
        s.labels(),
        delta,
        s.gap,
        s.area,
        s.units,
        &result,
        Some(result.pressure.abs() / casimir.abs()),
        terms,
    ))
}
