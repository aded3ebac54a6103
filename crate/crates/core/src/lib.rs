//! Casimir–Lifshitz force between two dielectric half-spaces separated by a
//! dielectric gap, at zero temperature.
//!
//! The full Lifshitz integral is evaluated in [`lifshitz`]; small-contrast
//! closed forms and the perfect-conductor result live in [`perturbation`].
//! Pressures are in N/m² throughout; negative pressure means attraction.

pub mod constants;
pub mod dielectric;
pub mod lifshitz;
pub mod perturbation;
pub mod quadrature;
pub mod validation;

pub use constants::{PhysicalConstants, Pressure, UnitSystem};
pub use dielectric::{Material, Oscillator, PermittivityModel};
pub use lifshitz::{
    classify_sign, force_rational, force_series, force_series_converged, ForceResult,
    LifshitzError, SignClass, StackConfig,
};
pub use perturbation::{casimir_ideal, force_perturbative, ratio_to_casimir, PerturbativeInput};
pub use quadrature::{IntegralEstimate, QuadratureError, QuadratureSpec};
