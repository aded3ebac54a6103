//! Physical constants and the pressure unit conversions used at output
//! boundaries. Everything inside the crate works in SI.

/// Fixed CODATA 2018 constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Speed of light in vacuum, m/s.
    pub c: f64,
}

impl PhysicalConstants {
    pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
        hbar: HBAR,
        c: SPEED_OF_LIGHT,
    };

    /// ħc in J·m.
    pub fn hbar_c(&self) -> f64 {
        self.hbar * self.c
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA_2018
    }
}

pub const HBAR: f64 = 1.054_571_817e-34;
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// dyn/cm² per N/m².
pub const DYN_PER_CM2_PER_PASCAL: f64 = 10.0;
/// dyn per N.
pub const DYN_PER_NEWTON: f64 = 1.0e5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    Si,
    Cgs,
}

/// A pressure stored in N/m².
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Pressure(f64);

impl Pressure {
    pub fn from_pascal(value: f64) -> Self {
        Pressure(value)
    }

    pub fn from_dyn_per_cm2(value: f64) -> Self {
        Pressure(value / DYN_PER_CM2_PER_PASCAL)
    }

    pub fn pascal(self) -> f64 {
        self.0
    }

    pub fn dyn_per_cm2(self) -> f64 {
        si_pressure_to_cgs(self.0)
    }

    pub fn in_units(self, units: UnitSystem) -> f64 {
        match units {
            UnitSystem::Si => self.pascal(),
            UnitSystem::Cgs => self.dyn_per_cm2(),
        }
    }
}

/// N/m² → dyn/cm².
pub fn si_pressure_to_cgs(pascal: f64) -> f64 {
    pascal * DYN_PER_CM2_PER_PASCAL
}

/// dyn/cm² → N/m².
pub fn cgs_pressure_to_si(dyn_per_cm2: f64) -> f64 {
    dyn_per_cm2 / DYN_PER_CM2_PER_PASCAL
}

/// N → dyn.
pub fn si_force_to_cgs(newton: f64) -> f64 {
    newton * DYN_PER_NEWTON
}

/// Force expressed in the requested unit system (N or dyn).
pub fn force_in_units(newton: f64, units: UnitSystem) -> f64 {
    match units {
        UnitSystem::Si => newton,
        UnitSystem::Cgs => si_force_to_cgs(newton),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pressure_conversion_examples() {
        assert!((si_pressure_to_cgs(0.0013) - 0.013).abs() < 1e-18);
        assert_eq!(si_pressure_to_cgs(0.0), 0.0);
        assert_eq!(si_pressure_to_cgs(1.0), 10.0);
        assert_eq!(Pressure::from_pascal(2.5).dyn_per_cm2(), 25.0);
    }

    #[test]
    fn codata_values() {
        let k = PhysicalConstants::default();
        assert_eq!(k.hbar, 1.054571817e-34);
        assert_eq!(k.c, 299_792_458.0);
    }

    proptest! {
        #[test]
        fn si_cgs_round_trip(mantissa in 1.0f64..10.0, exp in -30i32..10) {
            // decimal-scaled values: ×10 then ÷10 must be the identity
            let p = mantissa * 10f64.powi(exp);
            let back = cgs_pressure_to_si(si_pressure_to_cgs(p));
            prop_assert!((back - p).abs() <= p.abs() * f64::EPSILON);
        }
    }
}
