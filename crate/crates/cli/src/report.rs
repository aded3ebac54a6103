//! Report rows and their CSV / JSON encodings.
//!
//! Floats are written with 17 significant digits so every value re-parses
//! to the same `f64`.

use std::io::Write;

use lifshitz_core::constants::{force_in_units, si_pressure_to_cgs, UnitSystem};
use lifshitz_core::ForceResult;
use serde::Serialize;
use serde_json::value::RawValue;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub method: String,
    pub eps1: String,
    pub eps2: String,
    pub eps3: String,
    pub delta: Option<f64>,
    pub gap_m: f64,
    pub area_m2: f64,
    pub units: UnitSystem,
    pub pressure_pa: f64,
    pub force_n: f64,
    pub sign_class: String,
    pub rel_error: f64,
    pub abs_error_pa: f64,
    pub evaluations: usize,
    pub ratio_to_casimir: Option<f64>,
    pub series_terms: Option<u32>,
}

pub const COLUMNS: [&str; 18] = [
    "method",
    "eps1",
    "eps2",
    "eps3",
    "delta",
    "gap_m",
    "area_m2",
    "units",
    "pressure",
    "force",
    "pressure_pa",
    "pressure_dyn_cm2",
    "sign_class",
    "rel_error",
    "abs_error_pa",
    "evaluations",
    "ratio_to_casimir",
    "series_terms",
];

enum Cell {
    Text(String),
    Number(f64),
    Count(u64),
    Missing,
}

impl ReportRow {
    #[allow(clippy::too_many_arguments)]
    pub fn from_result(
        method: &str,
        labels: [String; 3],
        delta: Option<f64>,
        gap_m: f64,
        area_m2: f64,
        units: UnitSystem,
        result: &ForceResult,
        ratio_to_casimir: Option<f64>,
        series_terms: Option<u32>,
    ) -> Self {
        let [eps1, eps2, eps3] = labels;
        ReportRow {
            method: method.into(),
            eps1,
            eps2,
            eps3,
            delta,
            gap_m,
            area_m2,
            units,
            pressure_pa: result.pressure,
            force_n: result.force,
            sign_class: result.sign_class.to_string(),
            rel_error: result.rel_error,
            abs_error_pa: result.abs_error,
            evaluations: result.evaluations,
            ratio_to_casimir,
            series_terms,
        }
    }

    pub fn pressure_dyn_cm2(&self) -> f64 {
        si_pressure_to_cgs(self.pressure_pa)
    }

    /// Pressure in the selected units (N/m² or dyn/cm²).
    pub fn pressure(&self) -> f64 {
        match self.units {
            UnitSystem::Si => self.pressure_pa,
            UnitSystem::Cgs => self.pressure_dyn_cm2(),
        }
    }

    /// Force in the selected units (N or dyn).
    pub fn force(&self) -> f64 {
        force_in_units(self.force_n, self.units)
    }

    fn cells(&self) -> Vec<Cell> {
        let units = match self.units {
            UnitSystem::Si => "si",
            UnitSystem::Cgs => "cgs",
        };
        vec![
            Cell::Text(self.method.clone()),
            Cell::Text(self.eps1.clone()),
            Cell::Text(self.eps2.clone()),
            Cell::Text(self.eps3.clone()),
            self.delta.map_or(Cell::Missing, Cell::Number),
            Cell::Number(self.gap_m),
            Cell::Number(self.area_m2),
            Cell::Text(units.into()),
            Cell::Number(self.pressure()),
            Cell::Number(self.force()),
            Cell::Number(self.pressure_pa),
            Cell::Number(self.pressure_dyn_cm2()),
            Cell::Text(self.sign_class.clone()),
            Cell::Number(self.rel_error),
            Cell::Number(self.abs_error_pa),
            Cell::Count(self.evaluations as u64),
            self.ratio_to_casimir.map_or(Cell::Missing, Cell::Number),
            self.series_terms
                .map_or(Cell::Missing, |n| Cell::Count(n as u64)),
        ]
    }

    pub fn csv_record(&self) -> Vec<String> {
        self.cells()
            .into_iter()
            .map(|c| match c {
                Cell::Text(s) => s,
                Cell::Number(v) => fmt_f64(v),
                Cell::Count(n) => n.to_string(),
                Cell::Missing => String::new(),
            })
            .collect()
    }

    /// A JSON object with the columns in [`COLUMNS`] order.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{");
        for (i, (name, cell)) in COLUMNS.iter().zip(self.cells()).enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&serde_json::to_string(name).unwrap());
            out.push(':');
            let value = match cell {
                Cell::Text(s) => serde_json::to_string(&s).unwrap(),
                Cell::Number(v) if v.is_finite() => raw_number(v),
                Cell::Number(_) | Cell::Missing => "null".into(),
                Cell::Count(n) => n.to_string(),
            };
            out.push_str(&value);
        }
        out.push('}');
        out
    }
}

fn raw_number(v: f64) -> String {
    let raw = RawValue::from_string(fmt_f64(v)).expect("formatted float is valid JSON");
    raw.get().to_string()
}

pub fn write_csv<W: Write>(out: W, rows: &[ReportRow]) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().from_writer(out);
    w.write_record(COLUMNS)?;
    for row in rows {
        w.write_record(row.csv_record())?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
pub struct MaterialRow<'a> {
    pub name: &'a str,
    pub model: &'a str,
    pub static_eps: Option<f64>,
    pub provenance: &'a str,
}
