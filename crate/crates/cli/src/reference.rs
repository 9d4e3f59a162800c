//! Embedded reference resonances and the comparison behind `zplane table`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Deserialize;
use zplane_core::io::TableMode;
use zplane_core::resonance::refine_resonance;
use zplane_core::{ChannelConfig, PotentialModel, RefineOptions, Resonance};

pub const REFERENCE_TOML: &str = include_str!("../data/reference.toml");

/// Table 1 rows agree to this absolute tolerance in both `E_r` and `Gamma`.
pub const TABLE1_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceData {
    pub version: u32,
    pub citation: String,
    pub potential: PotentialModel,
    #[serde(rename = "row")]
    pub rows: Vec<ReferenceRow>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceRow {
    pub table: u8,
    pub source: String,
    pub z: f64,
    pub l: u32,
    /// As printed; the digit count sets the table 2 tolerance.
    pub e_r: String,
    pub gamma: String,
    pub guess: [f64; 2],
}

/// Five units in the last printed digit of a decimal string such as
/// `"9.57194e-5"`.
pub fn last_digit_tolerance(printed: &str) -> f64 {
    let lower = printed.to_ascii_lowercase();
    let (mantissa, exponent) = match lower.split_once('e') {
        Some((m, e)) => (m, e.parse::<i32>().unwrap_or(0)),
        None => (lower.as_str(), 0),
    };
    let decimals = mantissa.split_once('.').map_or(0, |(_, frac)| frac.len()) as i32;
    5.0 * 10f64.powi(exponent - decimals)
}

impl ReferenceRow {
    pub fn e_r_value(&self) -> f64 {
        self.e_r.parse().expect("reference values are validated on load")
    }

    pub fn gamma_value(&self) -> f64 {
        self.gamma.parse().expect("reference values are validated on load")
    }

    pub fn guess(&self) -> Complex64 {
        Complex64::new(self.guess[0], self.guess[1])
    }

    /// `(E_r tolerance, Gamma tolerance)`.
    pub fn tolerances(&self) -> (f64, f64) {
        if self.table == 1 {
            (TABLE1_TOLERANCE, TABLE1_TOLERANCE)
        } else {
            (last_digit_tolerance(&self.e_r), last_digit_tolerance(&self.gamma))
        }
    }

    pub fn in_mode(&self, mode: TableMode) -> bool {
        match mode {
            TableMode::Table1 => self.table == 1,
            TableMode::Table2Spot => self.table == 2,
            TableMode::All => true,
        }
    }
}

impl ReferenceData {
    pub fn embedded() -> Self {
        Self::parse(REFERENCE_TOML).expect("embedded reference data is valid")
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let data: Self = toml::from_str(text).map_err(|e| e.to_string())?;
        data.potential.validate().map_err(|e| e.to_string())?;
        for row in &data.rows {
            for value in [&row.e_r, &row.gamma] {
                if !value.parse::<f64>().is_ok_and(f64::is_finite) {
                    return Err(format!("{}: bad value {value:?}", row.source));
                }
            }
        }
        Ok(data)
    }
}

/// One computed row of the comparison.
#[derive(Debug, Clone)]
pub struct RowResult {
    pub row: ReferenceRow,
    pub computed: Option<Resonance>,
    pub error: Option<String>,
    pub tolerance: (f64, f64),
}

impl RowResult {
    pub fn deltas(&self) -> Option<(f64, f64)> {
        self.computed
            .as_ref()
            .map(|r| ((r.e_r() - self.row.e_r_value()).abs(), (r.gamma() - self.row.gamma_value()).abs()))
    }

    pub fn passed(&self) -> bool {
        match (&self.computed, self.deltas()) {
            (Some(r), Some((de, dg))) => r.converged && de <= self.tolerance.0 && dg <= self.tolerance.1,
            _ => false,
        }
    }
}

/// Refines every selected row with the channel settings of `base`, taking
/// `l` from the row.
pub fn run_rows(
    data: &ReferenceData,
    mode: TableMode,
    base: &ChannelConfig,
    tolerance_override: Option<f64>,
) -> Vec<RowResult> {
    let rows: Vec<&ReferenceRow> = data.rows.iter().filter(|r| r.in_mode(mode)).collect();
    rows.par_iter()
        .map(|row| {
            let cfg = ChannelConfig { l: row.l, ..*base };
            let tolerance = tolerance_override.map_or_else(|| row.tolerances(), |t| (t, t));
            match refine_resonance(row.guess(), row.z, &cfg, &data.potential, &RefineOptions::default()) {
                Ok(r) => RowResult { row: (*row).clone(), computed: Some(r), error: None, tolerance },
                Err(e) => RowResult { row: (*row).clone(), computed: None, error: Some(e.to_string()), tolerance },
            }
        })
        .collect()
}

/// Fixed-width comparison table, one line per row.
pub fn format_table(results: &[RowResult]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<5} {:>3} {:>2}  {:>16} {:>16} {:>9}  {:>16} {:>16} {:>9}  {}\n",
        "table", "Z", "l", "E_r", "E_r ref", "|dE_r|", "Gamma", "Gamma ref", "|dGamma|", "status"
    ));
    for r in results {
        let status = if r.passed() { "ok" } else { "FAIL" };
        match (&r.computed, r.deltas()) {
            (Some(res), Some((de, dg))) => out.push_str(&format!(
                "{:<5} {:>3} {:>2}  {:>16.10} {:>16} {:>9.2e}  {:>16.10} {:>16} {:>9.2e}  {}{}\n",
                r.row.table,
                r.row.z,
                r.row.l,
                res.e_r(),
                r.row.e_r,
                de,
                res.gamma(),
                r.row.gamma,
                dg,
                status,
                if res.converged { "" } else { " (not converged)" }
            )),
            _ => out.push_str(&format!(
                "{:<5} {:>3} {:>2}  {:>16} {:>16} {:>9}  {:>16} {:>16} {:>9}  {} ({})\n",
                r.row.table,
                r.row.z,
                r.row.l,
                "-",
                r.row.e_r,
                "-",
                "-",
                r.row.gamma,
                "-",
                status,
                r.error.as_deref().unwrap_or("no result")
            )),
        }
    }
    out
}
