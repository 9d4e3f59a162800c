//! TOML run configuration.
//!
//! ```toml
//! [potential]
//! terms = [{ c = 7.5, p = 2, b = 1.0, s = 0.0, q = 1 }]
//!
//! [channel]
//! l = 0
//! n = 200
//! lambda = 20.0
//! theta = 0.7
//!
//! [find]
//! guess_re = 3.4
//! guess_im = -0.02
//! z_target = 0.0
//! ```
//!
//! Sections other than `[potential]` are optional; each command checks for
//! the ones it needs. Unknown keys are rejected.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{check_gaussian_angle, ChannelConfig};
use crate::potential::PotentialModel;
use crate::resonance::{SearchOptions, StabilityGrid, DEFAULT_IM_SCHEDULE};
use crate::trajectory::EnergyGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialModel,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergyPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<EnergyGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub find: Option<FindSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stability: Option<StabilityGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<TableSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

/// A single energy for `eigs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyPoint {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl EnergyPoint {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FindSection {
    pub guess_re: f64,
    #[serde(default)]
    pub guess_im: f64,
    pub z_target: f64,
}

impl FindSection {
    pub fn guess(&self) -> Complex64 {
        Complex64::new(self.guess_re, self.guess_im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub z_targets: Vec<f64>,
    #[serde(default = "default_schedule")]
    pub im_schedule: Vec<f64>,
    #[serde(default)]
    pub re_start: f64,
    #[serde(default = "default_re_end")]
    pub re_end: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_window")]
    pub window: f64,
}

fn default_schedule() -> Vec<f64> {
    DEFAULT_IM_SCHEDULE.to_vec()
}

fn default_re_end() -> f64 {
    10.0
}

fn default_steps() -> usize {
    101
}

fn default_window() -> f64 {
    0.5
}

impl ScanSection {
    /// Search options with the given stability grid (`None` skips stability).
    pub fn search_options(&self, stability: Option<StabilityGrid>) -> SearchOptions {
        SearchOptions {
            z_targets: self.z_targets.clone(),
            im_schedule: self.im_schedule.clone(),
            re_start: self.re_start,
            re_end: self.re_end,
            steps: self.steps,
            window: self.window,
            stability,
            ..SearchOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableMode {
    /// The six resonances of the first reference table.
    #[default]
    Table1,
    /// First two rows of every block of the second reference table.
    Table2Spot,
    All,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSection {
    #[serde(default)]
    pub mode: TableMode,
    /// Overrides every row's tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub svg: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot_re: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot_im: Option<[f64; 2]>,
}

impl RunConfig {
    pub fn new(potential: PotentialModel, channel: ChannelConfig) -> Self {
        Self {
            potential,
            channel,
            energy: None,
            sweep: None,
            find: None,
            scan: None,
            stability: None,
            table: None,
            output: None,
        }
    }

    /// Parses and validates.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Checks every section present.
    pub fn validate(&self) -> Result<()> {
        self.potential.validate()?;
        self.channel.validate()?;
        check_gaussian_angle(&self.channel, &self.potential)?;
        if let Some(e) = &self.energy {
            if !(e.re.is_finite() && e.im.is_finite()) {
                return Err(Error::Config("energy must be finite".into()));
            }
        }
        if let Some(g) = &self.sweep {
            g.validate()?;
        }
        if let Some(f) = &self.find {
            if !(f.guess_re.is_finite() && f.guess_im.is_finite() && f.z_target.is_finite()) {
                return Err(Error::Config("find section must be finite".into()));
            }
        }
        if let Some(s) = &self.scan {
            if s.im_schedule.is_empty() {
                return Err(Error::Config("scan.im_schedule is empty".into()));
            }
            if !(s.window > 0.0) {
                return Err(Error::Config("scan.window must be positive".into()));
            }
            EnergyGrid::new(s.re_start, s.re_end, s.steps, 0.0).validate()?;
        }
        if let Some(g) = &self.stability {
            g.validate()?;
            for &theta in &g.thetas {
                let c = ChannelConfig { theta, ..self.channel };
                c.validate()?;
                check_gaussian_angle(&c, &self.potential)?;
            }
            for &lambda in &g.lambdas {
                ChannelConfig { lambda, ..self.channel }.validate()?;
            }
            if g.basis_sizes.contains(&0) {
                return Err(Error::Config("stability sizes must be positive".into()));
            }
        }
        if let Some(t) = &self.table {
            if let Some(tol) = t.tolerance {
                if !(tol.is_finite() && tol >= 0.0) {
                    return Err(Error::Config("table.tolerance must be non-negative".into()));
                }
            }
        }
        if let Some(o) = &self.output {
            for range in [o.plot_re, o.plot_im].into_iter().flatten() {
                if !(range[0] < range[1]) {
                    return Err(Error::Config("plot ranges must be increasing".into()));
                }
            }
        }
        Ok(())
    }

    pub fn require_energy(&self) -> Result<Complex64> {
        self.energy.map(|e| e.value()).ok_or_else(|| missing("energy"))
    }

    pub fn require_sweep(&self) -> Result<EnergyGrid> {
        self.sweep.ok_or_else(|| missing("sweep"))
    }

    pub fn require_find(&self) -> Result<FindSection> {
        self.find.ok_or_else(|| missing("find"))
    }

    pub fn require_scan(&self) -> Result<&ScanSection> {
        self.scan.as_ref().ok_or_else(|| missing("scan"))
    }
}

fn missing(section: &str) -> Error {
    Error::Config(format!("missing [{section}] section"))
}
