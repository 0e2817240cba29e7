//! TOML run configuration. Every key is optional; an empty file yields the
//! default indoor scenario, the default SNR grid and Monte Carlo enabled.
//!
//! ```toml
//! [params]
//! n_elements = 20
//! d_tl = 1.5
//!
//! [mc]
//! enabled = true
//! n_trials = 100000
//! seed = 42
//! source_mode = "shared"      # or "independent"
//! snr_form = "exact"          # or "idealized"
//!
//! [sweep]
//! axis = "snr_db"             # or "n_elements", "d_tl"
//! grid = [0.0, 5.0, 10.0]
//! overlays = [0, 10, 20, 30, 40]
//! snr_axis = "transmit"       # or "mean_snr"
//! anchor_db = 30.0
//! metrics = ["op", "ber", "ac"]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{SnrForm, SourceMode, SystemParams};
use crate::error::{Error, Result};
use crate::montecarlo::McConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    SnrDb,
    NElements,
    DTl,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::SnrDb => "snr_db",
            Axis::NElements => "n_elements",
            Axis::DTl => "d_tl",
        }
    }

    /// 0..=30 dB in 1 dB steps, N = 0..=40 in steps of 5, or 1..=4 m in
    /// 0.25 m steps.
    pub fn default_grid(self) -> Vec<f64> {
        match self {
            Axis::SnrDb => (0..=30).map(f64::from).collect(),
            Axis::NElements => (0..=8).map(|i| f64::from(i * 5)).collect(),
            Axis::DTl => (0..=12).map(|i| 1.0 + 0.25 * f64::from(i)).collect(),
        }
    }
}

/// Meaning of an `snr_db` axis value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnrAxis {
    /// Transmit SNR γ₀ = P_s/σ², shifted so that `anchor_db` on the axis is
    /// the configured operating point.
    #[default]
    Transmit,
    /// Mean received SNR E[γ_L] of the analytic model, in dB.
    MeanSnr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Op,
    Ber,
    Ac,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Op, Metric::Ber, Metric::Ac];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Op => "op",
            Metric::Ber => "ber",
            Metric::Ac => "ac",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSection {
    pub enabled: bool,
    pub n_trials: u64,
    pub seed: u64,
    pub source_mode: SourceMode,
    pub snr_form: SnrForm,
}

impl Default for McSection {
    fn default() -> Self {
        let d = McConfig::default();
        McSection {
            enabled: true,
            n_trials: d.n_trials,
            seed: d.seed,
            source_mode: d.source_mode,
            snr_form: d.snr_form,
        }
    }
}

impl McSection {
    pub fn config(&self) -> McConfig {
        McConfig {
            n_trials: self.n_trials,
            seed: self.seed,
            source_mode: self.source_mode,
            snr_form: self.snr_form,
        }
    }

    /// The Monte Carlo settings, or `None` when disabled.
    pub fn active(&self) -> Option<McConfig> {
        self.enabled.then(|| self.config())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub axis: Axis,
    /// Axis values; the axis default grid when absent.
    pub grid: Option<Vec<f64>>,
    /// RIS sizes drawn as separate curves; 0 is the no-RIS baseline.
    pub overlays: Vec<usize>,
    pub snr_axis: SnrAxis,
    pub anchor_db: f64,
    pub metrics: Vec<Metric>,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            axis: Axis::SnrDb,
            grid: None,
            overlays: vec![0, 10, 20, 30, 40],
            snr_axis: SnrAxis::Transmit,
            anchor_db: 30.0,
            metrics: Metric::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub params: SystemParams,
    pub mc: McSection,
    pub sweep: SweepSection,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate_at("params")?;
        if self.mc.enabled {
            self.mc.config().validate_at("mc")?;
        }
        let s = &self.sweep;
        if !s.anchor_db.is_finite() {
            return Err(Error::invalid("sweep.anchor_db", "must be finite"));
        }
        if s.metrics.is_empty() {
            return Err(Error::invalid("sweep.metrics", "must name at least one metric"));
        }
        if s.axis != Axis::NElements && s.overlays.is_empty() {
            return Err(Error::invalid("sweep.overlays", "must list at least one RIS size"));
        }
        if let Some(grid) = &s.grid {
            validate_grid(s.axis, grid)?;
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        self.sweep.grid.clone().unwrap_or_else(|| self.sweep.axis.default_grid())
    }
}

pub(crate) fn validate_grid(axis: Axis, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("sweep.grid", "must not be empty"));
    }
    for (i, &v) in grid.iter().enumerate() {
        let field = format!("sweep.grid[{i}]");
        if !v.is_finite() {
            return Err(Error::invalid(field, "must be finite"));
        }
        if i > 0 && v <= grid[i - 1] {
            return Err(Error::invalid(field, "grid must be strictly increasing"));
        }
        match axis {
            Axis::NElements if v < 0.0 || v.fract() != 0.0 => {
                return Err(Error::invalid(field, format!("RIS size must be a nonnegative integer, got {v}")));
            }
            Axis::DTl if v <= 0.0 => {
                return Err(Error::invalid(field, format!("distance must be > 0, got {v}")));
            }
            _ => {}
        }
    }
    Ok(())
}
