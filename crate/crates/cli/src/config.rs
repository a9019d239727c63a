//! Run configuration: TOML file plus flag overrides (flags win). The
//! resolved config is echoed into JSON output for provenance.

use std::path::PathBuf;

use clap::ValueEnum;
use erange_core::{Error, GridSpec, PotentialSpec, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// For phase-shift this selects the delta route; for effective-range,
/// `integral` means the direct integral formulas (Eqs. 19/25/22) and
/// `matching` the low-k fit of Eq. (33).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Integral,
    Matching,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KGridConfig {
    pub k_min: f64,
    pub k_max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Default for KGridConfig {
    fn default() -> Self {
        KGridConfig { k_min: 0.01, k_max: 10.0, points: 50, spacing: Spacing::Log }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub r_min: f64,
    /// None: sized from the potential's tail criterion.
    pub r_max: Option<f64>,
    pub points_per_decade: u32,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { r_min: 1e-8, r_max: None, points_per_decade: 512 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub phase: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { phase: 1e-9 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    pub ell: u32,
    pub k_grid: KGridConfig,
    pub grid: GridConfig,
    pub tolerances: Tolerances,
    pub method: MethodChoice,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    /// Tail exponents for the scan subcommand's theorem matrix.
    pub s_list: Vec<f64>,
    pub ell_list: Vec<u32>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            potential: PotentialSpec::SquareBarrier { height: 4.0, radius: 1.0 },
            ell: 0,
            k_grid: KGridConfig::default(),
            grid: GridConfig::default(),
            tolerances: Tolerances::default(),
            method: MethodChoice::Both,
            format: OutputFormat::Csv,
            out: None,
            s_list: vec![2.5, 3.5, 4.5, 6.0, 10.0],
            ell_list: vec![0, 1],
        }
    }
}

/// Flag values layered on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub ell: Option<u32>,
    pub k_min: Option<f64>,
    pub k_max: Option<f64>,
    pub k_points: Option<usize>,
    pub r_max: Option<f64>,
    pub method: Option<MethodChoice>,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
    pub s_list: Option<Vec<f64>>,
    pub ell_list: Option<Vec<u32>>,
}

impl RunConfig {
    pub fn load(path: Option<&PathBuf>, over: &Overrides) -> Result<RunConfig> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    Error::InvalidConfig(format!("cannot read config {}: {e}", p.display()))
                })?;
                toml::from_str(&text)
                    .map_err(|e| Error::InvalidConfig(format!("config {}: {e}", p.display())))?
            }
            None => RunConfig::default(),
        };
        if let Some(v) = over.ell {
            cfg.ell = v;
        }
        if let Some(v) = over.k_min {
            cfg.k_grid.k_min = v;
        }
        if let Some(v) = over.k_max {
            cfg.k_grid.k_max = v;
        }
        if let Some(v) = over.k_points {
            cfg.k_grid.points = v;
        }
        if let Some(v) = over.r_max {
            cfg.grid.r_max = Some(v);
        }
        if let Some(v) = over.method {
            cfg.method = v;
        }
        if let Some(v) = over.format {
            cfg.format = v;
        }
        if let Some(v) = &over.out {
            cfg.out = Some(v.clone());
        }
        if let Some(v) = &over.s_list {
            cfg.s_list = v.clone();
        }
        if let Some(v) = &over.ell_list {
            cfg.ell_list = v.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        self.potential.validate()?;
        let kg = &self.k_grid;
        if !(kg.k_min > 0.0) || !kg.k_min.is_finite() {
            return Err(Error::InvalidConfig("k_grid.k_min must be finite and > 0".into()));
        }
        if kg.points == 0 {
            return Err(Error::InvalidConfig("k_grid.points must be >= 1".into()));
        }
        if kg.points > 1 && !(kg.k_max > kg.k_min) {
            return Err(Error::InvalidConfig("k_grid.k_max must exceed k_min".into()));
        }
        if !(self.grid.r_min > 0.0) {
            return Err(Error::InvalidConfig("grid.r_min must be > 0".into()));
        }
        if let Some(r_max) = self.grid.r_max {
            if !(r_max > self.grid.r_min) {
                return Err(Error::InvalidConfig("grid.r_max must exceed r_min".into()));
            }
        }
        if !(self.tolerances.phase > 0.0) {
            return Err(Error::InvalidConfig("tolerances.phase must be > 0".into()));
        }
        if self.s_list.is_empty() || self.ell_list.is_empty() {
            return Err(Error::InvalidConfig("s_list and ell_list must be non-empty".into()));
        }
        Ok(())
    }

    pub fn k_values(&self) -> Vec<f64> {
        let kg = &self.k_grid;
        if kg.points == 1 {
            return vec![kg.k_min];
        }
        let n = kg.points;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                match kg.spacing {
                    Spacing::Linear => kg.k_min + t * (kg.k_max - kg.k_min),
                    Spacing::Log => kg.k_min * (kg.k_max / kg.k_min).powf(t),
                }
            })
            .collect()
    }

    /// Grid spec sized for this run, honoring explicit overrides.
    pub fn grid_spec(&self, k_max_needed: f64) -> Result<GridSpec> {
        let mut spec = GridSpec::recommended(&self.potential, k_max_needed)?;
        spec.r_min = self.grid.r_min;
        if let Some(r_max) = self.grid.r_max {
            spec.r_max = r_max;
        }
        spec.points_per_decade = self.grid.points_per_decade;
        spec.phase_tolerance = self.tolerances.phase;
        Ok(spec)
    }
}
