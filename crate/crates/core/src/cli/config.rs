//! TOML scan configuration.
//!
//! ```toml
//! mu = 0.1          # chemical potential (default 0.1)
//! nk = 512          # k-points for bulk quantities (default 512)
//! cells = 100       # unit cells of the open chain (default 100)
//!
//! [model]
//! name = "ssh"      # "ssh" or "cl"
//! J = 1.0           # SSH amplitude (default 1)
//! K = 1.0           # CL amplitude (default 1)
//! theta = 1.5707963267948966   # CL flux (default pi/2)
//!
//! [alpha]
//! min = -1.0
//! max = 1.0
//! count = 81
//!
//! [beta]
//! min = 0.0
//! max = 10.0
//! count = 51
//! include_zero = true   # required whenever the grid contains beta = 0
//!
//! [disorder]            # optional
//! strength = 0.0
//! trials = 1
//! seed = 0
//!
//! [output]              # optional; CLI flags override
//! csv = "fig1.csv"
//! svg = "fig1.svg"
//! json = "fig1.json"
//! metric = "avg"        # which figure of merit the heatmap shows: "avg" or "min"
//! ```

use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{cl_bloch, ssh_bloch, BlochModel, ModelName, DEFAULT_MU};
use crate::topology::DEFAULT_NK;

fn one() -> f64 {
    1.0
}

fn half_pi() -> f64 {
    FRAC_PI_2
}

fn default_mu() -> f64 {
    DEFAULT_MU
}

fn default_nk() -> usize {
    DEFAULT_NK
}

fn default_cells() -> usize {
    100
}

fn default_trials() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub name: ModelName,
    #[serde(rename = "J", default = "one")]
    pub j: f64,
    #[serde(rename = "K", default = "one")]
    pub k: f64,
    #[serde(default = "half_pi")]
    pub theta: f64,
}

impl ModelSection {
    /// Model at control parameter `α`; for CL the rung hopping is `M = 2K(1 + α)`.
    pub fn build(&self, alpha: f64) -> Result<BlochModel> {
        match self.name {
            ModelName::Ssh => ssh_bloch(self.j, alpha),
            ModelName::Cl => cl_bloch(self.k, self.theta, 2.0 * self.k * (1.0 + alpha)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub include_zero: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderSection {
    #[serde(default)]
    pub strength: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for DisorderSection {
    fn default() -> Self {
        Self {
            strength: 0.0,
            trials: 1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Avg,
    Min,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub json: Option<PathBuf>,
    #[serde(default)]
    pub metric: Metric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default = "default_nk")]
    pub nk: usize,
    #[serde(default = "default_cells")]
    pub cells: usize,
    pub model: ModelSection,
    pub alpha: AlphaRange,
    pub beta: BetaRange,
    #[serde(default)]
    pub disorder: DisorderSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![min];
    }
    let span = max - min;
    (0..count)
        .map(|i| min + span * i as f64 / (count - 1) as f64)
        .collect()
}

impl ScanConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScanConfig = toml::from_str(text).map_err(|e| Error::validation(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::validation(msg));
        if self.alpha.count == 0 || self.beta.count == 0 {
            return bad("alpha and beta counts must be >= 1".into());
        }
        for (name, lo, hi) in [
            ("alpha", self.alpha.min, self.alpha.max),
            ("beta", self.beta.min, self.beta.max),
        ] {
            if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                return bad(format!("{name} range [{lo}, {hi}] is empty or non-finite"));
            }
        }
        if self.beta.min < 0.0 {
            return bad(format!("beta values must be >= 0, got min {}", self.beta.min));
        }
        if !self.mu.is_finite() {
            return bad("mu must be finite".into());
        }
        if self.disorder.trials == 0 {
            return bad("disorder.trials must be >= 1".into());
        }
        if !self.disorder.strength.is_finite() || self.disorder.strength < 0.0 {
            return bad("disorder.strength must be finite and >= 0".into());
        }
        if !self.beta.include_zero && self.beta_grid_raw().contains(&0.0) {
            return bad(
                "beta grid contains 0; set include_zero = true to evaluate the infinite-temperature branch"
                    .into(),
            );
        }
        for a in self.alpha_grid() {
            self.model.build(a)?;
        }
        crate::topology::BzGrid::new(self.nk)?;
        if self.cells < crate::models::MIN_CELLS {
            return bad(format!("cells must be >= {}", crate::models::MIN_CELLS));
        }
        Ok(())
    }

    pub fn alpha_grid(&self) -> Vec<f64> {
        linspace(self.alpha.min, self.alpha.max, self.alpha.count)
    }

    fn beta_grid_raw(&self) -> Vec<f64> {
        linspace(self.beta.min, self.beta.max, self.beta.count)
    }

    /// β values in ascending order; `0` is prepended when `include_zero` is set.
    pub fn beta_grid(&self) -> Vec<f64> {
        let mut grid = self.beta_grid_raw();
        if self.beta.include_zero && !grid.contains(&0.0) {
            grid.insert(0, 0.0);
        }
        grid
    }
}
