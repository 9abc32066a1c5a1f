//! Phase-diagram scans over `(α, β)` grids.
//!
//! CSV columns, one row per grid point with `β` varying fastest:
//!
//! ```text
//! alpha,beta,nu,gamma,branch,lambda_avg,lambda_min,gap
//! ```
//!
//! `nu` and `gamma` are written as `undefined` when they do not exist (gapless
//! bulk); the JSON report uses `null` for the same cases.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Metric, ScanConfig};
use super::{svg, CliError};
use crate::edgemetrics::{trial_seed, ChainSpectrum, Summary};
use crate::mixedphase::{Branch, BulkAnalysis};
use crate::models::{build_open_chain, DisorderSpec};
use crate::topology::BzGrid;
use crate::Result;

pub const CSV_HEADER: &str = "alpha,beta,nu,gamma,branch,lambda_avg,lambda_min,gap";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub alpha: f64,
    pub beta: f64,
    pub nu: Option<i64>,
    pub gamma: Option<f64>,
    pub branch: Branch,
    pub lambda_avg: f64,
    pub lambda_min: f64,
    pub gap: f64,
}

impl ScanRow {
    pub fn lambda(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Avg => self.lambda_avg,
            Metric::Min => self.lambda_min,
        }
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "undefined".to_string());
        format!(
            "{},{},{},{},{},{:e},{:e},{:e}",
            self.alpha,
            self.beta,
            opt(self.nu.map(|n| n.to_string())),
            opt(self.gamma.map(|g| g.to_string())),
            self.branch,
            self.lambda_avg,
            self.lambda_min,
            self.gap
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutcome {
    pub alpha_grid: Vec<f64>,
    pub beta_grid: Vec<f64>,
    /// Row `i * beta_grid.len() + j` holds `(alpha_grid[i], beta_grid[j])`.
    pub rows: Vec<ScanRow>,
    pub seconds: f64,
}

impl ScanOutcome {
    pub fn row(&self, alpha_idx: usize, beta_idx: usize) -> &ScanRow {
        &self.rows[alpha_idx * self.beta_grid.len() + beta_idx]
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(64 * (self.rows.len() + 1));
        s.push_str(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.to_csv());
            s.push('\n');
        }
        s
    }
}

#[derive(Serialize)]
struct ScanSummary {
    rows: usize,
    undefined_gamma: usize,
    topological: usize,
}

#[derive(Serialize)]
struct ScanReport<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a ScanConfig,
    alpha_grid: &'a [f64],
    beta_grid: &'a [f64],
    summary: ScanSummary,
    rows: &'a [ScanRow],
}

/// Deterministic JSON report (no timings).
pub fn to_json(cfg: &ScanConfig, outcome: &ScanOutcome) -> String {
    let report = ScanReport {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        alpha_grid: &outcome.alpha_grid,
        beta_grid: &outcome.beta_grid,
        summary: ScanSummary {
            rows: outcome.rows.len(),
            undefined_gamma: outcome.rows.iter().filter(|r| r.gamma.is_none()).count(),
            topological: outcome
                .rows
                .iter()
                .filter(|r| r.gamma == Some(std::f64::consts::PI))
                .count(),
        },
        rows: &outcome.rows,
    };
    let mut s = serde_json::to_string_pretty(&report).expect("scan report serializes");
    s.push('\n');
    s
}

fn column(cfg: &ScanConfig, grid: BzGrid, alpha: f64, betas: &[f64]) -> Result<Vec<ScanRow>> {
    let model = cfg.model.build(alpha)?;
    let bulk = BulkAnalysis::new(&model, grid)?;
    let d = cfg.disorder;
    let spectra = if d.strength == 0.0 {
        vec![ChainSpectrum::new(build_open_chain(&model, cfg.cells, None)?)?]
    } else {
        (0..d.trials as u64)
            .map(|t| {
                let spec = DisorderSpec::new(d.strength, trial_seed(d.seed, t))?;
                ChainSpectrum::new(build_open_chain(&model, cfg.cells, Some(spec))?)
            })
            .collect::<Result<Vec<_>>>()?
    };
    let nu = bulk.winding.as_ref().ok().copied();
    betas
        .iter()
        .map(|&beta| {
            let phase = bulk.measure(beta, cfg.mu)?;
            let merits = spectra
                .iter()
                .map(|s| s.merit(beta, cfg.mu))
                .collect::<Result<Vec<_>>>()?;
            let (lambda_avg, lambda_min) = if merits.len() == 1 && d.strength == 0.0 {
                (merits[0].lambda_avg, merits[0].lambda_min)
            } else {
                let avg: Vec<f64> = merits.iter().map(|m| m.lambda_avg).collect();
                let min: Vec<f64> = merits.iter().map(|m| m.lambda_min).collect();
                (Summary::of(&avg).mean, Summary::of(&min).mean)
            };
            Ok(ScanRow {
                alpha,
                beta,
                nu,
                gamma: phase.value,
                branch: phase.branch,
                lambda_avg,
                lambda_min,
                gap: bulk.gap(),
            })
        })
        .collect()
}

/// Evaluate every grid point; α columns run in parallel, output order is the grid order.
pub fn run_scan(cfg: &ScanConfig) -> Result<ScanOutcome> {
    cfg.validate()?;
    let start = Instant::now();
    let grid = BzGrid::new(cfg.nk)?;
    let alpha_grid = cfg.alpha_grid();
    let beta_grid = cfg.beta_grid();
    let columns = alpha_grid
        .par_iter()
        .map(|&a| column(cfg, grid, a, &beta_grid))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanOutcome {
        rows: columns.into_iter().flatten().collect(),
        alpha_grid,
        beta_grid,
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn write(path: &Path, text: &str) -> std::result::Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Write the CSV, SVG and JSON artifacts requested in `cfg.output`.
///
/// Wall-clock timings go to a `<json>.timings.json` sidecar so that the report
/// itself is reproducible byte for byte.
pub fn write_outputs(cfg: &ScanConfig, outcome: &ScanOutcome) -> std::result::Result<(), CliError> {
    let out = &cfg.output;
    if let Some(p) = &out.csv {
        write(p, &outcome.to_csv())?;
    }
    if let Some(p) = &out.svg {
        write(p, &svg::heatmap(cfg, outcome, out.metric))?;
    }
    if let Some(p) = &out.json {
        write(p, &to_json(cfg, outcome))?;
        let mut sidecar = p.clone().into_os_string();
        sidecar.push(".timings.json");
        let timings = serde_json::json!({
            "seconds": outcome.seconds,
            "threads": rayon::current_num_threads(),
        });
        write(Path::new(&sidecar), &format!("{timings:#}\n"))?;
    }
    Ok(())
}
