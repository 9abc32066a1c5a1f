//! Command-line driver.
//!
//! Every subcommand prints `key = value` lines on stdout. Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | numeric-domain error (gapless spectrum, out-of-domain argument, broken chiral symmetry, solver failure) |
//! | 2 | configuration, usage or I/O error |
//! | 3 | k-mesh too coarse |
//!
//! `selftest` exits with 1 when any check fails.

pub mod config;
pub mod scan;
pub mod svg;

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::edgemetrics::{disorder_robustness, ChainSpectrum};
use crate::error::Error;
use crate::mixedphase::BulkAnalysis;
use crate::models::{build_open_chain, cl_bloch, ssh_bloch, BlochModel, ModelName, DEFAULT_MU};
use crate::topology::{self, BandIndex, BzGrid, DEFAULT_NK};

pub use config::ScanConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Numeric(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Numeric(Error::Validation(_)) => 2,
            CliError::Numeric(Error::MeshTooCoarse { .. }) => 3,
            CliError::Numeric(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "chiraltopo",
    version,
    about = "Finite-temperature topology of chiral fermion chains"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, default_value = "ssh")]
    pub model: ModelName,
    /// Control parameter; SSH `v = J + α`, `w = J − α`, CL `M = 2K(1 + α)`.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long = "J", default_value_t = 1.0)]
    pub j: f64,
    #[arg(long = "K", default_value_t = 1.0)]
    pub k: f64,
    #[arg(long, default_value_t = FRAC_PI_2, allow_hyphen_values = true)]
    pub theta: f64,
}

impl ModelArgs {
    pub fn build(&self) -> crate::Result<BlochModel> {
        match self.model {
            ModelName::Ssh => ssh_bloch(self.j, self.alpha),
            ModelName::Cl => cl_bloch(self.k, self.theta, 2.0 * self.k * (1.0 + self.alpha)),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub beta: f64,
    #[arg(long, default_value_t = DEFAULT_MU, allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long = "L", default_value_t = 100)]
    pub cells: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Winding number of the d-vector around the chiral axis.
    Winding {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = DEFAULT_NK)]
        nk: usize,
    },
    /// Zak phases of both bands.
    Zak {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = DEFAULT_NK)]
        nk: usize,
    },
    /// Mixed-state topological measure at inverse temperature β.
    Measure {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, default_value_t = DEFAULT_MU, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, default_value_t = DEFAULT_NK)]
        nk: usize,
    },
    /// Edge/bulk figures of merit of an open chain, optionally disorder-averaged.
    Merit {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long = "W", default_value_t = 0.0)]
        w: f64,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Phase-diagram scan over an (α, β) grid read from a TOML file.
    Scan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_csv: Option<PathBuf>,
        #[arg(long)]
        out_svg: Option<PathBuf>,
        #[arg(long)]
        out_json: Option<PathBuf>,
    },
    /// Disorder statistics of the figures of merit.
    Disorder {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long = "W")]
        w: f64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Oracle checks with residuals.
    Selftest,
}

/// Figures of merit as printed by `merit` and written by `scan`.
pub(crate) fn merit_values(
    model: &BlochModel,
    cells: usize,
    beta: f64,
    mu: f64,
    w: f64,
    trials: usize,
    seed: u64,
) -> crate::Result<(f64, f64)> {
    if w == 0.0 {
        let m = ChainSpectrum::new(build_open_chain(model, cells, None)?)?.merit(beta, mu)?;
        Ok((m.lambda_avg, m.lambda_min))
    } else {
        let s = disorder_robustness(model, cells, beta, mu, w, trials, seed)?;
        Ok((s.lambda_avg.mean, s.lambda_min.mean))
    }
}

fn line(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key} = {value}");
}

/// Parse `args` (including the program name) and run the command, returning its stdout.
pub fn run<I, T>(args: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    execute(cli.command)
}

pub fn execute(command: Command) -> Result<String, CliError> {
    let mut out = String::new();
    match command {
        Command::Winding { model, nk } => {
            let nu = topology::winding_number(&model.build()?, BzGrid::new(nk)?)?;
            line(&mut out, "nu", nu);
        }
        Command::Zak { model, nk } => {
            let m = model.build()?;
            let bands = topology::sample_bands(&m, BzGrid::new(nk)?)?;
            if !bands.is_gapped() {
                return Err(Error::Gapless {
                    gap: bands.gap,
                    tol: topology::GAP_TOL,
                }
                .into());
            }
            line(
                &mut out,
                "gamma_minus",
                topology::zak_phase(&bands, BandIndex::Lower)?,
            );
            line(
                &mut out,
                "gamma_plus",
                topology::zak_phase(&bands, BandIndex::Upper)?,
            );
            line(&mut out, "gap", format!("{:e}", bands.gap));
        }
        Command::Measure { model, beta, mu, nk } => {
            crate::numerics::fermi_weight(0.0, mu, beta)?;
            let bulk = BulkAnalysis::new(&model.build()?, BzGrid::new(nk)?)?;
            let r = bulk.measure(beta, mu)?;
            match r.value {
                Some(v) => line(&mut out, "gamma", v),
                None => line(&mut out, "gamma", "undefined (gapless, β>0)"),
            }
            line(&mut out, "branch", r.branch);
            line(&mut out, "gap", format!("{:e}", bulk.gap()));
            if let Some(d) = r.diagnostics.discrepancy {
                line(&mut out, "discrete_discrepancy", format!("{d:e}"));
            }
        }
        Command::Merit {
            model,
            chain,
            w,
            trials,
            seed,
        } => {
            let (avg, min) = merit_values(
                &model.build()?,
                chain.cells,
                chain.beta,
                chain.mu,
                w,
                trials,
                seed,
            )?;
            line(&mut out, "lambda_avg", format!("{avg:e}"));
            line(&mut out, "lambda_min", format!("{min:e}"));
        }
        Command::Disorder {
            model,
            chain,
            w,
            trials,
            seed,
        } => {
            let s = disorder_robustness(
                &model.build()?,
                chain.cells,
                chain.beta,
                chain.mu,
                w,
                trials,
                seed,
            )?;
            line(&mut out, "clean_lambda_avg", format!("{:e}", s.clean.lambda_avg));
            line(&mut out, "clean_lambda_min", format!("{:e}", s.clean.lambda_min));
            for (name, sum) in [("lambda_avg", s.lambda_avg), ("lambda_min", s.lambda_min)] {
                line(&mut out, &format!("{name}_mean"), format!("{:e}", sum.mean));
                line(&mut out, &format!("{name}_std"), format!("{:e}", sum.std));
                line(&mut out, &format!("{name}_min"), format!("{:e}", sum.min));
            }
            line(&mut out, "trials", s.trials);
        }
        Command::Scan {
            config,
            out_csv,
            out_svg,
            out_json,
        } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", config.display())))?;
            let mut cfg = ScanConfig::from_toml(&text)?;
            if out_csv.is_some() {
                cfg.output.csv = out_csv;
            }
            if out_svg.is_some() {
                cfg.output.svg = out_svg;
            }
            if out_json.is_some() {
                cfg.output.json = out_json;
            }
            let outcome = scan::run_scan(&cfg)?;
            scan::write_outputs(&cfg, &outcome)?;
            line(&mut out, "rows", outcome.rows.len());
            line(&mut out, "seconds", format!("{:.3}", outcome.seconds));
            for (name, path) in [
                ("csv", &cfg.output.csv),
                ("svg", &cfg.output.svg),
                ("json", &cfg.output.json),
            ] {
                if let Some(p) = path {
                    line(&mut out, name, p.display());
                }
            }
        }
        Command::Selftest => {
            let report = crate::selftest::run()?;
            out.push_str(&report.to_string());
            if !report.passed() {
                return Err(CliError::Numeric(Error::Domain(format!(
                    "self-test failed\n{report}"
                ))));
            }
        }
    }
    Ok(out)
}

/// Entry point of the binary; returns the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
