//! Grand-canonical site occupations of open chains and the edge/bulk figures
//! of merit built from them.
//!
//! For noninteracting fermions `⟨N_i⟩ = Σ_n f(ε_n) |U_{in}|²`, with `U` the
//! single-particle eigenvectors of the open-chain Hamiltonian.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{build_open_chain, BlochModel, DisorderSpec, OpenChain};
use crate::numerics::{self, EigenDecomposition};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupationProfile {
    pub beta: f64,
    pub mu: f64,
    pub occupations: Vec<f64>,
}

/// An open chain together with its single-particle spectrum.
#[derive(Debug, Clone)]
pub struct ChainSpectrum {
    pub chain: OpenChain,
    pub eigen: EigenDecomposition,
}

impl ChainSpectrum {
    pub fn new(chain: OpenChain) -> Result<Self> {
        let eigen = numerics::eig_hermitian(&chain.hamiltonian)?;
        Ok(Self { chain, eigen })
    }

    pub fn occupations(&self, beta: f64, mu: f64) -> Result<OccupationProfile> {
        let n = self.chain.sites();
        let occupations = if beta == 0.0 {
            vec![0.5; n]
        } else {
            let weights = self
                .eigen
                .values
                .iter()
                .map(|&e| numerics::fermi_weight(e, mu, beta))
                .collect::<Result<Vec<f64>>>()?;
            let u = &self.eigen.vectors;
            (0..n)
                .map(|i| {
                    weights
                        .iter()
                        .enumerate()
                        .map(|(m, w)| w * u[(i, m)].norm_sqr())
                        .sum::<f64>()
                        .clamp(0.0, 1.0)
                })
                .collect()
        };
        Ok(OccupationProfile {
            beta,
            mu,
            occupations,
        })
    }

    pub fn merit(&self, beta: f64, mu: f64) -> Result<MeritResult> {
        let profile = self.occupations(beta, mu)?;
        Ok(MeritResult {
            lambda_avg: average_contrast(&self.chain, &profile),
            lambda_min: min_pair_contrast(&self.chain, &profile),
            alpha: self.chain.model.alpha(),
            beta,
            mu,
            cells: self.chain.cells,
            disorder: self.chain.disorder,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeritResult {
    /// `|mean_edge ⟨N⟩ − mean_bulk ⟨N⟩|`.
    pub lambda_avg: f64,
    /// `min_{i∈edge, j∈bulk} |⟨N_i⟩ − ⟨N_j⟩|`.
    pub lambda_min: f64,
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub cells: usize,
    pub disorder: Option<DisorderSpec>,
}

fn mean_over(values: &[f64], idx: &[usize]) -> f64 {
    idx.iter().map(|&i| values[i]).sum::<f64>() / idx.len() as f64
}

fn average_contrast(chain: &OpenChain, profile: &OccupationProfile) -> f64 {
    let n = &profile.occupations;
    (mean_over(n, &chain.edge_sites) - mean_over(n, &chain.bulk_sites)).abs()
}

fn min_pair_contrast(chain: &OpenChain, profile: &OccupationProfile) -> f64 {
    let n = &profile.occupations;
    chain
        .edge_sites
        .iter()
        .flat_map(|&i| chain.bulk_sites.iter().map(move |&j| (n[i] - n[j]).abs()))
        .fold(f64::INFINITY, f64::min)
}

pub fn occupations(chain: &OpenChain, beta: f64, mu: f64) -> Result<OccupationProfile> {
    ChainSpectrum::new(chain.clone())?.occupations(beta, mu)
}

/// Average edge/bulk occupation contrast.
pub fn merit_average(chain: &OpenChain, beta: f64, mu: f64) -> Result<f64> {
    Ok(average_contrast(chain, &occupations(chain, beta, mu)?))
}

/// Smallest occupation distance between any edge site and any bulk site.
pub fn merit_min(chain: &OpenChain, beta: f64, mu: f64) -> Result<f64> {
    Ok(min_pair_contrast(chain, &occupations(chain, beta, mu)?))
}

/// Closed-form figure of merit at the SSH flat-band points `α = ±1`.
///
/// At `α = −1` the two edge sites host exact zero modes and every bulk site sits
/// on an isolated dimer with energies `±2`, so
/// `Λ = f(0) − [f(2) + f(−2)]/2`; at `α = +1` every site is dimerized and `Λ = 0`.
pub fn flat_band_oracle(alpha: f64, beta: f64, mu: f64) -> Result<f64> {
    let f = |e: f64| numerics::fermi_weight(e, mu, beta);
    if alpha == -1.0 {
        Ok(f(0.0)? - 0.5 * (f(2.0)? + f(-2.0)?))
    } else if alpha == 1.0 {
        f(0.0)?;
        Ok(0.0)
    } else {
        Err(Error::domain(format!(
            "flat-band closed form exists only at alpha = +-1, got {alpha}"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub min: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Self {
            mean,
            std: var.sqrt(),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisorderStats {
    pub clean: MeritResult,
    pub strength: f64,
    pub trials: usize,
    pub root_seed: u64,
    pub lambda_avg: Summary,
    pub lambda_min: Summary,
    /// Per-trial results, in trial order.
    pub samples: Vec<MeritResult>,
}

/// Seed of trial `trial` derived from `root` (SplitMix64 finalizer).
pub fn trial_seed(root: u64, trial: u64) -> u64 {
    let mut z = root.wrapping_add(trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Figures of merit over `trials` seeded bond-disorder realizations.
pub fn disorder_robustness(
    model: &BlochModel,
    cells: usize,
    beta: f64,
    mu: f64,
    strength: f64,
    trials: usize,
    root_seed: u64,
) -> Result<DisorderStats> {
    if trials == 0 {
        return Err(Error::validation("need at least one disorder trial"));
    }
    DisorderSpec::new(strength, root_seed)?;
    let clean = ChainSpectrum::new(build_open_chain(model, cells, None)?)?.merit(beta, mu)?;
    let samples = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let spec = DisorderSpec::new(strength, trial_seed(root_seed, t))?;
            ChainSpectrum::new(build_open_chain(model, cells, Some(spec))?)?.merit(beta, mu)
        })
        .collect::<Result<Vec<_>>>()?;
    let avg: Vec<f64> = samples.iter().map(|s| s.lambda_avg).collect();
    let min: Vec<f64> = samples.iter().map(|s| s.lambda_min).collect();
    Ok(DisorderStats {
        clean,
        strength,
        trials,
        root_seed,
        lambda_avg: Summary::of(&avg),
        lambda_min: Summary::of(&min),
        samples,
    })
}
