//! Two-band chiral chain models: the SSH chain and the Creutz ladder.
//!
//! Momentum space uses `H(k) = d₀(k)·I + d(k)·σ`. Real space uses the flat site
//! index `2j + s` for cell `j` and sublattice `s` (0 = A / upper leg,
//! 1 = B / lower leg). The Fourier convention is `c_j = L^{-1/2} Σ_k e^{ikj} c_k`,
//! so a hopping `t·c†_{j,s} c_{j+δ,s'}` contributes `t·e^{ikδ}` to `H_{ss'}(k)`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, Matrix2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, HermitianMatrix, C64};

/// Default chemical potential used throughout.
pub const DEFAULT_MU: f64 = 0.1;

/// Tolerance for the chiral constraints `n·d(k) = 0` and `d₀(k) = 0`.
pub const CHIRAL_TOL: f64 = 1e-10;

/// Smallest number of unit cells accepted for real-space chains.
pub const MIN_CELLS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelName {
    Ssh,
    Cl,
}

impl ModelName {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelName::Ssh => "ssh",
            ModelName::Cl => "cl",
        }
    }
}

impl std::fmt::Display for ModelName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ModelName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ssh" => Ok(ModelName::Ssh),
            "cl" | "creutz" => Ok(ModelName::Cl),
            other => Err(Error::validation(format!("unknown model '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum ModelParams {
    /// Intracell hopping `J + α`, intercell hopping `J − α`.
    Ssh { j: f64, alpha: f64 },
    /// Horizontal/diagonal hopping `k`, flux `theta`, rung hopping `m`.
    Cl { k: f64, theta: f64, m: f64 },
}

/// A two-band Bloch Hamiltonian with its chiral axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochModel {
    pub params: ModelParams,
    /// Unit vector `n` with `Γ = n·σ`.
    pub chiral_axis: [f64; 3],
}

/// Build the SSH model with intracell `J + α` and intercell `J − α`.
pub fn ssh_bloch(j: f64, alpha: f64) -> Result<BlochModel> {
    if !(j.is_finite() && alpha.is_finite()) {
        return Err(Error::validation("SSH parameters must be finite"));
    }
    if j + alpha < 0.0 || j - alpha < 0.0 {
        return Err(Error::validation(format!(
            "SSH requires J + alpha >= 0 and J - alpha >= 0 (J = {j}, alpha = {alpha})"
        )));
    }
    Ok(BlochModel {
        params: ModelParams::Ssh { j, alpha },
        chiral_axis: [0.0, 0.0, 1.0],
    })
}

/// Build the Creutz ladder.
///
/// `d₀(k) = −2K cosθ cos k`, `d(k) = (−M − 2K cos k, 0, 2K sinθ sin k)`, with
/// chiral axis `ŷ`. Off `θ = π/2` the ladder is still constructible but `d₀`
/// breaks the chiral symmetry; see [`BlochModel::check_chiral`].
pub fn cl_bloch(k: f64, theta: f64, m: f64) -> Result<BlochModel> {
    if !(k.is_finite() && theta.is_finite() && m.is_finite()) {
        return Err(Error::validation("CL parameters must be finite"));
    }
    if k <= 0.0 {
        return Err(Error::validation(format!("CL requires K > 0, got {k}")));
    }
    if !(-FRAC_PI_2..=FRAC_PI_2).contains(&theta) {
        return Err(Error::validation(format!(
            "CL requires theta in [-pi/2, pi/2], got {theta}"
        )));
    }
    if m < 0.0 {
        return Err(Error::validation(format!("CL requires M >= 0, got {m}")));
    }
    Ok(BlochModel {
        params: ModelParams::Cl { k, theta, m },
        chiral_axis: [0.0, 1.0, 0.0],
    })
}

impl BlochModel {
    /// Build a model from its control parameter `α` at the standard point
    /// (`J = 1` for SSH; `K = 1`, `θ = π/2`, `M = 2K(1 + α)` for CL).
    pub fn from_alpha(name: ModelName, alpha: f64) -> Result<Self> {
        match name {
            ModelName::Ssh => ssh_bloch(1.0, alpha),
            ModelName::Cl => cl_bloch(1.0, FRAC_PI_2, 2.0 * (1.0 + alpha)),
        }
    }

    pub fn name(&self) -> ModelName {
        match self.params {
            ModelParams::Ssh { .. } => ModelName::Ssh,
            ModelParams::Cl { .. } => ModelName::Cl,
        }
    }

    /// Control parameter `α` (for CL, `α = −1 + M/(2K)`).
    pub fn alpha(&self) -> f64 {
        match self.params {
            ModelParams::Ssh { alpha, .. } => alpha,
            ModelParams::Cl { k, m, .. } => -1.0 + m / (2.0 * k),
        }
    }

    pub fn d0(&self, q: f64) -> f64 {
        match self.params {
            ModelParams::Ssh { .. } => 0.0,
            ModelParams::Cl { k, theta, .. } => -2.0 * k * theta.cos() * q.cos(),
        }
    }

    pub fn dvec(&self, q: f64) -> [f64; 3] {
        match self.params {
            ModelParams::Ssh { j, alpha } => {
                let (v, w) = (j + alpha, j - alpha);
                [v + w * q.cos(), w * q.sin(), 0.0]
            }
            ModelParams::Cl { k, theta, m } => [-m - 2.0 * k * q.cos(), 0.0, 2.0 * k * theta.sin() * q.sin()],
        }
    }

    /// `H(k) = d₀ + d·σ` as a 2×2 matrix.
    pub fn hamiltonian(&self, q: f64) -> Matrix2<C64> {
        let d0 = self.d0(q);
        let [dx, dy, dz] = self.dvec(q);
        Matrix2::new(
            C64::new(d0 + dz, 0.0),
            C64::new(dx, -dy),
            C64::new(dx, dy),
            C64::new(d0 - dz, 0.0),
        )
    }

    /// Check `d₀(k) = 0` and `n·d(k) = 0` on `n_k` uniform points of `[−π, π)`.
    pub fn check_chiral(&self, n_k: usize) -> Result<()> {
        let n = self.chiral_axis;
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if (norm - 1.0).abs() > 1e-14 {
            return Err(Error::ChiralSymmetry(format!(
                "chiral axis is not a unit vector (|n| = {norm})"
            )));
        }
        for m in 0..n_k.max(1) {
            let q = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * m as f64 / n_k as f64;
            let d0 = self.d0(q);
            if d0.abs() > CHIRAL_TOL {
                return Err(Error::ChiralSymmetry(format!(
                    "d0(k) = {d0:e} at k = {q:.6}; the chiral axis is undefined off theta = pi/2"
                )));
            }
            let d = self.dvec(q);
            let proj = n[0] * d[0] + n[1] * d[1] + n[2] * d[2];
            if proj.abs() > CHIRAL_TOL {
                return Err(Error::ChiralSymmetry(format!("n.d(k) = {proj:e} at k = {q:.6}")));
            }
        }
        Ok(())
    }

    /// Hopping terms `t·c†_to c_from` (Hermitian conjugates implied).
    fn bonds(&self, cells: usize, periodic: bool) -> Vec<Bond> {
        let site = |cell: usize, sub: usize| 2 * cell + sub;
        let mut out = Vec::new();
        match self.params {
            ModelParams::Ssh { j, alpha } => {
                let (v, w) = (j + alpha, j - alpha);
                for c in 0..cells {
                    out.push(Bond::new(site(c, 0), site(c, 1), C64::new(v, 0.0)));
                    if c >= 1 {
                        out.push(Bond::new(site(c, 0), site(c - 1, 1), C64::new(w, 0.0)));
                    } else if periodic {
                        out.push(Bond::new(site(c, 0), site(cells - 1, 1), C64::new(w, 0.0)));
                    }
                }
            }
            ModelParams::Cl { k, theta, m } => {
                let hop_a = -k * C64::from_polar(1.0, -theta);
                let hop_b = -k * C64::from_polar(1.0, theta);
                let diag = C64::new(-k, 0.0);
                for c in 0..cells {
                    out.push(Bond::new(site(c, 0), site(c, 1), C64::new(-m, 0.0)));
                    let next = if c + 1 < cells {
                        c + 1
                    } else if periodic {
                        0
                    } else {
                        continue;
                    };
                    out.push(Bond::new(site(next, 0), site(c, 0), hop_a));
                    out.push(Bond::new(site(next, 1), site(c, 1), hop_b));
                    out.push(Bond::new(site(next, 1), site(c, 0), diag));
                    out.push(Bond::new(site(next, 0), site(c, 1), diag));
                }
            }
        }
        out
    }

    /// Edge sites of an open chain with `cells` unit cells.
    pub fn edge_sites(&self, cells: usize) -> Vec<usize> {
        let last = 2 * cells - 1;
        match self.name() {
            ModelName::Ssh => vec![0, last],
            ModelName::Cl => vec![0, 1, last - 1, last],
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Bond {
    to: usize,
    from: usize,
    amplitude: C64,
}

impl Bond {
    fn new(to: usize, from: usize, amplitude: C64) -> Self {
        Self { to, from, amplitude }
    }
}

fn assemble(dim: usize, bonds: &[Bond]) -> Result<HermitianMatrix> {
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    for b in bonds {
        h[(b.to, b.from)] += b.amplitude;
        h[(b.from, b.to)] += b.amplitude.conj();
    }
    HermitianMatrix::new(h)
}

/// Seeded bond disorder: every hopping `t → t·(1 + w)`, `w ~ U[−W, W]`.
///
/// Only hopping magnitudes are perturbed, so the sublattice (chiral) structure
/// of both models survives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisorderSpec {
    pub strength: f64,
    pub seed: u64,
}

impl DisorderSpec {
    pub fn new(strength: f64, seed: u64) -> Result<Self> {
        if !strength.is_finite() || strength < 0.0 {
            return Err(Error::validation(format!(
                "disorder strength must be finite and >= 0, got {strength}"
            )));
        }
        Ok(Self { strength, seed })
    }

    fn apply(&self, bonds: &mut [Bond]) {
        if self.strength == 0.0 {
            return;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for b in bonds {
            let w: f64 = rng.random_range(-self.strength..=self.strength);
            b.amplitude *= 1.0 + w;
        }
    }
}

/// A finite open chain of `cells` unit cells.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenChain {
    pub model: BlochModel,
    pub cells: usize,
    pub hamiltonian: HermitianMatrix,
    pub edge_sites: Vec<usize>,
    pub bulk_sites: Vec<usize>,
    pub disorder: Option<DisorderSpec>,
}

impl OpenChain {
    pub fn sites(&self) -> usize {
        2 * self.cells
    }
}

fn check_cells(cells: usize) -> Result<()> {
    if cells < MIN_CELLS {
        return Err(Error::validation(format!(
            "need at least {MIN_CELLS} unit cells, got {cells}"
        )));
    }
    Ok(())
}

/// Real-space Hamiltonian under open boundary conditions.
pub fn build_open_chain(
    model: &BlochModel,
    cells: usize,
    disorder: Option<DisorderSpec>,
) -> Result<OpenChain> {
    check_cells(cells)?;
    let mut bonds = model.bonds(cells, false);
    if let Some(d) = &disorder {
        d.apply(&mut bonds);
    }
    let hamiltonian = assemble(2 * cells, &bonds)?;
    let edge_sites = model.edge_sites(cells);
    let bulk_sites = (0..2 * cells).filter(|i| !edge_sites.contains(i)).collect();
    Ok(OpenChain {
        model: *model,
        cells,
        hamiltonian,
        edge_sites,
        bulk_sites,
        disorder,
    })
}

/// Real-space Hamiltonian of the ring (periodic boundary conditions).
pub fn periodic_chain_matrix(model: &BlochModel, cells: usize) -> Result<HermitianMatrix> {
    check_cells(cells)?;
    assemble(2 * cells, &model.bonds(cells, true))
}

/// Sorted spectrum of the periodic ring, obtained by dense diagonalization.
///
/// Compare against [`bloch_ring_spectrum`]: the two agree iff the d-vector is
/// the Fourier transform of the real-space hoppings.
pub fn ring_spectrum_oracle(model: &BlochModel, cells: usize) -> Result<Vec<f64>> {
    let h = periodic_chain_matrix(model, cells)?;
    Ok(numerics::eig_hermitian(&h)?.values)
}

/// Sorted `{ε±(2πm/L)}` for `m = 0..L` from the Bloch Hamiltonian.
pub fn bloch_ring_spectrum(model: &BlochModel, cells: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * cells);
    for m in 0..cells {
        let q = 2.0 * std::f64::consts::PI * m as f64 / cells as f64;
        let e = numerics::eig_hermitian_2x2(&model.hamiltonian(q))?;
        out.extend_from_slice(&e.values);
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}
