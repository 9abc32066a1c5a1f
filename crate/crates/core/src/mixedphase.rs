//! Kinematic geometric phase of the thermal one-body density matrix
//! `ρ(k) = Σ_± ω_±(k) |μ_±(k)⟩⟨μ_±(k)|` transported around the Brillouin zone.
//!
//! The phase of a closed path of density matrices is
//! `arg Σ_j √(p_j(0) p_j(τ)) ⟨φ_j(0)|φ_j(τ)⟩ e^{−∮⟨φ_j|∂φ_j⟩}`. On a k-grid the
//! holonomy factor of each eigenvector branch is the conjugate of the
//! normalized Wilson loop `Π u/|u|`, which equals `e^{iγ_j}` with `γ_j` the Zak
//! phase of band `j`. Three regimes are distinguished:
//!
//! * `β > 0`, gapped: `γ[P] = arg Σ_j ω_j(π) e^{iγ_j}`, which the winding
//!   relation reduces to `arg cos(πν)`.
//! * `β = 0`: `ρ(k) = I/2` is degenerate, the block transport leaves any frame
//!   fixed and `γ[P] = 0`.
//! * `β > 0`, gapless: undefined.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::BlochModel;
use crate::numerics::{self, C64};
use crate::topology::{self, BandData, BandIndex, BzGrid, GAP_TOL};

/// Weights closer than this are flagged as degenerate.
pub const WEIGHT_TOL: f64 = 1e-12;

/// Smallest `|Σ|` whose argument is reported.
pub const ARG_TOL: f64 = 1e-10;

/// Fermi-weighted spectral path `k ↦ ρ(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedPath {
    pub bands: BandData,
    /// `ω_±(k_m)`, indexed like [`BandIndex`].
    pub weights: [Vec<f64>; 2],
    pub beta: f64,
    pub mu: f64,
    /// `max_k |ω₊ − ω₋| < WEIGHT_TOL`.
    pub degenerate: bool,
}

impl MixedPath {
    pub fn grid(&self) -> BzGrid {
        self.bands.grid
    }

    /// `ω_j(π) = ω_j(−π)`, read at the first grid point.
    pub fn weight_at_boundary(&self, which: BandIndex) -> f64 {
        self.weights[which.idx()][0]
    }

    pub fn regauge(&mut self, which: BandIndex, phases: &[f64]) {
        self.bands.regauge(which, phases);
    }
}

pub fn build_mixed_path(model: &BlochModel, grid: BzGrid, beta: f64, mu: f64) -> Result<MixedPath> {
    let bands = topology::sample_bands(model, grid)?;
    mixed_path_from_bands(bands, beta, mu)
}

pub fn mixed_path_from_bands(bands: BandData, beta: f64, mu: f64) -> Result<MixedPath> {
    let weigh = |band: BandIndex| -> Result<Vec<f64>> {
        bands
            .band(band)
            .energies
            .iter()
            .map(|&e| numerics::fermi_weight(e, mu, beta))
            .collect()
    };
    let lower = weigh(BandIndex::Lower)?;
    let upper = weigh(BandIndex::Upper)?;
    let spread = lower
        .iter()
        .zip(&upper)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(MixedPath {
        bands,
        weights: [lower, upper],
        beta,
        mu,
        degenerate: spread < WEIGHT_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    FiniteTGapped,
    InfiniteT,
    GaplessIllDefined,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::FiniteTGapped => "finite-t-gapped",
            Branch::InfiniteT => "infinite-t",
            Branch::GaplessIllDefined => "gapless-ill-defined",
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PhaseDiagnostics {
    /// `|Σ_j ω_j h_j|` before taking the argument.
    pub sum_modulus: Option<f64>,
    /// Holonomy factors `h_j = e^{iγ_j}` of the lower and upper branch, as `(re, im)`.
    pub holonomies: Option<[(f64, f64); 2]>,
    /// Discrete evaluation, when it was run as a cross-check.
    pub discrete: Option<f64>,
    /// Closed form `arg Σ_j ω_j(π) e^{iγ_j}`, when it was run as a cross-check.
    pub closed_form: Option<f64>,
    /// `|e^{iγ_discrete} − e^{iγ}|`.
    pub discrepancy: Option<f64>,
    pub degenerate_weights: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseResult {
    /// Phase in `(−π, π]`; `None` means undefined.
    pub value: Option<f64>,
    pub branch: Branch,
    pub diagnostics: PhaseDiagnostics,
}

impl PhaseResult {
    fn undefined(diagnostics: PhaseDiagnostics) -> Self {
        Self {
            value: None,
            branch: Branch::GaplessIllDefined,
            diagnostics,
        }
    }

    pub fn is_defined(&self) -> bool {
        self.value.is_some()
    }
}

/// Discretely parallel-transported eigenvector frame.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportedFrame {
    /// `N + 1` vectors; the last is the transport of the first around the loop.
    pub frame: Vec<Vector2<C64>>,
    /// `⟨φ∥(k_0)|φ∥(k_N)⟩`.
    pub holonomy: C64,
}

/// Rephase each eigenvector so that successive overlaps are real and positive.
///
/// `vectors` holds one eigenvector per grid point; the loop is closed by
/// transporting onto `vectors[0]` once more. The end overlap equals the
/// conjugate of the normalized Wilson loop, i.e. `e^{iγ}`.
pub fn parallel_transport_path(vectors: &[Vector2<C64>]) -> Result<TransportedFrame> {
    let n = vectors.len();
    if n == 0 {
        return Err(Error::validation("cannot transport an empty path"));
    }
    let mut frame = Vec::with_capacity(n + 1);
    frame.push(vectors[0]);
    for m in 1..=n {
        let next = vectors[m % n];
        let u = frame[m - 1].dotc(&next);
        let mag = u.norm();
        if mag < topology::MIN_LINK_OVERLAP {
            return Err(Error::mesh(format!(
                "vanishing overlap {mag:e} at transport step {m}"
            )));
        }
        frame.push(next * (u.conj() / mag));
    }
    let holonomy = frame[0].dotc(&frame[n]);
    Ok(TransportedFrame { frame, holonomy })
}

/// Block parallel transport of a frame through a degenerate subspace.
///
/// At each step the frame is mapped into the subspace spanned by `bases[m]`
/// and rotated by the unitary polar factor of the overlap, which makes
/// `⟨φ^a(k_m)|φ^b(k_{m+1})⟩` Hermitian positive (the discrete form of
/// `⟨φ^a|∂φ^b⟩ = 0`). Returns the final frame after closing the loop.
pub fn block_transport(start: Matrix2<C64>, bases: &[Matrix2<C64>]) -> Result<Matrix2<C64>> {
    let n = bases.len();
    let mut frame = start;
    for m in 1..=n {
        let basis = bases[m % n];
        let overlap = basis.adjoint() * frame;
        let svd = overlap.svd(true, true);
        if svd.singular_values.min() < topology::MIN_LINK_OVERLAP {
            return Err(Error::mesh(format!("singular block overlap at step {m}")));
        }
        let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
        frame = basis * (u * v_t);
    }
    Ok(frame)
}

/// Evaluate `γ[P]` directly from the sampled path.
pub fn geometric_phase_discrete(path: &MixedPath) -> Result<PhaseResult> {
    let mut diag = PhaseDiagnostics {
        degenerate_weights: path.degenerate,
        ..Default::default()
    };

    if path.beta == 0.0 {
        // ρ(k) = I/2: transport the canonical basis through the full space.
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let start = Matrix2::new(one, zero, zero, one);
        let bases: Vec<Matrix2<C64>> = (0..path.grid().len())
            .map(|m| Matrix2::from_columns(&[path.bands.bands[0].vectors[m], path.bands.bands[1].vectors[m]]))
            .collect();
        let end = block_transport(start, &bases)?;
        let overlap = start.adjoint() * end;
        let sum: C64 = BandIndex::BOTH
            .iter()
            .map(|&b| path.weight_at_boundary(b) * overlap[(b.idx(), b.idx())])
            .sum();
        diag.sum_modulus = Some(sum.norm());
        diag.holonomies = Some([
            (overlap[(0, 0)].re, overlap[(0, 0)].im),
            (overlap[(1, 1)].re, overlap[(1, 1)].im),
        ]);
        // the frame returns to itself up to rounding; the phase is exactly zero
        let value = if (sum - C64::new(sum.norm(), 0.0)).norm() <= 1e-12 {
            0.0
        } else {
            numerics::principal_arg(sum)
        };
        return Ok(PhaseResult {
            value: Some(value),
            branch: Branch::InfiniteT,
            diagnostics: diag,
        });
    }

    if !path.bands.is_gapped() {
        return Ok(PhaseResult::undefined(diag));
    }

    let mut holonomies = [C64::new(0.0, 0.0); 2];
    for b in BandIndex::BOTH {
        holonomies[b.idx()] = topology::wilson_loop(&path.bands.band(b).vectors)?.conj();
    }
    let sum: C64 = BandIndex::BOTH
        .iter()
        .map(|&b| path.weight_at_boundary(b) * holonomies[b.idx()])
        .sum();
    diag.sum_modulus = Some(sum.norm());
    diag.holonomies = Some(holonomies.map(|h| (h.re, h.im)));
    if sum.norm() < ARG_TOL {
        return Err(Error::IllConditionedArg { modulus: sum.norm() });
    }
    Ok(PhaseResult {
        value: Some(numerics::principal_arg(sum)),
        branch: Branch::FiniteTGapped,
        diagnostics: diag,
    })
}

/// `arg[ω₋(π) e^{iγ₋} + ω₊(π) e^{iγ₊}]` from the band Zak phases.
pub fn geometric_phase_closed_form(path: &MixedPath, gamma_minus: f64, gamma_plus: f64) -> Result<f64> {
    if path.beta <= 0.0 {
        return Err(Error::domain("closed form requires beta > 0"));
    }
    if !path.bands.is_gapped() {
        return Err(Error::Gapless {
            gap: path.bands.gap,
            tol: GAP_TOL,
        });
    }
    let sum = path.weight_at_boundary(BandIndex::Lower) * C64::from_polar(1.0, gamma_minus)
        + path.weight_at_boundary(BandIndex::Upper) * C64::from_polar(1.0, gamma_plus);
    if sum.norm() < ARG_TOL {
        return Err(Error::IllConditionedArg { modulus: sum.norm() });
    }
    Ok(numerics::principal_arg(sum))
}

/// `arg[cos(πν)]`: `π` for odd winding, `0` for even.
pub fn quantized_phase(nu: i64) -> f64 {
    if nu.rem_euclid(2) == 0 {
        0.0
    } else {
        PI
    }
}

/// Bulk data of one model on one grid, reusable across temperatures.
#[derive(Debug, Clone)]
pub struct BulkAnalysis {
    pub bands: BandData,
    /// Winding number, or the reason it is unavailable.
    pub winding: Result<i64>,
    /// Zak phases `(γ₋, γ₊)` when the bands are gapped.
    pub zak: Option<(f64, f64)>,
}

impl BulkAnalysis {
    pub fn new(model: &BlochModel, grid: BzGrid) -> Result<Self> {
        let bands = topology::sample_bands(model, grid)?;
        let winding = topology::winding_number(model, grid);
        let zak = if bands.is_gapped() {
            Some((
                topology::zak_phase(&bands, BandIndex::Lower)?,
                topology::zak_phase(&bands, BandIndex::Upper)?,
            ))
        } else {
            None
        };
        Ok(Self { bands, winding, zak })
    }

    pub fn gap(&self) -> f64 {
        self.bands.gap
    }

    /// `γ[P] = (1 − δ_{β,0}) arg[cos(πν)]`, cross-checked against the discrete
    /// and closed-form evaluations.
    pub fn measure(&self, beta: f64, mu: f64) -> Result<PhaseResult> {
        let path = mixed_path_from_bands(self.bands.clone(), beta, mu)?;
        let discrete = geometric_phase_discrete(&path)?;
        match discrete.branch {
            Branch::InfiniteT => Ok(PhaseResult {
                value: Some(0.0),
                ..discrete
            }),
            Branch::GaplessIllDefined => Ok(discrete),
            Branch::FiniteTGapped => {
                let nu = self.winding.clone()?;
                let value = quantized_phase(nu);
                let (gm, gp) = self.zak.expect("gapped bands carry Zak phases");
                let closed = geometric_phase_closed_form(&path, gm, gp)?;
                let mut diagnostics = discrete.diagnostics;
                diagnostics.discrete = discrete.value;
                diagnostics.closed_form = Some(closed);
                diagnostics.discrepancy = discrete.value.map(|d| numerics::phase_distance(d, value));
                Ok(PhaseResult {
                    value: Some(value),
                    branch: Branch::FiniteTGapped,
                    diagnostics,
                })
            }
        }
    }
}

/// Topological measure of a model at inverse temperature `β` and chemical potential `μ`.
pub fn topological_measure(model: &BlochModel, grid: BzGrid, beta: f64, mu: f64) -> Result<PhaseResult> {
    numerics::fermi_weight(0.0, mu, beta)?;
    BulkAnalysis::new(model, grid)?.measure(beta, mu)
}
