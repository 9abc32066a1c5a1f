//! Bulk invariants on a discretized Brillouin zone: band sampling, the winding
//! number of the planar d-vector, and per-band Zak phases from closed Wilson
//! loops.

use std::f64::consts::PI;

use nalgebra::Vector2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::BlochModel;
use crate::numerics::{self, C64};

/// Band gaps at or below this value are treated as closed.
pub const GAP_TOL: f64 = 1e-8;

/// Link overlaps below this modulus make the Wilson loop unresolvable.
pub const MIN_LINK_OVERLAP: f64 = 1e-12;

/// Tolerance on `|e^{iγ} − e^{iγ'}|` for the Berry/winding relation.
pub const RELATION_TOL: f64 = 1e-6;

pub const DEFAULT_NK: usize = 512;
pub const QUICK_NK: usize = 64;
pub const MIN_NK: usize = 16;

/// Uniform grid `k_m = −π + 2πm/N`, `m = 0..N`; the point `k_N = π` is
/// identified with `k_0`, so the loop closes on the first sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BzGrid {
    n_k: usize,
}

impl BzGrid {
    pub fn new(n_k: usize) -> Result<Self> {
        if n_k < MIN_NK {
            return Err(Error::validation(format!(
                "need at least {MIN_NK} k-points, got {n_k}"
            )));
        }
        Ok(Self { n_k })
    }

    pub fn len(&self) -> usize {
        self.n_k
    }

    pub fn is_empty(&self) -> bool {
        self.n_k == 0
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n_k as f64
    }

    pub fn k(&self, m: usize) -> f64 {
        -PI + 2.0 * PI * m as f64 / self.n_k as f64
    }

    /// The `N` distinct sample points.
    pub fn points(&self) -> Vec<f64> {
        (0..self.n_k).map(|m| self.k(m)).collect()
    }

    /// `N + 1` points with the first repeated at the end.
    pub fn closed_points(&self) -> Vec<f64> {
        let mut p = self.points();
        p.push(p[0]);
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BandIndex {
    Lower,
    Upper,
}

impl BandIndex {
    pub const BOTH: [BandIndex; 2] = [BandIndex::Lower, BandIndex::Upper];

    pub fn idx(self) -> usize {
        match self {
            BandIndex::Lower => 0,
            BandIndex::Upper => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub energies: Vec<f64>,
    pub vectors: Vec<Vector2<C64>>,
}

/// Band energies and gauge-fixed eigenvectors on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BandData {
    pub grid: BzGrid,
    pub bands: [Band; 2],
    /// `min_k (ε₊ − ε₋)`.
    pub gap: f64,
    pub chiral_axis: [f64; 3],
}

impl BandData {
    pub fn band(&self, which: BandIndex) -> &Band {
        &self.bands[which.idx()]
    }

    pub fn is_gapped(&self) -> bool {
        self.gap > GAP_TOL
    }

    /// Multiply each eigenvector of `which` by `e^{iθ_m}`.
    pub fn regauge(&mut self, which: BandIndex, phases: &[f64]) {
        let band = &mut self.bands[which.idx()];
        for (v, &t) in band.vectors.iter_mut().zip(phases) {
            *v *= C64::from_polar(1.0, t);
        }
    }
}

pub fn sample_bands(model: &BlochModel, grid: BzGrid) -> Result<BandData> {
    let n = grid.len();
    let mut lower = Band {
        energies: Vec::with_capacity(n),
        vectors: Vec::with_capacity(n),
    };
    let mut upper = lower.clone();
    let mut gap = f64::INFINITY;
    for m in 0..n {
        let e = numerics::eig_hermitian_2x2(&model.hamiltonian(grid.k(m)))?;
        gap = gap.min(e.values[1] - e.values[0]);
        lower.energies.push(e.values[0]);
        lower.vectors.push(e.vectors[0]);
        upper.energies.push(e.values[1]);
        upper.vectors.push(e.vectors[1]);
    }
    Ok(BandData {
        grid,
        bands: [lower, upper],
        gap,
        chiral_axis: model.chiral_axis,
    })
}

/// Orthonormal `(e₁, e₂)` spanning the plane ⊥ `n`, with `(e₁, e₂, n)` right-handed.
///
/// `e₁` comes from the coordinate axis along which `n` has the smallest
/// component (first axis on ties).
pub fn plane_basis(n: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let mut pivot = 0;
    for i in 1..3 {
        if n[i].abs() < n[pivot].abs() {
            pivot = i;
        }
    }
    let mut e1 = [0.0; 3];
    e1[pivot] = 1.0;
    let proj = n[pivot];
    for i in 0..3 {
        e1[i] -= proj * n[i];
    }
    let norm = dot(e1, e1).sqrt();
    for x in &mut e1 {
        *x /= norm;
    }
    (e1, cross(n, e1))
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Winding of a planar curve sampled on a closed loop, given the plane normal.
///
/// Fails with [`Error::Gapless`] if any sample sits within `GAP_TOL / 2` of the
/// origin and with [`Error::MeshTooCoarse`] if consecutive samples turn by
/// `π − 0.1` or more.
pub fn winding_of_curve(samples: &[[f64; 3]], normal: [f64; 3]) -> Result<i64> {
    let (e1, e2) = plane_basis(normal);
    let mut angles = Vec::with_capacity(samples.len());
    let mut min_len = f64::INFINITY;
    for &d in samples {
        let (x, y) = (dot(d, e1), dot(d, e2));
        min_len = min_len.min(dot(d, d).sqrt());
        angles.push(y.atan2(x));
    }
    // gap of d·σ is 2|d|
    if 2.0 * min_len <= GAP_TOL {
        return Err(Error::Gapless {
            gap: 2.0 * min_len,
            tol: GAP_TOL,
        });
    }
    let n = angles.len();
    let steps: Vec<f64> = (0..n).map(|m| angles[(m + 1) % n] - angles[m]).collect();
    let total = numerics::unwrap_phase_increments(&steps)?;
    let turns = total / (2.0 * PI);
    let nu = turns.round();
    if (total - 2.0 * PI * nu).abs() > 1e-9 {
        return Err(Error::mesh(format!(
            "closed-loop phase {total} is not a multiple of 2 pi"
        )));
    }
    Ok(nu as i64)
}

/// Winding number of `d̂(k)` around the chiral axis.
pub fn winding_number(model: &BlochModel, grid: BzGrid) -> Result<i64> {
    model.check_chiral(grid.len())?;
    let samples: Vec<[f64; 3]> = grid.points().into_iter().map(|q| model.dvec(q)).collect();
    winding_of_curve(&samples, model.chiral_axis)
}

/// `Π_m u_m/|u_m|` over the closed loop, `u_m = ⟨v_m|v_{m+1}⟩` with `v_N = v_0`.
pub fn wilson_loop(vectors: &[Vector2<C64>]) -> Result<C64> {
    let n = vectors.len();
    let mut acc = C64::new(1.0, 0.0);
    for m in 0..n {
        let u = vectors[m].dotc(&vectors[(m + 1) % n]);
        let mag = u.norm();
        if mag < MIN_LINK_OVERLAP {
            return Err(Error::mesh(format!(
                "link overlap {mag:e} between k-points {m} and {}",
                (m + 1) % n
            )));
        }
        acc *= u / mag;
    }
    Ok(acc)
}

/// Zak phase `γ = −arg Π_m ⟨μ(k_m)|μ(k_{m+1})⟩` of one band, principal value.
pub fn zak_phase(bands: &BandData, which: BandIndex) -> Result<f64> {
    if !bands.is_gapped() {
        return Err(Error::Gapless {
            gap: bands.gap,
            tol: GAP_TOL,
        });
    }
    let w = wilson_loop(&bands.band(which).vectors)?;
    Ok(numerics::principal_arg(w.conj()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BerryWindingReport {
    pub nu: i64,
    pub gamma_minus: f64,
    pub gamma_plus: f64,
    /// `|e^{iγ₋} − e^{iπν}|`.
    pub deviation_minus: f64,
    /// `|e^{iγ₊} − e^{−iπν}|`.
    pub deviation_plus: f64,
}

impl BerryWindingReport {
    pub fn holds(&self) -> bool {
        self.deviation_minus <= RELATION_TOL && self.deviation_plus <= RELATION_TOL
    }
}

/// Compare the Zak phases of both bands with `γ₋ = −γ₊ = πν`.
pub fn check_berry_winding_relation(model: &BlochModel, grid: BzGrid) -> Result<BerryWindingReport> {
    let nu = winding_number(model, grid)?;
    let bands = sample_bands(model, grid)?;
    let gamma_minus = zak_phase(&bands, BandIndex::Lower)?;
    let gamma_plus = zak_phase(&bands, BandIndex::Upper)?;
    let pi_nu = PI * nu as f64;
    Ok(BerryWindingReport {
        nu,
        gamma_minus,
        gamma_plus,
        deviation_minus: numerics::phase_distance(gamma_minus, pi_nu),
        deviation_plus: numerics::phase_distance(gamma_plus, -pi_nu),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{cl_bloch, ssh_bloch};
    use std::f64::consts::FRAC_PI_2;

    fn grid(n: usize) -> BzGrid {
        BzGrid::new(n).unwrap()
    }

    #[test]
    fn grid_layout() {
        let g = grid(16);
        let p = g.closed_points();
        assert_eq!(p.len(), 17);
        assert_eq!(p[0], -PI);
        assert_eq!(p[16], p[0]);
        assert!((p[1] - p[0] - g.spacing()).abs() < 1e-15);
        assert!(BzGrid::new(15).is_err());
    }

    #[test]
    fn flat_band_energies() {
        let b = sample_bands(&ssh_bloch(1.0, -1.0).unwrap(), grid(64)).unwrap();
        for (lo, hi) in b.bands[0].energies.iter().zip(&b.bands[1].energies) {
            assert!((lo + 2.0).abs() < 1e-14 && (hi - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn transition_point_is_gapless() {
        let b = sample_bands(&ssh_bloch(1.0, 0.0).unwrap(), grid(512)).unwrap();
        assert!(b.gap < 1e-12);
        assert!(!b.is_gapped());
    }

    #[test]
    fn traceless_bands_are_mirror_images() {
        let b = sample_bands(&cl_bloch(1.0, FRAC_PI_2, 1.2).unwrap(), grid(128)).unwrap();
        for (lo, hi) in b.bands[0].energies.iter().zip(&b.bands[1].energies) {
            assert!((lo + hi).abs() < 1e-14);
        }
    }

    #[test]
    fn plane_basis_is_right_handed() {
        for n in [[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [0.6, 0.0, 0.8]] {
            let (e1, e2) = plane_basis(n);
            assert!(dot(e1, n).abs() < 1e-15 && dot(e2, n).abs() < 1e-15);
            assert!(dot(e1, e2).abs() < 1e-15);
            let c = cross(e1, e2);
            for i in 0..3 {
                assert!((c[i] - n[i]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn windings() {
        let g = grid(DEFAULT_NK);
        assert_eq!(winding_number(&ssh_bloch(1.0, -0.5).unwrap(), g).unwrap(), 1);
        assert_eq!(winding_number(&ssh_bloch(1.0, 0.5).unwrap(), g).unwrap(), 0);
        assert_eq!(
            winding_number(&cl_bloch(1.0, FRAC_PI_2, 1.0).unwrap(), g).unwrap(),
            1
        );
        assert_eq!(
            winding_number(&cl_bloch(1.0, FRAC_PI_2, 3.0).unwrap(), g).unwrap(),
            0
        );
    }

    #[test]
    fn constant_vector_does_not_wind() {
        let samples = vec![[1.0, 0.0, 0.0]; 32];
        assert_eq!(winding_of_curve(&samples, [0.0, 0.0, 1.0]).unwrap(), 0);
    }

    #[test]
    fn double_winding_and_orientation() {
        let n = 64;
        let loop2: Vec<[f64; 3]> = (0..n)
            .map(|m| {
                let t = 4.0 * PI * m as f64 / n as f64;
                [t.cos(), t.sin(), 0.0]
            })
            .collect();
        assert_eq!(winding_of_curve(&loop2, [0.0, 0.0, 1.0]).unwrap(), 2);
        assert_eq!(winding_of_curve(&loop2, [0.0, 0.0, -1.0]).unwrap(), -2);
    }

    #[test]
    fn gapless_and_coarse_errors() {
        let g = grid(512);
        assert!(matches!(
            winding_number(&ssh_bloch(1.0, 0.0).unwrap(), g),
            Err(Error::Gapless { .. })
        ));
        // consecutive samples 3.1 rad apart cannot be unwrapped reliably
        let n = 16;
        let fast: Vec<[f64; 3]> = (0..n)
            .map(|m| {
                let t = 3.1 * m as f64;
                [t.cos(), t.sin(), 0.0]
            })
            .collect();
        assert!(matches!(
            winding_of_curve(&fast, [0.0, 0.0, 1.0]),
            Err(Error::MeshTooCoarse { .. })
        ));
    }

    #[test]
    fn winding_requires_chiral_symmetry() {
        let m = cl_bloch(1.0, 0.2, 1.0).unwrap();
        assert!(matches!(
            winding_number(&m, grid(64)),
            Err(Error::ChiralSymmetry(_))
        ));
    }

    #[test]
    fn zak_phases_match_winding() {
        let g = grid(DEFAULT_NK);
        let topo = sample_bands(&ssh_bloch(1.0, -0.5).unwrap(), g).unwrap();
        let g_lo = zak_phase(&topo, BandIndex::Lower).unwrap();
        assert!(numerics::phase_distance(g_lo, PI) < 1e-6);
        let triv = sample_bands(&ssh_bloch(1.0, 0.5).unwrap(), g).unwrap();
        assert!(zak_phase(&triv, BandIndex::Lower).unwrap().abs() < 1e-6);
    }

    #[test]
    fn constant_eigenvectors_have_zero_zak_phase() {
        // d = (0,0,1) everywhere: eigenvectors are k-independent
        let v = vec![Vector2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0)); 32];
        let w = wilson_loop(&v).unwrap();
        assert_eq!(w, C64::new(1.0, 0.0));
    }

    #[test]
    fn gapless_zak_rejected() {
        let b = sample_bands(&ssh_bloch(1.0, 0.0).unwrap(), grid(64)).unwrap();
        assert!(matches!(
            zak_phase(&b, BandIndex::Lower),
            Err(Error::Gapless { .. })
        ));
    }

    #[test]
    fn vanishing_link_is_mesh_error() {
        let a = Vector2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        let b = Vector2::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        assert!(matches!(wilson_loop(&[a, b]), Err(Error::MeshTooCoarse { .. })));
    }

    #[test]
    fn berry_winding_relation() {
        let g = grid(DEFAULT_NK);
        let r = check_berry_winding_relation(&ssh_bloch(1.0, -0.5).unwrap(), g).unwrap();
        assert_eq!(r.nu, 1);
        assert!(r.holds());
        let r = check_berry_winding_relation(&ssh_bloch(1.0, 0.5).unwrap(), g).unwrap();
        assert_eq!(r.nu, 0);
        assert!(r.holds());
        let r = check_berry_winding_relation(&cl_bloch(1.0, FRAC_PI_2, 1.0).unwrap(), g).unwrap();
        assert_eq!(r.nu, 1);
        assert!(r.holds());
    }
}
