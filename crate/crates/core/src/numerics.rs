//! Dense complex linear algebra and scalar helpers shared by the rest of the
//! crate.
//!
//! Two eigensolvers live here: a closed-form solver for 2×2 Hermitian
//! matrices (used for every Bloch Hamiltonian sample) and a dense N×N solver
//! for open-chain Hamiltonians. Both return eigenvalues in ascending order
//! and eigenvectors in a deterministic gauge: the component of largest
//! modulus is made real and positive (first index wins on ties).

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Absolute tolerance (relative to `max(1, ‖M‖_max)`) for the Hermiticity check.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Relative residual bound every returned decomposition satisfies.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Eigenvalues closer than `DEGENERACY_TOL * max(1, ‖H‖_max)` are degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Cap on the number of QR sweeps requested from the dense solver.
pub const MAX_SWEEPS: usize = 10_000;

/// Increments at or above this magnitude are rejected by the unwrapper.
pub const MAX_UNWRAP_STEP: f64 = PI - 0.1;

/// Largest entry modulus of a matrix.
pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// A square complex matrix validated as Hermitian at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(DMatrix<C64>);

impl HermitianMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::validation(format!(
                "expected a non-empty square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let dev = hermitian_deviation(&m);
        if dev > HERMITIAN_TOL * max_abs(&m).max(1.0) {
            return Err(Error::NonHermitian { deviation: dev });
        }
        Ok(Self(m))
    }

    pub fn from_real(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(|x| C64::new(x, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.0)
    }
}

/// Eigenvalues (ascending) with the matching unitary matrix of column eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `‖H·U − U·diag(λ)‖_max`.
    pub fn residual(&self, h: &DMatrix<C64>) -> f64 {
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(lam);
        }
        max_abs(&(h * &self.vectors - scaled))
    }

    /// `‖U†U − I‖_max`.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.dim();
        max_abs(&(self.vectors.adjoint() * &self.vectors - DMatrix::<C64>::identity(n, n)))
    }

    /// Number of eigenvalues with `|λ| <= tol`.
    pub fn count_near_zero(&self, tol: f64) -> usize {
        self.values.iter().filter(|v| v.abs() <= tol).count()
    }
}

/// Closed-form eigen-data of a 2×2 Hermitian matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen2 {
    /// `[lower, upper]`.
    pub values: [f64; 2],
    pub vectors: [Vector2<C64>; 2],
}

impl From<Eigen2> for EigenDecomposition {
    fn from(e: Eigen2) -> Self {
        let [lo, hi] = e.vectors;
        EigenDecomposition {
            values: e.values.to_vec(),
            vectors: DMatrix::from_fn(2, 2, |i, j| if j == 0 { lo[i] } else { hi[i] }),
        }
    }
}

/// Rotate `v` so that its largest-modulus component is real and positive.
fn fix_gauge<'a, I>(components: I) -> Option<C64>
where
    I: Iterator<Item = &'a C64>,
{
    let mut best: Option<(f64, C64)> = None;
    for z in components {
        let m = z.norm();
        match best {
            Some((bm, _)) if m <= bm * (1.0 + 1e-12) => {}
            _ => best = Some((m, *z)),
        }
    }
    let (m, z) = best?;
    (m > 0.0).then(|| z.conj() / m)
}

fn gauge_fixed2(v: Vector2<C64>) -> Vector2<C64> {
    let v = v.unscale(v.norm());
    match fix_gauge(v.iter()) {
        Some(phase) => v * phase,
        None => v,
    }
}

/// Analytic eigen-decomposition of a 2×2 Hermitian matrix.
///
/// Writing `H = m·I + d_z σ_z + Re(b) σ_x − Im(b) σ_y` with `b = H[0,1]`,
/// the eigenvalues are `m ∓ r` with `r = sqrt(d_z² + |b|²)`. Each eigenvector
/// is taken from whichever row of `H − λ` is better conditioned. For an exactly
/// degenerate matrix the canonical basis `(1,0)`, `(0,1)` is returned.
pub fn eig_hermitian_2x2(h: &Matrix2<C64>) -> Result<Eigen2> {
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let dev = (h[(0, 1)] - h[(1, 0)].conj())
        .norm()
        .max(h[(0, 0)].im.abs())
        .max(h[(1, 1)].im.abs());
    if dev > HERMITIAN_TOL * scale {
        return Err(Error::NonHermitian { deviation: dev });
    }

    let a = h[(0, 0)].re;
    let c = h[(1, 1)].re;
    let b = h[(0, 1)];
    let mean = 0.5 * (a + c);
    let dz = 0.5 * (a - c);
    let r = dz.hypot(b.norm());

    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    if r == 0.0 {
        return Ok(Eigen2 {
            values: [mean, mean],
            vectors: [Vector2::new(one, zero), Vector2::new(zero, one)],
        });
    }

    let (lower, upper) = if dz >= 0.0 {
        (
            Vector2::new(b, C64::new(-(dz + r), 0.0)),
            Vector2::new(C64::new(r + dz, 0.0), b.conj()),
        )
    } else {
        (
            Vector2::new(C64::new(r - dz, 0.0), -b.conj()),
            Vector2::new(b, C64::new(r - dz, 0.0)),
        )
    };

    Ok(Eigen2 {
        values: [mean - r, mean + r],
        vectors: [gauge_fixed2(lower), gauge_fixed2(upper)],
    })
}

/// Dense eigen-decomposition of an N×N Hermitian matrix.
///
/// Backed by Householder tridiagonalization followed by implicit shifted QR.
/// The result is checked against [`RESIDUAL_TOL`] before it is returned.
pub fn eig_hermitian(h: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = h.dim();
    if n > 4096 {
        return Err(Error::validation(format!(
            "dense eigensolver supports N <= 4096, got {n}"
        )));
    }
    let m = h.as_matrix();
    let norm = h.max_abs();

    let eig = nalgebra::SymmetricEigen::try_new(m.clone(), f64::EPSILON, MAX_SWEEPS).ok_or(
        Error::NoConvergence {
            sweeps: MAX_SWEEPS,
            residual: f64::NAN,
        },
    )?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::<C64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eig.eigenvectors.column(src);
        let phase = fix_gauge(col.iter()).unwrap_or(C64::new(1.0, 0.0));
        vectors.set_column(dst, &(col * phase));
    }

    let out = EigenDecomposition { values, vectors };
    let residual = out.residual(m);
    if residual > RESIDUAL_TOL * norm.max(f64::MIN_POSITIVE) && residual > 0.0 {
        return Err(Error::NoConvergence {
            sweeps: MAX_SWEEPS,
            residual,
        });
    }
    Ok(out)
}

/// Whether two eigenvalues of a matrix with entry scale `norm` are degenerate.
pub fn is_degenerate(a: f64, b: f64, norm: f64) -> bool {
    (a - b).abs() <= DEGENERACY_TOL * norm.max(1.0)
}

/// Fermi-Dirac occupation `1 / (exp(β(ε−μ)) + 1)`.
///
/// Saturates to exactly 0 or 1 once `|β(ε−μ)| > 700`, and returns exactly 1/2
/// at `β = 0`.
pub fn fermi_weight(energy: f64, mu: f64, beta: f64) -> Result<f64> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::domain(format!(
            "inverse temperature must be finite and >= 0, got {beta}"
        )));
    }
    if beta == 0.0 {
        return Ok(0.5);
    }
    let x = beta * (energy - mu);
    if x.is_nan() {
        return Err(Error::domain(format!(
            "non-finite Fermi argument for energy {energy}, mu {mu}"
        )));
    }
    Ok(if x > 700.0 {
        0.0
    } else if x < -700.0 {
        1.0
    } else {
        1.0 / (x.exp() + 1.0)
    })
}

/// Map an angle into `(−π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Principal argument in `(−π, π]`; `-π` is folded onto `π`.
pub fn principal_arg(z: C64) -> f64 {
    let a = z.arg();
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// `|e^{ia} − e^{ib}|`, the chordal distance between two phases.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    (C64::from_polar(1.0, a) - C64::from_polar(1.0, b)).norm()
}

/// Sum a sequence of raw angle increments after wrapping each into `(−π, π]`.
///
/// Any wrapped increment with magnitude `>= π − 0.1` means consecutive samples
/// are too far apart to decide the branch, and is reported as a coarse mesh.
pub fn unwrap_phase_increments(raw: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for (i, &step) in raw.iter().enumerate() {
        if !step.is_finite() {
            return Err(Error::domain(format!("non-finite phase increment at {i}")));
        }
        let w = wrap_angle(step);
        if w.abs() >= MAX_UNWRAP_STEP {
            return Err(Error::mesh(format!(
                "phase increment {w:.4} at step {i} exceeds pi - 0.1"
            )));
        }
        total += w;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn pauli_z() {
        let h = Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0));
        let e = eig_hermitian_2x2(&h).unwrap();
        assert_eq!(e.values, [-1.0, 1.0]);
        assert_eq!(e.vectors[0], Vector2::new(c(0.0, 0.0), c(1.0, 0.0)));
        assert_eq!(e.vectors[1], Vector2::new(c(1.0, 0.0), c(0.0, 0.0)));
    }

    #[test]
    fn pauli_x() {
        let h = Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let e = eig_hermitian_2x2(&h).unwrap();
        assert_eq!(e.values, [-1.0, 1.0]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let lo = e.vectors[0];
        let hi = e.vectors[1];
        // equal moduli: first component wins the gauge
        assert!((lo[0] - c(s, 0.0)).norm() < 1e-15);
        assert!((lo[1] - c(-s, 0.0)).norm() < 1e-15);
        assert!((hi[0] - c(s, 0.0)).norm() < 1e-15);
        assert!((hi[1] - c(s, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn gauge_when_first_component_vanishes() {
        // d along -z: lower eigenvector is (1,0), upper is (0,1)
        let h = Matrix2::new(c(-2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0));
        let e = eig_hermitian_2x2(&h).unwrap();
        assert_eq!(e.vectors[0], Vector2::new(c(1.0, 0.0), c(0.0, 0.0)));
        assert_eq!(e.vectors[1], Vector2::new(c(0.0, 0.0), c(1.0, 0.0)));
    }

    #[test]
    fn degenerate_2x2_uses_canonical_basis() {
        let h = Matrix2::new(c(0.3, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.3, 0.0));
        let e = eig_hermitian_2x2(&h).unwrap();
        assert_eq!(e.values, [0.3, 0.3]);
        assert_eq!(e.vectors[0], Vector2::new(c(1.0, 0.0), c(0.0, 0.0)));
    }

    #[test]
    fn non_hermitian_2x2_rejected() {
        let h = Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.0));
        assert!(matches!(eig_hermitian_2x2(&h), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn non_hermitian_nxn_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn diagonal_sorted() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0, 2.0]));
        let h = HermitianMatrix::from_real(&m).unwrap();
        let e = eig_hermitian(&h).unwrap();
        assert_eq!(e.values.len(), 3);
        for (v, want) in e.values.iter().zip([1.0, 2.0, 3.0]) {
            assert!(close(*v, want, 1e-14));
        }
    }

    #[test]
    fn fermi_special_points() {
        assert_eq!(fermi_weight(3.7, -1.2, 0.0).unwrap(), 0.5);
        assert_eq!(fermi_weight(0.4, 0.4, 17.0).unwrap(), 0.5);
        let want = 1.0 / (2.0_f64.exp() + 1.0);
        assert!(close(fermi_weight(2.1, 0.1, 1.0).unwrap(), want, 1e-15));
        assert_eq!(fermi_weight(10.0, 0.0, 100.0).unwrap(), 0.0);
        assert_eq!(fermi_weight(-10.0, 0.0, 100.0).unwrap(), 1.0);
        assert!(matches!(fermi_weight(0.0, 0.0, -1.0), Err(Error::Domain(_))));
        assert!(fermi_weight(0.0, 0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn unwrap_basic() {
        assert_eq!(unwrap_phase_increments(&[0.0; 10]).unwrap(), 0.0);
        let n = 16;
        let steps = vec![2.0 * PI / n as f64; n];
        assert!(close(unwrap_phase_increments(&steps).unwrap(), 2.0 * PI, 1e-12));
        assert!(unwrap_phase_increments(&[]).unwrap() == 0.0);
    }

    #[test]
    fn unwrap_rejects_large_steps() {
        assert!(matches!(
            unwrap_phase_increments(&[0.1, PI - 0.05]),
            Err(Error::MeshTooCoarse { .. })
        ));
        // a raw jump of ~2π across the branch cut is fine once wrapped
        assert!(close(
            unwrap_phase_increments(&[-2.0 * PI + 0.2]).unwrap(),
            0.2,
            1e-12
        ));
    }

    #[test]
    fn principal_arg_folds_minus_pi() {
        assert_eq!(principal_arg(c(-1.0, -0.0)), PI);
        assert_eq!(principal_arg(c(-1.0, 0.0)), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert_eq!(wrap_angle(3.0 * PI), PI);
    }
}
