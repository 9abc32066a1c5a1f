//! Oracle suite behind `chiraltopo selftest`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::edgemetrics::{flat_band_oracle, merit_average};
use crate::mixedphase::{geometric_phase_closed_form, geometric_phase_discrete, mixed_path_from_bands};
use crate::models::{
    bloch_ring_spectrum, build_open_chain, cl_bloch, ring_spectrum_oracle, ssh_bloch, BlochModel,
};
use crate::numerics::{self, HermitianMatrix, C64};
use crate::topology::{self, BandIndex, BzGrid};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {} residual = {:e} tol = {:e}",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.tolerance
            )?;
        }
        writeln!(f, "overall = {}", if self.passed() { "pass" } else { "fail" })
    }
}

fn models() -> Result<Vec<BlochModel>> {
    Ok(vec![
        ssh_bloch(1.0, -0.5)?,
        ssh_bloch(1.0, 0.3)?,
        cl_bloch(1.0, FRAC_PI_2, 1.0)?,
        cl_bloch(1.0, FRAC_PI_2, 3.0)?,
    ])
}

fn ring_spectrum() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for m in models()? {
        let dense = ring_spectrum_oracle(&m, 24)?;
        let bloch = bloch_ring_spectrum(&m, 24)?;
        for (a, b) in dense.iter().zip(&bloch) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

fn flat_band() -> Result<f64> {
    let chain = build_open_chain(&ssh_bloch(1.0, -1.0)?, 100, None)?;
    let mut worst: f64 = 0.0;
    for beta in [0.5, 1.0, 2.0, 5.0] {
        let diff = merit_average(&chain, beta, 0.1)? - flat_band_oracle(-1.0, beta, 0.1)?;
        worst = worst.max(diff.abs());
    }
    Ok(worst)
}

fn closed_vs_discrete(grid: BzGrid) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for m in models()? {
        let bands = topology::sample_bands(&m, grid)?;
        let gm = topology::zak_phase(&bands, BandIndex::Lower)?;
        let gp = topology::zak_phase(&bands, BandIndex::Upper)?;
        for beta in [0.5, 1.0, 5.0] {
            let path = mixed_path_from_bands(bands.clone(), beta, 0.1)?;
            let d = geometric_phase_discrete(&path)?
                .value
                .expect("gapped path has a phase");
            let c = geometric_phase_closed_form(&path, gm, gp)?;
            worst = worst.max(numerics::phase_distance(d, c));
        }
    }
    Ok(worst)
}

fn gauge_twist(grid: BzGrid) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for m in models()? {
        let bands = topology::sample_bands(&m, grid)?;
        let path = mixed_path_from_bands(bands.clone(), 2.0, 0.1)?;
        let phase = geometric_phase_discrete(&path)?
            .value
            .expect("gapped path has a phase");
        let zak = topology::zak_phase(&bands, BandIndex::Lower)?;
        for _ in 0..10 {
            let mut twisted = path.clone();
            for b in BandIndex::BOTH {
                let phases: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(-PI..PI)).collect();
                twisted.regauge(b, &phases);
            }
            let p = geometric_phase_discrete(&twisted)?
                .value
                .expect("gapped path has a phase");
            let z = topology::zak_phase(&twisted.bands, BandIndex::Lower)?;
            worst = worst
                .max(numerics::phase_distance(p, phase))
                .max(numerics::phase_distance(z, zak));
        }
    }
    Ok(worst)
}

fn berry_winding(grid: BzGrid) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for m in models()? {
        let r = topology::check_berry_winding_relation(&m, grid)?;
        worst = worst.max(r.deviation_minus).max(r.deviation_plus);
    }
    Ok(worst)
}

fn eigen_residual() -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for n in [2, 5, 16, 48] {
        let a = DMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let h = HermitianMatrix::new((&a + a.adjoint()).unscale(2.0))?;
        let e = numerics::eig_hermitian(&h)?;
        worst = worst.max(e.residual(h.as_matrix())).max(e.orthonormality_error());
    }
    Ok(worst)
}

/// Run all checks.
pub fn run() -> Result<Report> {
    let grid = BzGrid::new(topology::DEFAULT_NK)?;
    Ok(Report {
        checks: vec![
            Check {
                name: "ring-spectrum",
                residual: ring_spectrum()?,
                tolerance: 1e-10,
            },
            Check {
                name: "flat-band-merit",
                residual: flat_band()?,
                tolerance: 1e-10,
            },
            Check {
                name: "closed-form-vs-discrete",
                residual: closed_vs_discrete(grid)?,
                tolerance: 1e-6,
            },
            Check {
                name: "gauge-twist",
                residual: gauge_twist(grid)?,
                tolerance: 1e-9,
            },
            Check {
                name: "berry-winding",
                residual: berry_winding(grid)?,
                tolerance: 1e-6,
            },
            Check {
                name: "eigen-residual",
                residual: eigen_residual()?,
                tolerance: 1e-10,
            },
        ],
    })
}
