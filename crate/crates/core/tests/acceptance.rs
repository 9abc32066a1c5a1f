//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use chiraltopo::cli::config::{Metric, ScanConfig};
use chiraltopo::cli::scan::{run_scan, ScanOutcome};
use chiraltopo::edgemetrics::{disorder_robustness, merit_average, ChainSpectrum};
use chiraltopo::mixedphase::{
    geometric_phase_closed_form, geometric_phase_discrete, mixed_path_from_bands, topological_measure, Branch,
};
use chiraltopo::models::{build_open_chain, BlochModel, ModelName};
use chiraltopo::numerics::{eig_hermitian, phase_distance};
use chiraltopo::topology::{self, BandIndex, BzGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NEGATIVE: [f64; 3] = [-0.9, -0.5, -0.1];
const POSITIVE: [f64; 3] = [0.1, 0.5, 0.9];
const MODELS: [ModelName; 2] = [ModelName::Ssh, ModelName::Cl];
const THRESHOLD: f64 = 1e-2;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn grid() -> BzGrid {
    BzGrid::new(512).unwrap()
}

fn model(name: ModelName, alpha: f64) -> BlochModel {
    BlochModel::from_alpha(name, alpha).unwrap()
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed <= limit
}

fn winding_numbers() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for name in MODELS {
        for (alphas, want) in [(NEGATIVE, 1), (POSITIVE, 0)] {
            for a in alphas {
                match topology::winding_number(&model(name, a), grid()) {
                    Ok(nu) if nu == want => {}
                    other => bad.push(format!("{name} α={a}: {other:?}")),
                }
            }
        }
    }
    let t = start.elapsed();
    Outcome {
        pass: bad.is_empty() && within(t, Duration::from_secs(1)),
        detail: format!(
            "12 points, mismatches {bad:?}, {:.3} s (limit 1 s)",
            t.as_secs_f64()
        ),
    }
}

fn berry_winding() -> Outcome {
    let mut worst: f64 = 0.0;
    for name in MODELS {
        for a in NEGATIVE.into_iter().chain(POSITIVE) {
            let r = topology::check_berry_winding_relation(&model(name, a), grid()).unwrap();
            worst = worst.max(r.deviation_minus);
        }
    }
    Outcome {
        pass: worst <= 1e-6,
        detail: format!("max |e^(iγ-) - e^(iπν)| = {worst:e} (tol 1e-6)"),
    }
}

fn topological_measure_values() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for name in MODELS {
        for (alphas, want) in [(NEGATIVE, PI), (POSITIVE, 0.0)] {
            for a in alphas {
                let m = model(name, a);
                for beta in [0.5, 1.0, 5.0, 50.0] {
                    match topological_measure(&m, grid(), beta, 0.1).unwrap().value {
                        Some(v) => worst = worst.max((v - want).abs()),
                        None => bad.push(format!("{name} α={a} β={beta} undefined")),
                    }
                }
                let hot = topological_measure(&m, grid(), 0.0, 0.1).unwrap();
                if hot.value != Some(0.0) || hot.branch != Branch::InfiniteT {
                    bad.push(format!("{name} α={a} β=0 gave {:?}", hot.value));
                }
            }
        }
        let critical = topological_measure(&model(name, 0.0), grid(), 1.0, 0.1).unwrap();
        if critical.value.is_some() || critical.branch != Branch::GaplessIllDefined {
            bad.push(format!("{name} α=0 β=1 gave {:?}", critical.value));
        }
    }
    Outcome {
        pass: worst <= 1e-6 && bad.is_empty(),
        detail: format!("max |γ - expected| = {worst:e} (tol 1e-6), failures {bad:?}"),
    }
}

fn linspace(min: f64, max: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| min + (max - min) * i as f64 / (count - 1) as f64)
        .collect()
}

fn discrete_vs_closed() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for name in MODELS {
        for a in linspace(-1.0, 1.0, 21) {
            if a.abs() < 0.05 {
                continue;
            }
            let bands = topology::sample_bands(&model(name, a), grid()).unwrap();
            let gm = topology::zak_phase(&bands, BandIndex::Lower).unwrap();
            let gp = topology::zak_phase(&bands, BandIndex::Upper).unwrap();
            for beta in linspace(0.0, 10.0, 11) {
                if beta == 0.0 {
                    continue;
                }
                let path = mixed_path_from_bands(bands.clone(), beta, 0.1).unwrap();
                let d = geometric_phase_discrete(&path).unwrap().value.unwrap();
                let c = geometric_phase_closed_form(&path, gm, gp).unwrap();
                worst = worst.max(phase_distance(d, c));
                points += 1;
            }
        }
    }
    let t = start.elapsed();
    Outcome {
        pass: worst <= 1e-6 && within(t, Duration::from_secs(30)),
        detail: format!(
            "{points} points, max |e^(iγ_d) - e^(iγ_c)| = {worst:e} (tol 1e-6), {:.2} s (limit 30 s)",
            t.as_secs_f64()
        ),
    }
}

/// Oracle: `f(0) − [f(2) + f(−2)]/2` with the Fermi function written out here.
fn flat_band_closed_form(beta: f64, mu: f64) -> f64 {
    let f = |e: f64| 1.0 / ((beta * (e - mu)).exp() + 1.0);
    f(0.0) - 0.5 * (f(2.0) + f(-2.0))
}

/// Golden value at β = 1, μ = 0.1, reproduced by [`flat_band_closed_form`].
const FLAT_BAND_GOLDEN_BETA_1: f64 = 0.014473360895247533;

fn flat_band() -> Outcome {
    let topo = build_open_chain(&model(ModelName::Ssh, -1.0), 100, None).unwrap();
    let triv = build_open_chain(&model(ModelName::Ssh, 1.0), 100, None).unwrap();
    let golden_err = (flat_band_closed_form(1.0, 0.1) - FLAT_BAND_GOLDEN_BETA_1).abs();
    let mut worst: f64 = 0.0;
    let mut trivial: f64 = 0.0;
    for beta in [0.5, 1.0, 2.0, 5.0] {
        worst =
            worst.max((merit_average(&topo, beta, 0.1).unwrap() - flat_band_closed_form(beta, 0.1)).abs());
        trivial = trivial.max(merit_average(&triv, beta, 0.1).unwrap());
    }
    Outcome {
        pass: golden_err <= 1e-15 && worst <= 1e-10 && trivial <= 1e-12,
        detail: format!(
            "golden Λ(-1, β=1) = {FLAT_BAND_GOLDEN_BETA_1} (oracle diff {golden_err:e}), \
             max |Λ - oracle| = {worst:e} (tol 1e-10), max Λ(+1) = {trivial:e} (tol 1e-12)"
        ),
    }
}

fn load(name: &str) -> ScanConfig {
    let path = format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"));
    ScanConfig::from_toml(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

/// Points with `β ≥ 1`, `|α| ≥ 0.05` where `Λ ≥ threshold` disagrees with `γ = π`.
fn classifier_mismatches(scan: &ScanOutcome, metric: Metric) -> (usize, usize, Vec<String>) {
    let mut checked = 0;
    let mut mismatched = Vec::new();
    for r in &scan.rows {
        if r.beta < 1.0 || r.alpha.abs() < 0.05 {
            continue;
        }
        checked += 1;
        let large = r.lambda(metric) >= THRESHOLD;
        let topological = r.gamma == Some(PI);
        if large != topological {
            mismatched.push(format!(
                "(α={:.3}, β={}, Λ={:.3e})",
                r.alpha,
                r.beta,
                r.lambda(metric)
            ));
        }
    }
    (checked, mismatched.len(), mismatched)
}

fn phase_diagram_classifier() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for (avg_cfg, min_cfg) in [
        ("fig1_ssh.toml", "fig3_ssh_min.toml"),
        ("fig2_cl.toml", "fig4_cl_min.toml"),
    ] {
        let cfg = load(avg_cfg);
        let scan = run_scan(&cfg).unwrap();
        for (file, metric) in [(avg_cfg, Metric::Avg), (min_cfg, Metric::Min)] {
            let other = load(file);
            assert_eq!(
                (other.alpha_grid(), other.beta_grid()),
                (cfg.alpha_grid(), cfg.beta_grid())
            );
            let (checked, bad, examples) = classifier_mismatches(&scan, metric);
            pass &= bad == 0;
            parts.push(format!(
                "{file}: {bad}/{checked} mismatches{}",
                examples.first().map(|e| format!(" e.g. {e}")).unwrap_or_default()
            ));
        }
    }
    let t = start.elapsed();
    Outcome {
        pass: pass && within(t, Duration::from_secs(300)),
        detail: format!("{}; {:.1} s (limit 300 s)", parts.join("; "), t.as_secs_f64()),
    }
}

fn gauge_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let name = MODELS[trial % 2];
        let alpha = if trial % 4 < 2 {
            rng.random_range(-0.95..-0.05)
        } else {
            rng.random_range(0.05..0.95)
        };
        let beta = rng.random_range(0.1..20.0);
        let bands = topology::sample_bands(&model(name, alpha), grid()).unwrap();
        let path = mixed_path_from_bands(bands, beta, 0.1).unwrap();
        let phase = geometric_phase_discrete(&path).unwrap().value.unwrap();
        let zak = [
            topology::zak_phase(&path.bands, BandIndex::Lower).unwrap(),
            topology::zak_phase(&path.bands, BandIndex::Upper).unwrap(),
        ];
        let mut twisted = path.clone();
        for b in BandIndex::BOTH {
            let theta: Vec<f64> = (0..512).map(|_| rng.random_range(-PI..PI)).collect();
            twisted.regauge(b, &theta);
        }
        let after = geometric_phase_discrete(&twisted).unwrap().value.unwrap();
        worst = worst.max(phase_distance(phase, after));
        for b in BandIndex::BOTH {
            let z = topology::zak_phase(&twisted.bands, b).unwrap();
            worst = worst.max(phase_distance(zak[b.idx()], z));
        }
    }
    Outcome {
        pass: worst <= 1e-9,
        detail: format!("100 twists, max phase change {worst:e} (tol 1e-9)"),
    }
}

fn zero_modes() -> Outcome {
    let count = |alpha: f64| {
        let chain = build_open_chain(&model(ModelName::Ssh, alpha), 100, None).unwrap();
        eig_hermitian(&chain.hamiltonian).unwrap().count_near_zero(1e-8)
    };
    let (topo, triv) = (count(-0.5), count(0.5));
    Outcome {
        pass: topo == 2 && triv == 0,
        detail: format!("|ε| ≤ 1e-8 count: α=-0.5 → {topo} (want 2), α=+0.5 → {triv} (want 0)"),
    }
}

fn disorder() -> Outcome {
    let m = model(ModelName::Ssh, -0.5);
    let s = disorder_robustness(&m, 100, 5.0, 0.1, 0.1, 50, 2024).unwrap();
    let clean = ChainSpectrum::new(build_open_chain(&m, 100, None).unwrap())
        .unwrap()
        .merit(5.0, 0.1)
        .unwrap()
        .lambda_avg;
    let rel = (s.lambda_avg.mean - clean).abs() / clean;
    Outcome {
        pass: rel <= 0.2 && s.lambda_avg.min > THRESHOLD,
        detail: format!(
            "clean Λ = {clean:.6}, mean Λ = {:.6} (rel dev {rel:.4}, tol 0.2), min Λ = {:.6} (> {THRESHOLD})",
            s.lambda_avg.mean, s.lambda_avg.min
        ),
    }
}

fn measure_conditions() -> Outcome {
    let mut bad = Vec::new();
    let betas = [50.0, 10.0, 5.0, 1.0, 0.5, 0.1, 0.0];
    for name in MODELS {
        for a in NEGATIVE.into_iter().chain(POSITIVE) {
            let m = model(name, a);
            // (i) zero-temperature reduction to the lower-band Zak phase factor
            let bands = topology::sample_bands(&m, grid()).unwrap();
            let gm = topology::zak_phase(&bands, BandIndex::Lower).unwrap();
            let cold = topological_measure(&m, grid(), 50.0, 0.1).unwrap().value.unwrap();
            if phase_distance(cold, gm) > 1e-6 {
                bad.push(format!("(i) {name} α={a}"));
            }
            // (ii) constant then a single drop to 0 at β = 0, never an increase as β decreases
            let values: Vec<f64> = betas
                .iter()
                .map(|&b| {
                    topological_measure(&m, grid(), b, 0.1)
                        .unwrap()
                        .value
                        .unwrap()
                        .abs()
                })
                .collect();
            let plateau = if a < 0.0 { PI } else { 0.0 };
            let step = values[..values.len() - 1].iter().all(|&v| v == plateau);
            if !step || values.windows(2).any(|w| w[1] > w[0]) {
                bad.push(format!("(ii) {name} α={a}: {values:?}"));
            }
            // (iii) vanishing at infinite temperature
            if *values.last().unwrap() != 0.0 {
                bad.push(format!("(iii) {name} α={a}"));
            }
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!("12 parameter points, failures {bad:?}"),
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("winding numbers", winding_numbers),
        ("Berry-winding relation", berry_winding),
        ("topological measure", topological_measure_values),
        ("discrete vs closed-form phase", discrete_vs_closed),
        ("flat-band figure of merit", flat_band),
        ("phase-diagram classifier", phase_diagram_classifier),
        ("gauge invariance", gauge_invariance),
        ("zero modes", zero_modes),
        ("disorder robustness", disorder),
        ("measure conditions", measure_conditions),
    ];
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {title}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
