//! One PASS/FAIL line per acceptance criterion. Run with
//! `cargo test --test acceptance -- --nocapture` to see the report.

mod common;

use std::time::{Duration, Instant};

use cavity_raman::config::{Config, ResolvedConfig};
use cavity_raman::device::{build_level_structure, DeviceParameters, Spin};
use cavity_raman::engine::{
    build_model, evolve, g2, steady_state, steady_state_residual, CMatrix, DensityMatrix, EmissionAnalysis, QdLevel,
};
use cavity_raman::instrument::{convolve_g2, fit_g2_rise, rise_model, DetectorResponse};
use cavity_raman::oracle::{oracle_scan, weak_coupling_profile, OracleScan};
use cavity_raman::raman::{raman_intensities, selectivity, sideband_grid, sideband_lineshape};
use cavity_raman::scenario::{execute, sha256_hex, Scenario, ScenarioOutput, MEASURED_SELECTIVITY_4T};
use cavity_raman::spectrum::{centered_grid, uniform_grid, Spectrum};
use cavity_raman::engine::CorrelationTrace;
use common::*;
use num_complex::Complex64;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn resolved() -> ResolvedConfig {
    Config::default().resolve().unwrap()
}

fn run(sc: Scenario) -> ScenarioOutput {
    execute(sc, &resolved()).unwrap()
}

fn metric(out: &ScenarioOutput, name: &str) -> f64 {
    out.metric_value(name).unwrap_or_else(|| panic!("metric {name}"))
}

fn peak_in(s: &Spectrum<f64>, lo: f64, hi: f64) -> f64 {
    let w = s.window(lo, hi).unwrap();
    w.grid()[w.peak().0]
}

fn sideband_positions() -> Outcome {
    let p = DeviceParameters::<f64>::default();
    let l = build_level_structure(&p).unwrap();
    let expected = G_E * MU_B * 4.0;
    let laser = OMEGA_C;

    let t0 = Instant::now();
    let pert = sideband_lineshape(laser, &p, &l, &sideband_grid(laser, &p, &l)).unwrap();
    let ps = peak_in(&pert, laser - expected - 20.0, laser - expected + 20.0) - laser;
    let pa = peak_in(&pert, laser + expected - 20.0, laser + expected + 20.0) - laser;
    let t_pert = t0.elapsed();

    let t0 = Instant::now();
    let m = build_model(&p, &l, laser, 2).unwrap();
    let a = EmissionAnalysis::new(&m).unwrap();
    let s_grid = centered_grid(laser - expected, 20.0, 0.1).unwrap();
    let a_grid = centered_grid(laser + expected, 20.0, 0.1).unwrap();
    let es = peak_in(&a.spectrum(&s_grid).unwrap(), laser - expected - 20.0, laser - expected + 20.0) - laser;
    let ea = peak_in(&a.spectrum(&a_grid).unwrap(), laser + expected - 20.0, laser + expected + 20.0) - laser;
    let t_eng = t0.elapsed();

    let within = |x: f64, target: f64| (x - target).abs() <= 1.0;
    let passed = within(ps, -99.6)
        && within(pa, 99.6)
        && within(es, -99.6)
        && within(ea, 99.6)
        && t_pert < Duration::from_secs(1)
        && t_eng < Duration::from_secs(30);
    outcome(
        passed,
        format!(
            "perturbative {ps:+.2}/{pa:+.2} ueV in {:.3} s, engine {es:+.2}/{ea:+.2} ueV in {:.2} s (target +-99.6 +- 1)",
            t_pert.as_secs_f64(),
            t_eng.as_secs_f64()
        ),
    )
}

fn excitation_linewidth() -> Outcome {
    let t0 = Instant::now();
    let out = run(Scenario::ExcitationFig3c);
    let t = t0.elapsed();
    let fa = metric(&out, "anti_stokes_fwhm");
    let fs = metric(&out, "stokes_fwhm");
    let passed = (fa - 18.0).abs() <= 1.0 && (fs - 18.0).abs() <= 1.0 && t < Duration::from_secs(5);
    outcome(
        passed,
        format!("fitted FWHM AS {fa:.3}, S {fs:.3} ueV (18 +- 1) in {:.2} s", t.as_secs_f64()),
    )
}

fn cavity_asymmetry() -> Outcome {
    let t0 = Instant::now();
    let p = DeviceParameters::<f64>::default();
    let l = build_level_structure(&p).unwrap();
    let red = raman_intensities(E_X - 440.0, &p, &l).unwrap();
    let blue = raman_intensities(E_X + 440.0, &p, &l).unwrap();
    let ratio = red.total() / blue.total();
    let t = t0.elapsed();
    let (rs, ra) = brute_intensities(-440.0, 4.0, G_E, G_T, GAMMA, OMEGA_C, KAPPA_HALF);
    let (bs, ba) = brute_intensities(440.0, 4.0, G_E, G_T, GAMMA, OMEGA_C, KAPPA_HALF);
    let oracle = (rs + ra) / (bs + ba);
    let out = run(Scenario::RatioFig4b);
    let engine = metric(&out, "asymmetry_ratio_engine");
    let passed = (15.0..=30.0).contains(&ratio) && (ratio / oracle - 1.0).abs() < 1e-12 && t < Duration::from_secs(5);
    outcome(
        passed,
        format!(
            "red/blue ratio {ratio:.2} (window [15, 30]; independent evaluation {oracle:.2}; engine {engine:.2}; measured ~20) in {:.3} s",
            t.as_secs_f64()
        ),
    )
}

fn selectivity_curve() -> Outcome {
    let t0 = Instant::now();
    let p = DeviceParameters::<f64>::default();
    let fields: Vec<f64> = (0..=28).map(|k| 0.25 * k as f64).collect();
    let values: Vec<f64> = fields.iter().map(|&b| selectivity(b, &p).unwrap()).collect();
    let worst = fields
        .iter()
        .zip(&values)
        .map(|(&b, s)| (s - brute_selectivity(b)).abs())
        .fold(0.0, f64::max);
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let far = selectivity(500.0, &p).unwrap();

    // the scenario's CSV rows against the same oracle
    let out = run(Scenario::SelectivityFig5b);
    let csv = out.file_text("selectivity.csv").unwrap();
    let csv_worst = csv
        .lines()
        .skip(1)
        .map(|row| {
            let v: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
            (v[2] - brute_selectivity(v[0])).abs()
        })
        .fold(0.0, f64::max);
    let t = t0.elapsed();
    let s4 = selectivity(4.0, &p).unwrap();
    let passed = worst <= 1e-12
        && csv_worst <= 1e-12
        && values[0] == 0.0
        && increasing
        && far > 0.999
        && t < Duration::from_secs(5);
    outcome(
        passed,
        format!(
            "max |impl - oracle| {worst:.1e} (csv {csv_worst:.1e}), S(0) = {}, increasing {increasing}, S(500 T) = {far:.5}; S(4 T) = {s4:.4} vs measured {MEASURED_SELECTIVITY_4T} (informational) in {:.2} s",
            values[0],
            t.as_secs_f64()
        ),
    )
}

fn antibunching() -> Outcome {
    let t0 = Instant::now();
    let p = DeviceParameters {
        magnetic_field: 6.75,
        cavity_energy: E_X - 150.0,
        ..DeviceParameters::<f64>::default()
    };
    let l = build_level_structure(&p).unwrap();
    let m = build_model(&p, &l, l.transition_energy(4), 2).unwrap();
    let g = g2(&m, &[0.0, 2.0e5]).unwrap();
    let g0 = g.values()[0];

    let tau = uniform_grid(0.0, 20_000.0, 20.0).unwrap();
    let ideal: Vec<f64> = tau.iter().map(|&t| rise_model(t, 1100.0, 1.0, 1.0)).collect();
    let det = DetectorResponse::new(400.0).unwrap();
    let conv = convolve_g2(&CorrelationTrace::new(tau, ideal, 1.0).unwrap(), &det).unwrap();
    let c0 = conv.values()[0];
    let quad = convolved_rise_at_zero(400.0, 1100.0);
    let fit = fit_g2_rise(&conv, Some(&det)).unwrap().value("t_rise_ps");

    let scenario = run(Scenario::G2Fig4c);
    let golden = metric(&scenario, "t_rise_ps");
    let t = t0.elapsed();
    let passed = g0 < 0.05
        && (c0 - 0.18).abs() <= 0.02
        && (c0 - quad).abs() <= 1e-3
        && (fit - 1100.0).abs() <= 50.0
        && t < Duration::from_secs(60);
    outcome(
        passed,
        format!(
            "engine g2(0) {g0:.4} (< 0.05), g2(200 ns) {:.4}; convolved model g2(0) {c0:.4} (quadrature {quad:.4}, 0.18 +- 0.02); synthetic fit t_rise {:.1} ps (1100 +- 50); engine-trace fit {golden:.0} ps in {:.2} s",
            g.values()[1],
            fit,
            t.as_secs_f64()
        ),
    )
}

fn seeded_state(m: &cavity_raman::LindbladModelF64, seed: u64) -> DensityMatrix<f64> {
    // deterministic mixed state from a linear congruential sequence
    let d = m.space().total_dim();
    let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((x >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    let mut rho = CMatrix::<f64>::zeros(d, d);
    for _ in 0..3 {
        let v: Vec<Complex64> = (0..d).map(|_| Complex64::new(next(), next())).collect();
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        for i in 0..d {
            for j in 0..d {
                rho[(i, j)] += v[i] * v[j].conj() / (3.0 * norm);
            }
        }
    }
    DensityMatrix::from_matrix(m.space(), rho).unwrap()
}

fn lindblad_invariants() -> Outcome {
    let t0 = Instant::now();
    let p = DeviceParameters::<f64>::default();
    let l = build_level_structure(&p).unwrap();
    let lasers = [OMEGA_C, OMEGA_C - l.electron_zeeman, E_X - 440.0, l.transition_energy(4)];
    let (mut trace, mut herm, mut min_eig, mut resid, mut fock) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (k, &laser) in lasers.iter().enumerate() {
        let m = build_model(&p, &l, laser, 2).unwrap();
        let starts = [
            DensityMatrix::ground_state(m.space(), 0.5, Complex64::new(0.0, 0.0)),
            DensityMatrix::ground_state(m.space(), 1.0, Complex64::new(0.0, 0.0)),
            seeded_state(&m, k as u64),
        ];
        for rho0 in &starts {
            for rho in evolve(&m, rho0, &[0.0, 10.0, 100.0, 1000.0, 5000.0]).unwrap() {
                trace = trace.max((rho.trace() - Complex64::new(1.0, 0.0)).norm());
                herm = herm.max(rho.hermiticity_error());
                min_eig = min_eig.min(rho.min_eigenvalue());
            }
        }
        let ss = steady_state(&m).unwrap();
        resid = resid.max(steady_state_residual(&m, &ss) / m.liouvillian().norm());

        let obs = |n: usize| {
            let m = build_model(&p, &l, laser, n).unwrap();
            let rho = steady_state(&m).unwrap();
            let w = EmissionAnalysis::new(&m).unwrap().sideband_weights();
            vec![
                rho.photon_number(),
                rho.spin_population(Spin::Up),
                rho.level_population(QdLevel::T1) + rho.level_population(QdLevel::T2),
                w.stokes,
                w.anti_stokes,
            ]
        };
        for (a, b) in obs(2).iter().zip(obs(4)) {
            fock = fock.max((a - b).abs() / b.abs());
        }
    }
    let t = t0.elapsed();
    let passed = trace <= 1e-9
        && herm <= 1e-10
        && min_eig >= -1e-9
        && resid <= 1e-9
        && fock < 1e-3
        && t < Duration::from_secs(120);
    outcome(
        passed,
        format!(
            "trace err {trace:.1e}, hermiticity {herm:.1e}, min eigenvalue {min_eig:.1e}, relative residual {resid:.1e}, N_max 2->4 relative shift {fock:.1e} (< 1e-3) in {:.2} s",
            t.as_secs_f64()
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let t0 = Instant::now();
    let base = DeviceParameters::<f64>::default();
    let scan = OracleScan::default();
    let weak = weak_coupling_profile(&base).unwrap();
    let report = oracle_scan(&weak, &scan, &Default::default()).unwrap();
    let default = oracle_scan(&base, &scan, &Default::default()).unwrap();
    let t = t0.elapsed();
    let passed = report.rms <= 0.05 && t < Duration::from_secs(180);
    outcome(
        passed,
        format!(
            "weak-coupling profile RMS {:.4} over {} detunings (<= 0.05); calibrated-coupling profile RMS {:.4} (informational) in {:.2} s",
            report.rms,
            report.points.len(),
            default.rms,
            t.as_secs_f64()
        ),
    )
}

fn spin_contrast() -> Outcome {
    let t0 = Instant::now();
    let out = run(Scenario::SpinResolvedFig5de);
    let t = t0.elapsed();
    let fu = metric(&out, "fidelity_up");
    let fd = metric(&out, "fidelity_down");
    let c = metric(&out, "anti_stokes_contrast");
    let passed = fu > 0.99 && fd > 0.99 && c < 0.05 && t < Duration::from_secs(60);
    outcome(
        passed,
        format!(
            "pump fidelity up {fu:.4}, down {fd:.4} (> 0.99); AS(up)/AS(down) {c:.4} (< 0.05) in {:.2} s",
            t.as_secs_f64()
        ),
    )
}

fn determinism() -> Outcome {
    let t0 = Instant::now();
    let mut mismatched = Vec::new();
    let mut files = 0;
    for sc in Scenario::ALL {
        let a = run(sc);
        let b = run(sc);
        let da: Vec<String> = a.files.iter().map(|(_, t)| sha256_hex(t)).collect();
        let db: Vec<String> = b.files.iter().map(|(_, t)| sha256_hex(t)).collect();
        files += da.len();
        if da != db {
            mismatched.push(sc.name());
        }
    }
    let t = t0.elapsed();
    outcome(
        mismatched.is_empty(),
        format!(
            "{files} files over {} scenarios rerun, mismatches {:?} in {:.2} s",
            Scenario::ALL.len(),
            mismatched,
            t.as_secs_f64()
        ),
    )
}

#[test]
fn acceptance() {
    let start = Instant::now();
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check); 9] = [
        ("sideband positions", sideband_positions),
        ("excitation linewidth", excitation_linewidth),
        ("cavity asymmetry", cavity_asymmetry),
        ("selectivity curve", selectivity_curve),
        ("antibunching", antibunching),
        ("Lindblad invariants", lindblad_invariants),
        ("oracle equivalence", oracle_equivalence),
        ("spin-resolved contrast", spin_contrast),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {} {tag} {name}: {}", i + 1, o.detail);
        if !o.passed {
            failed.push(i + 1);
        }
    }
    println!("full suite {:.1} s (target < 480 s)", start.elapsed().as_secs_f64());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
