mod common;

use cavity_raman::device::{build_level_structure, DeviceParameters, DipoleMoments};
use cavity_raman::instrument::fit_lorentzian;
use cavity_raman::raman::{
    cavity_asymmetry, excitation_spectrum, raman_intensities, selectivity, sideband_grid, sideband_lineshape,
};
use cavity_raman::spectrum::{uniform_grid, Spectrum};
use cavity_raman::units::{cavity_fwhm_from_q, zeeman_splitting, UnitSystem, HBAR_UEV_PS};
use cavity_raman::Error;
use common::*;
use proptest::prelude::*;

#[test]
fn zeeman_examples() {
    assert!((zeeman_splitting(0.43f64, 4.0).unwrap() - 99.56).abs() < 0.005);
    assert!((zeeman_splitting(0.21f64, 4.0).unwrap() - 48.62).abs() < 0.005);
    assert_eq!(zeeman_splitting(1.7f64, 0.0).unwrap(), 0.0);
    assert!(zeeman_splitting(0.43f64, -1.0).is_err());
}

#[test]
fn cavity_width_from_q() {
    assert!((cavity_fwhm_from_q(1_290_700.0f64, 4000.0).unwrap() - 322.675).abs() < 1e-9);
    assert_eq!(cavity_fwhm_from_q(1_290_700.0f64, f64::INFINITY).unwrap(), 0.0);
    assert!(cavity_fwhm_from_q(1_290_700.0f64, 0.0).is_err());
    // the measured 2Γ wins when both are configured
    let p = DeviceParameters {
        cavity_q: Some(4000.0),
        ..DeviceParameters::<f64>::default()
    };
    let warnings = p.validate().unwrap();
    assert!(!warnings.is_empty());
    assert_eq!(p.cavity_hwhm, 175.0);
}

#[test]
fn four_tesla_level_scheme() {
    let l = build_level_structure(&DeviceParameters::<f64>::default()).unwrap();
    let mut offsets: Vec<f64> = l.transition_energies().iter().map(|w| w - E_X).collect();
    offsets.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let outer = (G_E + G_T) * MU_B * 4.0 / 2.0;
    let inner = (G_E - G_T) * MU_B * 4.0 / 2.0;
    let expect = [-outer, -inner, inner, outer];
    for (o, e) in offsets.iter().zip(expect) {
        assert!((o - e).abs() < 1e-9, "{o} vs {e}");
    }
    assert!((outer - 74.09).abs() < 0.01 && (inner - 25.47).abs() < 0.01);
}

#[test]
fn dephasing_time_of_sideband_width() {
    let t = 2.0 * HBAR_UEV_PS / 3.0;
    assert!((t - 438.8).abs() < 0.1);
    let u = UnitSystem::<f64>::default();
    assert!((u.internal_to_ps(1.0) - HBAR_UEV_PS).abs() < 1e-12);
}

#[test]
fn intensities_match_independent_evaluation() {
    let p = DeviceParameters::<f64>::default();
    let l = build_level_structure(&p).unwrap();
    for d in [-600.0, -440.0, -74.0, -10.0, 0.0, 25.0, 74.09, 300.0, 440.0] {
        let i = raman_intensities(E_X + d, &p, &l).unwrap();
        let (s, a) = brute_intensities(d, 4.0, G_E, G_T, GAMMA, OMEGA_C, KAPPA_HALF);
        assert!((i.stokes / s - 1.0).abs() < 1e-11, "S at {d}");
        assert!((i.anti_stokes / a - 1.0).abs() < 1e-11, "AS at {d}: {}", i.anti_stokes / a - 1.0);
    }
}

#[test]
fn dark_emitter_has_no_emission() {
    let p = DeviceParameters {
        dipoles: DipoleMoments {
            t1_up: 0.0,
            t1_down: 0.0,
            t2_up: 0.0,
            t2_down: 0.0,
        },
        ..DeviceParameters::<f64>::default()
    };
    let l = build_level_structure(&DeviceParameters::<f64>::default()).unwrap();
    let i = raman_intensities(E_X, &p, &l).unwrap();
    assert_eq!((i.stokes, i.anti_stokes), (0.0, 0.0));
    assert!(matches!(i.selectivity(), Err(Error::DarkEmitter)));
}

#[test]
fn asymmetry_at_440() {
    let p = DeviceParameters::<f64>::default();
    let l = build_level_structure(&p).unwrap();
    let a = cavity_asymmetry(440.0, &p, &l).unwrap();
    let (rs, ra) = brute_intensities(-440.0, 4.0, G_E, G_T, GAMMA, OMEGA_C, KAPPA_HALF);
    let (bs, ba) = brute_intensities(440.0, 4.0, G_E, G_T, GAMMA, OMEGA_C, KAPPA_HALF);
    let oracle = (rs + ra) / (bs + ba);
    assert!((a.total_ratio / oracle - 1.0).abs() < 1e-12);
    assert!((a.stokes_ratio / (rs / bs) - 1.0).abs() < 1e-12);
    assert!((15.0..=30.0).contains(&a.total_ratio), "{}", a.total_ratio);
}

#[test]
fn excitation_linewidths() {
    let p = DeviceParameters::<f64>::default();
    let l = build_level_structure(&p).unwrap();
    let outer = (G_E + G_T) * MU_B * 4.0 / 2.0;
    for center in [E_X - outer, E_X + outer] {
        let grid = uniform_grid(center - 40.0, center + 40.0, 0.5).unwrap();
        let scan = excitation_spectrum(&grid, &p, &l).unwrap();
        let curve = if center < E_X { &scan.anti_stokes } else { &scan.stokes };
        let fit = fit_lorentzian(curve).unwrap();
        assert!((fit.value("fwhm") - 18.0).abs() < 1.0, "{}", fit.value("fwhm"));
        assert!((fit.value("center") - center).abs() < 0.5);
    }
}

#[test]
fn wide_scan_is_larger_on_cavity_side() {
    let p = DeviceParameters::<f64>::default();
    let l = build_level_structure(&p).unwrap();
    let grid = uniform_grid(E_X - 800.0, E_X + 800.0, 2.0).unwrap();
    let scan = excitation_spectrum(&grid, &p, &l).unwrap();
    let total = |s: &Spectrum<f64>, lo: f64, hi: f64| s.integral_between(lo, hi);
    let red = total(&scan.stokes, E_X - 800.0, E_X - 200.0) + total(&scan.anti_stokes, E_X - 800.0, E_X - 200.0);
    let blue = total(&scan.stokes, E_X + 200.0, E_X + 800.0) + total(&scan.anti_stokes, E_X + 200.0, E_X + 800.0);
    assert!(red > 5.0 * blue);
}

#[test]
fn flat_cavity_reduces_to_qd_lorentzian() {
    let p = DeviceParameters {
        cavity_hwhm: 1e9,
        ..DeviceParameters::<f64>::default()
    };
    let l = build_level_structure(&p).unwrap();
    let center = l.transition_energies().iter().cloned().fold(f64::MIN, f64::max);
    let grid = uniform_grid(center - 60.0, center + 60.0, 0.25).unwrap();
    let scan = excitation_spectrum(&grid, &p, &l).unwrap();
    let fit = fit_lorentzian(&scan.stokes).unwrap();
    assert!((fit.value("fwhm") - 2.0 * GAMMA).abs() < 0.05);
}

#[test]
fn selectivity_sweep_against_brute_force() {
    let p = DeviceParameters::<f64>::default();
    let mut prev = -1.0;
    for k in 0..=28 {
        let b = 0.25 * k as f64;
        let s = selectivity(b, &p).unwrap();
        assert!((s - brute_selectivity(b)).abs() < 1e-12, "B = {b}");
        if k > 0 {
            assert!(s > prev, "not increasing at {b}");
        }
        prev = s;
    }
    assert_eq!(selectivity(0.0, &p).unwrap(), 0.0);
    assert!(selectivity(200.0, &p).unwrap() > 0.999);
}

#[test]
fn sideband_lineshape_width_and_tracking() {
    let p = DeviceParameters::<f64>::default();
    let l = build_level_structure(&p).unwrap();
    let laser = OMEGA_C;
    let spec = sideband_lineshape(laser, &p, &l, &sideband_grid(laser, &p, &l)).unwrap();
    let ez = l.electron_zeeman;
    let win = spec.window(laser + ez - 15.0, laser + ez + 15.0).unwrap();
    let fit = fit_lorentzian(&win).unwrap();
    assert!((fit.value("fwhm") - 3.0).abs() < 1e-3);
    assert!((fit.value("center") - (laser + ez)).abs() < 1e-3);
}

proptest! {
    #[test]
    fn centroid_and_shift_identities(b in 0.0f64..8.0, ge in 0.0f64..1.0, gt in 0.0f64..1.0) {
        let p = DeviceParameters { magnetic_field: b, electron_g: ge, trion_g: gt, ..DeviceParameters::<f64>::default() };
        let l = build_level_structure(&p).unwrap();
        let w = l.transition_energies();
        let mut sorted = w;
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        prop_assert!((sorted[0] + sorted[3] - 2.0 * E_X).abs() < 1e-9);
        prop_assert!((sorted[1] + sorted[2] - 2.0 * E_X).abs() < 1e-9);
        prop_assert!((sorted[3] - sorted[0] - (ge + gt) * MU_B * b).abs() < 1e-9);
        let laser = E_X - 300.0;
        let i = raman_intensities(laser, &p, &l).unwrap();
        prop_assert!((laser - i.stokes_energy - l.electron_zeeman).abs() < 1e-9);
        prop_assert!((i.antistokes_energy - laser - l.electron_zeeman).abs() < 1e-9);
        prop_assert!(i.stokes >= 0.0 && i.anti_stokes >= 0.0);
    }

    #[test]
    fn selectivity_bounded(b in 0.0f64..20.0) {
        let s = selectivity(b, &DeviceParameters::<f64>::default()).unwrap();
        prop_assert!((-1.0..=1.0).contains(&s));
        prop_assert!((s - brute_selectivity(b)).abs() < 1e-12);
    }
}
