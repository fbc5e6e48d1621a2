//! Named reproduction runs. Each scenario renders a set of CSV files
//! from a resolved configuration; [`run_scenario`] writes them together with
//! a `manifest.toml` carrying the configuration snapshot and SHA-256 digests.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ResolvedConfig;
use crate::device::{build_level_structure, DeviceParameters, Leg, LevelStructure, Spin, Trion};
use crate::engine::{
    build_model_with, g2, g2_leg, steady_state, EmissionAnalysis, LindbladModel, SidebandWeights,
};
use crate::error::{Error, Result};
use crate::instrument::{convolve_g2, fit_g2_rise, fit_lorentzian, fp_scan, FabryPerotFilter, FitResult};
use crate::oracle::{oracle_scan, weak_coupling_profile, OracleReport, OracleScan};
use crate::raman::{
    cavity_asymmetry, excitation_spectrum, pinned_laser_energy, selectivity,
    sideband_grid, sideband_lineshape, CavityPin,
};
use crate::spectrum::{csv_string, format_value, uniform_grid, write_text, Spectrum};
use crate::spin::{
    pump_spin_with, randomized_spin_raman, spin_resolved_raman, PumpProtocol, PumpTier,
    SpinResolvedSpectra,
};

/// Measured AS/S = 7 at 4 T, as a selectivity.
pub const MEASURED_SELECTIVITY_4T: f64 = 0.75;
pub const MEASURED_ASYMMETRY: f64 = 20.0;
pub const MEASURED_RISE_TIME_PS: f64 = 1100.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scenario {
    SidebandsFig2d,
    ExcitationFig3c,
    AsymmetryFig4a,
    RatioFig4b,
    G2Fig4c,
    SelectivityFig5b,
    SpinResolvedFig5de,
    OracleCheck,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::SidebandsFig2d,
        Scenario::ExcitationFig3c,
        Scenario::AsymmetryFig4a,
        Scenario::RatioFig4b,
        Scenario::G2Fig4c,
        Scenario::SelectivityFig5b,
        Scenario::SpinResolvedFig5de,
        Scenario::OracleCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::SidebandsFig2d => "sidebands_fig2d",
            Scenario::ExcitationFig3c => "excitation_fig3c",
            Scenario::AsymmetryFig4a => "asymmetry_fig4a",
            Scenario::RatioFig4b => "ratio_fig4b",
            Scenario::G2Fig4c => "g2_fig4c",
            Scenario::SelectivityFig5b => "selectivity_fig5b",
            Scenario::SpinResolvedFig5de => "spin_resolved_fig5de",
            Scenario::OracleCheck => "oracle_check",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::UnknownScenario(s.to_string()))
    }
}

/// A scalar result of a run, with the measured value where one exists.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
}

/// Rendered files and metrics of one scenario, before anything is written.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioOutput {
    pub files: Vec<(String, String)>,
    pub metrics: Vec<Metric>,
    /// Set by `oracle_check`.
    pub oracle: Option<OracleReport>,
}

impl ScenarioOutput {
    fn new() -> Self {
        Self {
            files: Vec::new(),
            metrics: Vec::new(),
            oracle: None,
        }
    }

    fn file(&mut self, name: &str, text: String) {
        self.files.push((name.to_string(), text));
    }

    fn metric(&mut self, name: &str, value: f64, reference: Option<f64>) {
        self.metrics.push(Metric {
            name: name.to_string(),
            value,
            reference,
        });
    }

    pub fn metric_value(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|m| m.name == name).map(|m| m.value)
    }

    pub fn file_text(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, t)| t.as_str())
    }

    fn check_finite(&self) -> Result<()> {
        for (name, text) in &self.files {
            if text.contains("NaN") || text.contains("inf") {
                return Err(Error::InvariantViolation(format!("non-finite value in {name}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FileDigest {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub scenario: String,
    pub version: String,
    pub files: Vec<FileDigest>,
    pub metrics: Vec<Metric>,
    pub warnings: Vec<String>,
    pub config: crate::config::Config,
}

impl RunManifest {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn stage<T>(stage: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Stage {
        stage,
        source: Box::new(e),
    })
}

/// CSV whose first column is text.
fn labeled_csv(header: &[&str], rows: &[(String, Vec<f64>)]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for (label, values) in rows {
        s.push_str(label);
        for v in values {
            s.push(',');
            s.push_str(&format_value(*v));
        }
        s.push('\n');
    }
    s
}

fn fits_csv(fits: &[(&str, &FitResult<f64>)]) -> String {
    let mut rows = Vec::new();
    for (label, f) in fits {
        for p in &f.parameters {
            rows.push((format!("{label},{},{}", f.model, p.name), vec![p.value, p.sigma]));
        }
    }
    labeled_csv(&["target", "model", "param", "value", "sigma"], &rows)
}

fn peak_position(s: &Spectrum<f64>, lo: f64, hi: f64) -> Result<f64> {
    let w = s.window(lo, hi)?;
    Ok(w.grid()[w.peak().0])
}

struct Context<'a> {
    resolved: &'a ResolvedConfig,
}

impl Context<'_> {
    fn params(&self) -> &DeviceParameters<f64> {
        &self.resolved.params
    }

    fn engine_model(
        &self,
        params: &DeviceParameters<f64>,
        levels: &LevelStructure<f64>,
        laser: f64,
    ) -> Result<LindbladModel<f64>> {
        stage(
            "lindblad_engine",
            build_model_with(params, levels, laser, &self.resolved.config.model_options()),
        )
    }

    fn levels(&self, params: &DeviceParameters<f64>) -> Result<LevelStructure<f64>> {
        stage("physical_units_and_device", build_level_structure(params))
    }
}

fn sidebands(ctx: &Context) -> Result<ScenarioOutput> {
    let mut out = ScenarioOutput::new();
    let p = ctx.params();
    let levels = ctx.levels(p)?;
    let ez = levels.electron_zeeman;
    let laser = pinned_laser_energy(p.cavity_energy, ez, CavityPin::AntiStokes);

    let grid = sideband_grid(laser, p, &levels);
    let pert = stage("perturbative_raman", sideband_lineshape(laser, p, &levels, &grid))?;
    out.file("sidebands_perturbative.csv", pert.to_csv());

    let model = ctx.engine_model(p, &levels, laser)?;
    let analysis = stage("lindblad_engine", EmissionAnalysis::new(&model))?;
    let half = 15.0f64.min(ez / 2.0).max(2.0);
    let step = 0.05f64.min(analysis.sideband_hwhm() / 2.0);
    let s_win = stage(
        "lindblad_engine",
        analysis.spectrum(&uniform_grid(laser - ez - half, laser - ez + half, step)?),
    )?;
    let as_win = stage(
        "lindblad_engine",
        analysis.spectrum(&uniform_grid(laser + ez - half, laser + ez + half, step)?),
    )?;
    let eng = if ez > half {
        let mut g = s_win.grid().to_vec();
        let mut v = s_win.values().to_vec();
        g.extend_from_slice(as_win.grid());
        v.extend_from_slice(as_win.values());
        Spectrum::new(g, v)?
    } else {
        s_win
    };
    out.file("sidebands_engine.csv", eng.to_csv());

    let filter = FabryPerotFilter {
        single_order: true,
        ..ctx.resolved.config.filter()
    };
    let centers: Vec<f64> = grid.iter().step_by(2).copied().collect();
    let scan = stage("instrument_chain", fp_scan(&pert, &filter, &centers))?;
    out.file("sidebands_fp_scan.csv", scan.to_csv());

    let ps = peak_position(&pert, laser - ez - half, laser - ez + half)? - laser;
    let pa = peak_position(&pert, laser + ez - half, laser + ez + half)? - laser;
    let es = peak_position(&eng, laser - ez - half, laser - ez + half)? - laser;
    let ea = peak_position(&eng, laser + ez - half, laser + ez + half)? - laser;
    let as_fit = stage(
        "instrument_chain",
        fit_lorentzian(&eng.window(laser + ez - half, laser + ez + half)?),
    )?;
    out.file(
        "sideband_peaks.csv",
        labeled_csv(
            &["tier", "stokes_offset_ueV", "antistokes_offset_ueV"],
            &[("perturbative".into(), vec![ps, pa]), ("engine".into(), vec![es, ea])],
        ),
    );
    out.file("sideband_fit.csv", fits_csv(&[("engine_anti_stokes", &as_fit)]));
    out.metric("laser_ueV", laser, None);
    out.metric("stokes_offset_perturbative", ps, Some(-ez));
    out.metric("antistokes_offset_perturbative", pa, Some(ez));
    out.metric("stokes_offset_engine", es, Some(-ez));
    out.metric("antistokes_offset_engine", ea, Some(ez));
    out.metric("engine_sideband_fwhm", as_fit.value("fwhm"), Some(3.0));
    Ok(out)
}

fn excitation(ctx: &Context) -> Result<ScenarioOutput> {
    let mut out = ScenarioOutput::new();
    let p = ctx.params();
    let levels = ctx.levels(p)?;
    let as_pump = levels.leg_energy(Leg::new(Trion::T2, Spin::Down));
    let s_pump = levels.leg_energy(Leg::new(Trion::T1, Spin::Up));
    let lo = as_pump.min(s_pump) - 60.0;
    let hi = as_pump.max(s_pump) + 60.0;
    let grid = uniform_grid(lo, hi, ctx.resolved.config.scenario.excitation_step_ueV)?;
    let scan = stage("perturbative_raman", excitation_spectrum(&grid, p, &levels))?;
    out.file("excitation.csv", scan.to_csv());

    let window = 4.0 * p.qd_hwhm;
    let fa = stage(
        "instrument_chain",
        fit_lorentzian(&scan.anti_stokes.window(as_pump - window, as_pump + window)?),
    )?;
    let fs = stage(
        "instrument_chain",
        fit_lorentzian(&scan.stokes.window(s_pump - window, s_pump + window)?),
    )?;
    out.file("excitation_fits.csv", fits_csv(&[("anti_stokes", &fa), ("stokes", &fs)]));
    let measured = Some(18.0);
    out.metric("anti_stokes_fwhm", fa.value("fwhm"), measured);
    out.metric("stokes_fwhm", fs.value("fwhm"), measured);
    out.metric("anti_stokes_center_offset", fa.value("center") - as_pump, Some(0.0));
    out.metric("stokes_center_offset", fs.value("center") - s_pump, Some(0.0));
    Ok(out)
}

fn asymmetry(ctx: &Context) -> Result<ScenarioOutput> {
    let mut out = ScenarioOutput::new();
    let p = ctx.params();
    let levels = ctx.levels(p)?;
    let sc = &ctx.resolved.config.scenario;
    let grid = uniform_grid(
        p.qd_center_energy - sc.asymmetry_span_ueV,
        p.qd_center_energy + sc.asymmetry_span_ueV,
        sc.asymmetry_step_ueV,
    )?;
    let scan = stage("perturbative_raman", excitation_spectrum(&grid, p, &levels))?;
    out.file("asymmetry_scan.csv", scan.to_csv());
    out.metric("scan_points", grid.len() as f64, None);
    Ok(out)
}

fn engine_weights(ctx: &Context, p: &DeviceParameters<f64>, levels: &LevelStructure<f64>, laser: f64) -> Result<SidebandWeights<f64>> {
    let model = ctx.engine_model(p, levels, laser)?;
    let rho = stage("lindblad_engine", steady_state(&model))?;
    Ok(stage("lindblad_engine", EmissionAnalysis::from_states(&model, &rho, &rho))?.sideband_weights())
}

fn ratio(ctx: &Context) -> Result<ScenarioOutput> {
    let mut out = ScenarioOutput::new();
    let p = ctx.params();
    let levels = ctx.levels(p)?;
    let d = ctx.resolved.config.scenario.asymmetry_detuning_ueV;
    let a = stage("perturbative_raman", cavity_asymmetry(d, p, &levels))?;
    let red = engine_weights(ctx, p, &levels, p.qd_center_energy - d)?;
    let blue = engine_weights(ctx, p, &levels, p.qd_center_energy + d)?;
    let engine_ratio = (red.stokes + red.anti_stokes) / (blue.stokes + blue.anti_stokes);
    out.file(
        "asymmetry_ratio.csv",
        labeled_csv(
            &["tier", "detuning_ueV", "total_ratio", "stokes_ratio", "anti_stokes_ratio"],
            &[
                ("perturbative".into(), vec![d, a.total_ratio, a.stokes_ratio, a.anti_stokes_ratio]),
                (
                    "engine".into(),
                    vec![
                        d,
                        engine_ratio,
                        red.stokes / blue.stokes,
                        red.anti_stokes / blue.anti_stokes,
                    ],
                ),
            ],
        ),
    );
    let grid_red = sideband_grid(p.qd_center_energy - d, p, &levels);
    let grid_blue = sideband_grid(p.qd_center_energy + d, p, &levels);
    let sr = stage("perturbative_raman", sideband_lineshape(p.qd_center_energy - d, p, &levels, &grid_red))?;
    let sb = stage("perturbative_raman", sideband_lineshape(p.qd_center_energy + d, p, &levels, &grid_blue))?;
    out.file("spectrum_red.csv", sr.to_csv());
    out.file("spectrum_blue.csv", sb.to_csv());
    out.metric("asymmetry_ratio", a.total_ratio, Some(MEASURED_ASYMMETRY));
    out.metric("asymmetry_ratio_stokes", a.stokes_ratio, None);
    out.metric("asymmetry_ratio_anti_stokes", a.anti_stokes_ratio, None);
    out.metric("asymmetry_ratio_engine", engine_ratio, Some(MEASURED_ASYMMETRY));
    Ok(out)
}

/// Device parameters of the correlation measurement.
pub fn g2_operating_point(ctx_params: &DeviceParameters<f64>, config: &crate::config::Config) -> DeviceParameters<f64> {
    let sc = &config.scenario;
    DeviceParameters {
        magnetic_field: sc.g2_field_T,
        cavity_energy: ctx_params.qd_center_energy - sc.g2_cavity_detuning_ueV,
        drive_rabi: sc.g2_rabi_ueV,
        ..ctx_params.clone()
    }
}

fn correlation(ctx: &Context) -> Result<ScenarioOutput> {
    let mut out = ScenarioOutput::new();
    let config = &ctx.resolved.config;
    let sc = &config.scenario;
    let p = g2_operating_point(ctx.params(), config);
    let levels = ctx.levels(&p)?;
    let laser = levels.transition_energy(levels.numbering.number(Leg::new(Trion::T1, Spin::Up)));
    let model = ctx.engine_model(&p, &levels, laser)?;
    let tau = uniform_grid(0.0, sc.g2_max_tau_ps, sc.g2_step_ps)?;
    let raw = stage("lindblad_engine", g2_leg(&model, Leg::new(Trion::T1, Spin::Down), &tau))?;
    let det = config.detector();
    let conv = stage("instrument_chain", convolve_g2(&raw, &det))?;
    let fit = stage("instrument_chain", fit_g2_rise(&conv, Some(&det)))?;
    out.file("g2_raw.csv", raw.to_csv());
    out.file("g2_convolved.csv", conv.to_csv());
    out.file("g2_fit.csv", fits_csv(&[("stokes_filtered", &fit)]));

    // unfiltered cavity field at weak drive
    let weak = DeviceParameters {
        drive_rabi: ctx.params().drive_rabi,
        ..p.clone()
    };
    let weak_model = ctx.engine_model(&weak, &levels, laser)?;
    let full = stage("lindblad_engine", g2(&weak_model, &[0.0, sc.g2_max_tau_ps * 10.0]))?;
    out.metric("t_rise_ps", fit.value("t_rise_ps"), Some(MEASURED_RISE_TIME_PS));
    out.metric("g2_raw_0", raw.values()[0], None);
    out.metric("g2_convolved_0", conv.values()[0], None);
    out.metric("g2_cavity_weak_drive_0", full.values()[0], None);
    out.metric("g2_cavity_weak_drive_long", full.values()[1], Some(1.0));
    Ok(out)
}

fn field_grid(ctx: &Context) -> Result<Vec<f64>> {
    let sc = &ctx.resolved.config.scenario;
    uniform_grid(sc.field_min_T, sc.field_max_T, sc.field_step_T)
}

fn selectivity_sweep(ctx: &Context) -> Result<ScenarioOutput> {
    let mut out = ScenarioOutput::new();
    let p = ctx.params();
    let fields = field_grid(ctx)?;
    let rows = fields
        .par_iter()
        .map(|&b| -> Result<Vec<f64>> {
            let pb = p.with_field(b);
            let ez = pb.electron_zeeman()?;
            Ok(vec![b, ez, selectivity(b, p)?])
        })
        .collect::<Result<Vec<_>>>();
    let rows = stage("perturbative_raman", rows)?;
    out.file("selectivity.csv", csv_string(None, &["B_T", "E_z_ueV", "selectivity"], rows.clone()));

    let model_fields = uniform_grid(0.0, ctx.resolved.config.scenario.field_max_T, 0.05)?;
    let model = stage(
        "perturbative_raman",
        model_fields
            .iter()
            .map(|&b| Ok(vec![b, selectivity(b, p)?]))
            .collect::<Result<Vec<_>>>(),
    )?;
    out.file("selectivity_model.csv", csv_string(None, &["B_T", "selectivity"], model));

    let engine = fields
        .par_iter()
        .map(|&b| -> Result<Vec<f64>> {
            let pb = p.with_field(b);
            let levels = ctx.levels(&pb)?;
            let laser = pinned_laser_energy(pb.cavity_energy, levels.electron_zeeman, CavityPin::AntiStokes);
            let w = engine_weights(ctx, &pb, &levels, laser)?;
            Ok(vec![b, (w.anti_stokes - w.stokes) / (w.anti_stokes + w.stokes)])
        })
        .collect::<Result<Vec<_>>>()?;
    out.file("selectivity_engine.csv", csv_string(None, &["B_T", "selectivity_engine"], engine));

    let s4 = stage("perturbative_raman", selectivity(4.0, p))?;
    out.metric("selectivity_4T", s4, Some(MEASURED_SELECTIVITY_4T));
    Ok(out)
}

fn spin_csv(tag: &str, s: &SpinResolvedSpectra<f64>) -> String {
    let rows = s
        .stokes
        .grid()
        .iter()
        .zip(s.stokes.values())
        .chain(s.anti_stokes.grid().iter().zip(s.anti_stokes.values()))
        .map(|(x, y)| vec![*x, *y]);
    csv_string(Some(&format!("spin={tag}")), &["energy_ueV", "intensity"], rows)
}

fn spin_resolved(ctx: &Context) -> Result<ScenarioOutput> {
    let mut out = ScenarioOutput::new();
    let config = &ctx.resolved.config;
    let p = DeviceParameters {
        spin_flip_rate: config.relaxation().flip_rate(config.spin.pump_regime),
        ..ctx.params().clone()
    };
    let levels = ctx.levels(&p)?;
    let laser = pinned_laser_energy(p.cavity_energy, levels.electron_zeeman, CavityPin::AntiStokes);
    // pump the anti-Stokes pump leg to prepare ↑, the Stokes pump leg for ↓
    let cases = [
        ("up", levels.numbering.number(Leg::new(Trion::T2, Spin::Down))),
        ("down", levels.numbering.number(Leg::new(Trion::T1, Spin::Up))),
    ];
    let runs = cases
        .par_iter()
        .map(|&(tag, transition)| -> Result<_> {
            let pumped = stage(
                "spin_dynamics",
                pump_spin_with(
                    &p,
                    &levels,
                    &PumpProtocol {
                        transition,
                        duration_ps: config.spin.pump_duration_ps,
                        rabi: config.spin.pump_rabi_ueV,
                        tier: PumpTier::Engine,
                    },
                ),
            )?;
            let spectra = stage("spin_dynamics", spin_resolved_raman(&p, &levels, &pumped.state, laser))?;
            Ok((tag, pumped, spectra))
        })
        .collect::<Result<Vec<_>>>()?;
    let mixed = stage("spin_dynamics", randomized_spin_raman(&p, &levels, laser))?;

    let mut rows = Vec::new();
    for (tag, pumped, spectra) in &runs {
        out.file(&format!("spin_{tag}.csv"), spin_csv(tag, spectra));
        rows.push((
            tag.to_string(),
            vec![pumped.fidelity(), spectra.weights.stokes, spectra.weights.anti_stokes],
        ));
        if let Some(w) = &pumped.warning {
            log::warn!("{w}");
        }
        out.metric(&format!("fidelity_{tag}"), pumped.fidelity(), None);
        out.metric(&format!("anti_stokes_{tag}"), spectra.weights.anti_stokes, None);
    }
    out.file("spin_mixed.csv", spin_csv("mixed", &mixed));
    rows.push(("mixed".into(), vec![0.5, mixed.weights.stokes, mixed.weights.anti_stokes]));
    out.file(
        "spin_resolved_summary.csv",
        labeled_csv(&["spin", "target_fidelity", "stokes_weight", "anti_stokes_weight"], &rows),
    );
    let up = &runs[0].2.weights;
    let down = &runs[1].2.weights;
    out.metric("anti_stokes_contrast", up.anti_stokes / down.anti_stokes, Some(0.05));
    Ok(out)
}

fn oracle(ctx: &Context) -> Result<ScenarioOutput> {
    let mut out = ScenarioOutput::new();
    let config = &ctx.resolved.config;
    let sc = &config.scenario;
    let scan = OracleScan {
        span: sc.oracle_span_ueV,
        step: sc.oracle_step_ueV,
        exclusion: sc.oracle_exclusion_ueV,
        tolerance: sc.oracle_tolerance,
    };
    let options = config.model_options();
    let weak = stage("lindblad_engine", weak_coupling_profile(ctx.params()))?;
    let report = stage("lindblad_engine", oracle_scan(&weak, &scan, &options))?;
    let default = stage("lindblad_engine", oracle_scan(ctx.params(), &scan, &options))?;
    out.file("oracle_weak_profile.csv", report.to_csv());
    out.file("oracle_default_profile.csv", default.to_csv());
    out.metric("oracle_rms", report.rms, Some(report.tolerance));
    out.metric("oracle_rms_default_profile", default.rms, None);
    out.oracle = Some(report);
    Ok(out)
}

/// Renders a scenario without touching the filesystem.
pub fn execute(scenario: Scenario, resolved: &ResolvedConfig) -> Result<ScenarioOutput> {
    let ctx = Context { resolved };
    let out = match scenario {
        Scenario::SidebandsFig2d => sidebands(&ctx),
        Scenario::ExcitationFig3c => excitation(&ctx),
        Scenario::AsymmetryFig4a => asymmetry(&ctx),
        Scenario::RatioFig4b => ratio(&ctx),
        Scenario::G2Fig4c => correlation(&ctx),
        Scenario::SelectivityFig5b => selectivity_sweep(&ctx),
        Scenario::SpinResolvedFig5de => spin_resolved(&ctx),
        Scenario::OracleCheck => oracle(&ctx),
    }?;
    out.check_finite()?;
    Ok(out)
}

/// Runs `scenario`, writes its files and `manifest.toml` into `out_dir`.
/// An oracle run above tolerance still writes its outputs, then fails with
/// [`Error::OracleMismatch`].
pub fn run_scenario(scenario: Scenario, resolved: &ResolvedConfig, out_dir: &Path) -> Result<RunManifest> {
    let out = execute(scenario, resolved)?;
    std::fs::create_dir_all(out_dir)?;
    let mut files = Vec::new();
    for (name, text) in &out.files {
        write_text(&out_dir.join(name), text)?;
        files.push(FileDigest {
            name: name.clone(),
            sha256: sha256_hex(text),
            bytes: text.len(),
        });
    }
    let manifest = RunManifest {
        scenario: scenario.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        files,
        metrics: out.metrics.clone(),
        warnings: resolved.warnings.clone(),
        config: resolved.config.clone(),
    };
    write_text(&out_dir.join("manifest.toml"), &manifest.to_toml())?;
    if let Some(report) = out.oracle {
        report.into_result()?;
    }
    Ok(manifest)
}
