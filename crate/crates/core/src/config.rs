//! TOML run configuration: `[device]`, `[engine]`, `[spin]`, `[instrument]`
//! and `[scenario]` tables. Every key is optional; missing keys take the
//! default device profile.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::device::{DeviceParameters, DipoleMoments, TransitionNumbering};
use crate::engine::{calibrate_coupling, ModelOptions, Propagator, DEFAULT_FOCK_CUTOFF};
use crate::error::{Error, Result};
use crate::instrument::{DetectorResponse, FabryPerotFilter};
use crate::spin::{
    CotunnelingRegime, RelaxationModel, DEFAULT_PUMP_DURATION_PS, DEFAULT_PUMP_RABI_UEV,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeviceSection {
    #[serde(rename = "qd_center_energy_ueV")]
    pub qd_center_energy: f64,
    #[serde(rename = "cavity_energy_ueV")]
    pub cavity_energy: f64,
    #[serde(rename = "cavity_hwhm_ueV")]
    pub cavity_hwhm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cavity_q: Option<f64>,
    pub electron_g: f64,
    pub trion_g: f64,
    #[serde(rename = "qd_hwhm_ueV")]
    pub qd_hwhm: f64,
    #[serde(rename = "spin_dephasing_rate_ueV")]
    pub spin_dephasing_rate: f64,
    /// Overrides the co-tunneling regime of `[spin]` when set.
    #[serde(rename = "spin_flip_rate_ueV", skip_serializing_if = "Option::is_none")]
    pub spin_flip_rate: Option<f64>,
    #[serde(rename = "radiative_rate_ueV")]
    pub radiative_rate: f64,
    #[serde(rename = "trion_dephasing_rate_ueV")]
    pub trion_dephasing_rate: f64,
    #[serde(rename = "qd_cavity_coupling_ueV")]
    pub qd_cavity_coupling: f64,
    #[serde(rename = "drive_rabi_ueV")]
    pub drive_rabi: f64,
    #[serde(rename = "polarization_mixing_angle_rad")]
    pub polarization_mixing_angle: f64,
    #[serde(rename = "magnetic_field_T")]
    pub magnetic_field: f64,
    pub dipole_t1_up: f64,
    pub dipole_t1_down: f64,
    pub dipole_t2_up: f64,
    pub dipole_t2_down: f64,
    pub numbering: TransitionNumbering,
}

impl Default for DeviceSection {
    fn default() -> Self {
        let p = DeviceParameters::<f64>::default();
        Self {
            qd_center_energy: p.qd_center_energy,
            cavity_energy: p.cavity_energy,
            cavity_hwhm: p.cavity_hwhm,
            cavity_q: p.cavity_q,
            electron_g: p.electron_g,
            trion_g: p.trion_g,
            qd_hwhm: p.qd_hwhm,
            spin_dephasing_rate: p.spin_dephasing_rate,
            spin_flip_rate: None,
            radiative_rate: p.radiative_rate,
            trion_dephasing_rate: p.trion_dephasing_rate,
            qd_cavity_coupling: p.qd_cavity_coupling,
            drive_rabi: p.drive_rabi,
            polarization_mixing_angle: p.polarization_mixing_angle,
            magnetic_field: p.magnetic_field,
            dipole_t1_up: p.dipoles.t1_up,
            dipole_t1_down: p.dipoles.t1_down,
            dipole_t2_up: p.dipoles.t2_up,
            dipole_t2_down: p.dipoles.t2_down,
            numbering: p.numbering,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropagatorChoice {
    #[default]
    Exponential,
    Adaptive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EngineSection {
    pub fock_cutoff: usize,
    pub lamb_shift_compensation: bool,
    pub propagator: PropagatorChoice,
    /// Recompute g_c so the weak-probe linewidth equals 2γ.
    pub calibrate_coupling: bool,
}

impl Default for EngineSection {
    fn default() -> Self {
        Self {
            fock_cutoff: DEFAULT_FOCK_CUTOFF,
            lamb_shift_compensation: true,
            propagator: PropagatorChoice::Exponential,
            calibrate_coupling: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
#[serde(deny_unknown_fields, default)]
pub struct SpinSection {
    pub regime: CotunnelingRegime,
    pub plateau_center_t1_ps: f64,
    pub edge_speedup: f64,
    /// Co-tunneling regime used while pumping and reading out the spin.
    pub pump_regime: CotunnelingRegime,
    pub pump_rabi_ueV: f64,
    pub pump_duration_ps: f64,
}

impl Default for SpinSection {
    fn default() -> Self {
        let r = RelaxationModel::<f64>::default();
        Self {
            regime: r.regime,
            plateau_center_t1_ps: r.plateau_center_t1,
            edge_speedup: r.edge_speedup,
            pump_regime: CotunnelingRegime::PlateauCenter,
            pump_rabi_ueV: DEFAULT_PUMP_RABI_UEV,
            pump_duration_ps: DEFAULT_PUMP_DURATION_PS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
#[serde(deny_unknown_fields, default)]
pub struct InstrumentSection {
    pub fp_fwhm_ueV: f64,
    pub fp_fsr_ueV: f64,
    pub detector_dt_ps: f64,
}

impl Default for InstrumentSection {
    fn default() -> Self {
        let f = FabryPerotFilter::<f64>::default();
        Self {
            fp_fwhm_ueV: f.fwhm,
            fp_fsr_ueV: f.fsr,
            detector_dt_ps: DetectorResponse::<f64>::default().dt,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSection {
    pub field_min_T: f64,
    pub field_max_T: f64,
    pub field_step_T: f64,
    pub excitation_step_ueV: f64,
    pub asymmetry_step_ueV: f64,
    pub asymmetry_span_ueV: f64,
    pub asymmetry_detuning_ueV: f64,
    pub g2_field_T: f64,
    pub g2_cavity_detuning_ueV: f64,
    pub g2_rabi_ueV: f64,
    pub g2_max_tau_ps: f64,
    pub g2_step_ps: f64,
    pub oracle_tolerance: f64,
    pub oracle_span_ueV: f64,
    pub oracle_step_ueV: f64,
    pub oracle_exclusion_ueV: f64,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self {
            field_min_T: 1.0,
            field_max_T: 7.0,
            field_step_T: 0.25,
            excitation_step_ueV: 0.5,
            asymmetry_step_ueV: 2.0,
            asymmetry_span_ueV: 800.0,
            asymmetry_detuning_ueV: 440.0,
            g2_field_T: 6.75,
            g2_cavity_detuning_ueV: 150.0,
            g2_rabi_ueV: 7.5,
            g2_max_tau_ps: 20_000.0,
            g2_step_ps: 50.0,
            oracle_tolerance: 0.05,
            oracle_span_ueV: 600.0,
            oracle_step_ueV: 50.0,
            oracle_exclusion_ueV: 150.0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub device: DeviceSection,
    pub engine: EngineSection,
    pub spin: SpinSection,
    pub instrument: InstrumentSection,
    pub scenario: ScenarioSection,
}

/// A checked configuration with the device parameters it resolves to.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedConfig {
    pub config: Config,
    pub params: DeviceParameters<f64>,
    pub warnings: Vec<String>,
}

impl Config {
    pub fn relaxation(&self) -> RelaxationModel<f64> {
        RelaxationModel {
            regime: self.spin.regime,
            plateau_center_t1: self.spin.plateau_center_t1_ps,
            edge_speedup: self.spin.edge_speedup,
            ..Default::default()
        }
    }

    pub fn model_options(&self) -> ModelOptions {
        ModelOptions {
            fock_cutoff: self.engine.fock_cutoff,
            lamb_shift_compensation: self.engine.lamb_shift_compensation,
        }
    }

    pub fn propagator(&self) -> Propagator {
        match self.engine.propagator {
            PropagatorChoice::Exponential => Propagator::Exponential,
            PropagatorChoice::Adaptive => Propagator::Adaptive,
        }
    }

    pub fn filter(&self) -> FabryPerotFilter<f64> {
        FabryPerotFilter {
            fwhm: self.instrument.fp_fwhm_ueV,
            fsr: self.instrument.fp_fsr_ueV,
            ..Default::default()
        }
    }

    pub fn detector(&self) -> DetectorResponse<f64> {
        DetectorResponse {
            dt: self.instrument.detector_dt_ps,
        }
    }

    /// Device parameters before validation and calibration.
    pub fn device_parameters(&self) -> DeviceParameters<f64> {
        let d = &self.device;
        let flip = d
            .spin_flip_rate
            .unwrap_or_else(|| self.relaxation().flip_rate(self.spin.regime));
        DeviceParameters {
            qd_center_energy: d.qd_center_energy,
            cavity_energy: d.cavity_energy,
            cavity_hwhm: d.cavity_hwhm,
            cavity_q: d.cavity_q,
            electron_g: d.electron_g,
            trion_g: d.trion_g,
            qd_hwhm: d.qd_hwhm,
            spin_dephasing_rate: d.spin_dephasing_rate,
            spin_flip_rate: flip,
            radiative_rate: d.radiative_rate,
            trion_dephasing_rate: d.trion_dephasing_rate,
            qd_cavity_coupling: d.qd_cavity_coupling,
            drive_rabi: d.drive_rabi,
            polarization_mixing_angle: d.polarization_mixing_angle,
            magnetic_field: d.magnetic_field,
            dipoles: DipoleMoments {
                t1_up: d.dipole_t1_up,
                t1_down: d.dipole_t1_down,
                t2_up: d.dipole_t2_up,
                t2_down: d.dipole_t2_down,
            },
            numbering: d.numbering,
        }
    }

    /// Section and key holding a validation key.
    fn locate(key: &str) -> (&'static str, String) {
        const ENGINE: [&str; 1] = ["fock_cutoff"];
        const SPIN: [&str; 4] = ["plateau_center_t1_ps", "pump_rabi_ueV", "pump_duration_ps", "edge_speedup"];
        const INSTRUMENT: [&str; 3] = ["fp_fwhm_ueV", "fp_fsr_ueV", "detector_dt_ps"];
        let section = if ENGINE.contains(&key) {
            "engine"
        } else if SPIN.contains(&key) {
            "spin"
        } else if INSTRUMENT.contains(&key) {
            "instrument"
        } else if key.starts_with("field_") || key.starts_with("g2_") || key.starts_with("oracle_") {
            "scenario"
        } else {
            "device"
        };
        (section, key.to_string())
    }

    fn check_sections(&self) -> Result<()> {
        if self.engine.fock_cutoff == 0 {
            return Err(Error::param("fock_cutoff", "must be >= 1"));
        }
        let s = &self.spin;
        for (key, v) in [
            ("plateau_center_t1_ps", s.plateau_center_t1_ps),
            ("edge_speedup", s.edge_speedup),
            ("pump_rabi_ueV", s.pump_rabi_ueV),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(key, "must be finite and > 0"));
            }
        }
        if !(s.pump_duration_ps > 0.0) {
            return Err(Error::param("pump_duration_ps", "must be > 0"));
        }
        self.filter().validate().map_err(|_| Error::param("fp_fwhm_ueV", "must satisfy 0 < fp_fwhm_ueV < fp_fsr_ueV"))?;
        DetectorResponse::new(self.instrument.detector_dt_ps)?;
        let sc = &self.scenario;
        if !(sc.field_min_T >= 0.0 && sc.field_max_T > sc.field_min_T && sc.field_step_T > 0.0) {
            return Err(Error::param("field_step_T", "need 0 <= field_min_T < field_max_T and step > 0"));
        }
        for (key, v) in [
            ("g2_step_ps", sc.g2_step_ps),
            ("g2_max_tau_ps", sc.g2_max_tau_ps),
            ("g2_rabi_ueV", sc.g2_rabi_ueV),
            ("oracle_tolerance", sc.oracle_tolerance),
            ("oracle_step_ueV", sc.oracle_step_ueV),
            ("oracle_span_ueV", sc.oracle_span_ueV),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(key, "must be finite and > 0"));
            }
        }
        Ok(())
    }

    /// Validates every section and resolves the device parameters,
    /// calibrating g_c if requested.
    pub fn resolve(&self) -> Result<ResolvedConfig> {
        self.check_sections()?;
        let mut params = self.device_parameters();
        let warnings = params.validate()?;
        if self.engine.calibrate_coupling {
            params.qd_cavity_coupling = calibrate_coupling(&params, 2.0 * params.qd_hwhm)?;
        }
        Ok(ResolvedConfig {
            config: self.clone(),
            params,
            warnings,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Line (1-based) of `key` inside `[section]`, if present.
fn key_line(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            continue;
        }
        let Some((k, _)) = line.split_once('=') else { continue };
        let k = k.trim().trim_matches('"');
        let matches_key = k == key || k == format!("{section}.{key}");
        if matches_key && (current == section || k.contains('.')) {
            return Some(i + 1);
        }
    }
    None
}

fn parse_error(path: &str, text: &str, err: toml::de::Error) -> Error {
    let (line, key) = match err.span() {
        Some(span) => {
            let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
            let src = text.lines().nth(line - 1).unwrap_or("");
            let key = src.split_once('=').map(|(k, _)| k.trim().to_string()).unwrap_or_default();
            (line, key)
        }
        None => (0, String::new()),
    };
    Error::Config {
        path: path.to_string(),
        line,
        key,
        message: err.message().to_string(),
    }
}

/// Parses TOML text. `path` only labels errors.
pub fn parse_config(text: &str, path: &str) -> Result<Config> {
    toml::from_str(text).map_err(|e| parse_error(path, text, e))
}

/// Applies `section.key=value` overrides; values use TOML syntax, with
/// bare words taken as strings.
pub fn apply_overrides(config: &Config, overrides: &[String]) -> Result<Config> {
    if overrides.is_empty() {
        return Ok(config.clone());
    }
    let mut table: toml::Table = toml::from_str(&config.to_toml()).expect("round trip");
    for item in overrides {
        let bad = |message: &str| Error::Config {
            path: "--set".into(),
            line: 0,
            key: item.clone(),
            message: message.to_string(),
        };
        let (key, value) = item.split_once('=').ok_or_else(|| bad("expected section.key=value"))?;
        let (section, name) = key.trim().split_once('.').ok_or_else(|| bad("key must be section.key"))?;
        let value = value.trim();
        let parsed: toml::Value = match toml::from_str::<toml::Table>(&format!("v = {value}")) {
            Ok(mut t) => t.remove("v").expect("parsed key"),
            Err(_) => toml::Value::String(value.to_string()),
        };
        let entry = table
            .entry(section.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        let toml::Value::Table(t) = entry else {
            return Err(bad("unknown section"));
        };
        t.insert(name.to_string(), parsed);
    }
    let text = toml::to_string(&table).expect("table serializes");
    toml::from_str(&text).map_err(|e| Error::Config {
        path: "--set".into(),
        line: 0,
        key: overrides.join(" "),
        message: e.message().to_string(),
    })
}

/// Attaches the file location of an invalid key.
fn locate_error(path: &str, text: &str, err: Error) -> Error {
    match err {
        Error::InvalidParameter { key, reason } => {
            let (section, name) = Config::locate(&key);
            Error::Config {
                path: path.to_string(),
                line: key_line(text, section, &name).unwrap_or(0),
                key: format!("{section}.{name}"),
                message: reason,
            }
        }
        other => other,
    }
}

/// Reads, checks and resolves a configuration file. An empty file yields
/// the default profile.
pub fn validate_config(path: &Path) -> Result<ResolvedConfig> {
    validate_config_with(path, &[])
}

pub fn validate_config_with(path: &Path, overrides: &[String]) -> Result<ResolvedConfig> {
    let text = std::fs::read_to_string(path)?;
    let label = path.display().to_string();
    let config = parse_config(&text, &label)?;
    let config = apply_overrides(&config, overrides)?;
    config.resolve().map_err(|e| locate_error(&label, &text, e))
}
