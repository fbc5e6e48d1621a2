//! Spin initialization, co-tunneling relaxation and spin-resolved Raman
//! emission.

use serde::{Deserialize, Serialize};

use crate::device::{
    DeviceParameters, Leg, LevelStructure, Spin, Trion, PLATEAU_CENTER_T1_PS, PLATEAU_EDGE_SPEEDUP,
};
use crate::engine::{
    build_model, evolve_with, steady_state, DensityMatrix, EmissionAnalysis, EvolveOptions,
    LindbladModel, QdLevel, SidebandWeights, DEFAULT_FOCK_CUTOFF,
};
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Cplx, Real};
use crate::spectrum::{centered_grid, Spectrum, DEFAULT_SPACING_UEV};
use crate::units::HBAR_UEV_PS;

/// Default pump Rabi energy (μeV).
pub const DEFAULT_PUMP_RABI_UEV: f64 = 2.0;
/// Default pump duration (ps).
pub const DEFAULT_PUMP_DURATION_PS: f64 = 20_000.0;
/// Time (ps) allowed for the optical coherences and cavity field to build up
/// before a spin-resolved spectrum is read out: 1 ħ/μeV.
pub const SETTLE_TIME_PS: f64 = HBAR_UEV_PS;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinState<T> {
    pub p_up: T,
    pub p_down: T,
    /// ⟨↑|ρ|↓⟩
    pub coherence: Cplx<T>,
}

impl<T: Real> SpinState<T> {
    pub fn new(p_up: T, coherence: Cplx<T>) -> Result<Self> {
        if !(p_up >= T::zero() && p_up <= T::one()) {
            return Err(Error::param("p_up", format!("must lie in [0, 1], got {p_up}")));
        }
        let p_down = T::one() - p_up;
        let c2 = coherence.re * coherence.re + coherence.im * coherence.im;
        if c2 > p_up * p_down * (T::one() + lit(1e-12)) {
            return Err(Error::param("coherence", "|c|^2 must not exceed p_up * p_down"));
        }
        Ok(Self {
            p_up,
            p_down,
            coherence,
        })
    }

    pub fn pure(spin: Spin) -> Self {
        let p_up = match spin {
            Spin::Up => T::one(),
            Spin::Down => T::zero(),
        };
        Self {
            p_up,
            p_down: T::one() - p_up,
            coherence: Cplx::new(T::zero(), T::zero()),
        }
    }

    pub fn mixed() -> Self {
        Self {
            p_up: lit(0.5),
            p_down: lit(0.5),
            coherence: Cplx::new(T::zero(), T::zero()),
        }
    }

    pub fn population(&self, spin: Spin) -> T {
        match spin {
            Spin::Up => self.p_up,
            Spin::Down => self.p_down,
        }
    }

    /// ⟨σ_z⟩ = p_up − p_down
    pub fn polarization(&self) -> T {
        self.p_up - self.p_down
    }

    /// Ground-doublet state of a full density matrix, renormalized over the
    /// two ground levels.
    pub fn from_density(rho: &DensityMatrix<T>) -> Self {
        let space = rho.space();
        let up = rho.level_population(QdLevel::Up);
        let down = rho.level_population(QdLevel::Down);
        let total = up + down;
        let mut c = Cplx::new(T::zero(), T::zero());
        for n in 0..space.fock_dim() {
            c += rho.matrix()[(space.index(QdLevel::Up, n), space.index(QdLevel::Down, n))];
        }
        let p_up = up / total;
        let p_down = T::one() - p_up;
        let c = c / Cplx::new(total, T::zero());
        // guard against rounding past the Cauchy–Schwarz bound
        let bound = (p_up * p_down).sqrt();
        let modulus = (c.re * c.re + c.im * c.im).sqrt();
        let coherence = if modulus > bound && modulus > T::zero() {
            c * Cplx::new(bound / modulus, T::zero())
        } else {
            c
        };
        Self {
            p_up,
            p_down,
            coherence,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CotunnelingRegime {
    /// Fast spin randomization near the edge of the charge plateau.
    #[default]
    PlateauEdge,
    /// Slow co-tunneling at the plateau centre.
    PlateauCenter,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelaxationModel<T> {
    /// (temperature K, T1 ps), sorted by temperature.
    pub t1_points: Vec<(T, T)>,
    pub regime: CotunnelingRegime,
    /// Plateau-centre T1 (ps) that fixes the co-tunneling rates.
    pub plateau_center_t1: T,
    pub edge_speedup: T,
}

impl<T: Real> Default for RelaxationModel<T> {
    fn default() -> Self {
        Self {
            t1_points: vec![(lit(5.2), lit(2.0e7)), (lit(16.0), lit(7.0e4))],
            regime: CotunnelingRegime::PlateauEdge,
            plateau_center_t1: lit(PLATEAU_CENTER_T1_PS),
            edge_speedup: lit(PLATEAU_EDGE_SPEEDUP),
        }
    }
}

impl<T: Real> RelaxationModel<T> {
    pub fn validate(&self) -> Result<()> {
        if self.t1_points.is_empty() {
            return Err(Error::param("t1_points", "at least one point required"));
        }
        for (i, &(temp, t1)) in self.t1_points.iter().enumerate() {
            if !(t1 > T::zero()) || !(temp > T::zero()) {
                return Err(Error::param("t1_points", format!("point {i} must have T > 0 and T1 > 0")));
            }
        }
        if self.t1_points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::param("t1_points", "temperatures must be strictly increasing"));
        }
        if !(self.plateau_center_t1 > T::zero()) || !(self.edge_speedup > T::zero()) {
            return Err(Error::param("plateau_center_t1_ps", "must be > 0"));
        }
        Ok(())
    }

    /// Co-tunneling flip rate Γ_ct (μeV, per direction) in a regime.
    pub fn flip_rate(&self, regime: CotunnelingRegime) -> T {
        let center = lit::<T>(HBAR_UEV_PS) / (lit::<T>(2.0) * self.plateau_center_t1);
        match regime {
            CotunnelingRegime::PlateauCenter => center,
            CotunnelingRegime::PlateauEdge => center * self.edge_speedup,
        }
    }
}

/// T1 (ps) at `temperature` (K), log-linear between tabulated points.
pub fn interpolate_t1<T: Real>(temperature: T, model: &RelaxationModel<T>) -> Result<T> {
    model.validate()?;
    let pts = &model.t1_points;
    let (min, max) = (pts[0].0, pts[pts.len() - 1].0);
    if !(temperature >= min && temperature <= max) {
        return Err(Error::Extrapolation {
            temperature: to_f64(temperature),
            min: to_f64(min),
            max: to_f64(max),
        });
    }
    if pts.len() == 1 {
        return Ok(pts[0].1);
    }
    let k = pts
        .windows(2)
        .position(|w| temperature <= w[1].0)
        .unwrap_or(pts.len() - 2);
    let (t0, y0) = pts[k];
    let (t1, y1) = pts[k + 1];
    let f = (temperature - t0) / (t1 - t0);
    Ok((y0.ln() + f * (y1.ln() - y0.ln())).exp())
}

/// Which spin a cross-polarized transition pumps out of, and the target.
fn pump_legs<T: Real>(levels: &LevelStructure<T>, transition: usize) -> Result<Leg> {
    if !(1..=4).contains(&transition) {
        return Err(Error::param("pump_transition", "must be 1 or 4"));
    }
    let leg = levels.numbering.leg(transition);
    if leg.is_cavity_coupled() {
        return Err(Error::param(
            "pump_transition",
            format!("transition {transition} is cavity-coupled; pump transition 1 or 4"),
        ));
    }
    Ok(leg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PumpTier {
    /// Master-equation evolution.
    #[default]
    Engine,
    /// Closed-form two-level rate equation.
    RateEquation,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PumpProtocol<T> {
    pub transition: usize,
    pub duration_ps: T,
    pub rabi: T,
    pub tier: PumpTier,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PumpOutcome<T> {
    pub state: SpinState<T>,
    pub target: Spin,
    /// Set when co-tunneling competes with the pump.
    pub warning: Option<String>,
}

impl<T: Real> PumpOutcome<T> {
    pub fn fidelity(&self) -> T {
        self.state.population(self.target)
    }
}

/// Spin-flip rates (μeV) for the rate-equation tier.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PumpRates<T> {
    /// pumped spin → target
    pub forward: T,
    /// target → pumped spin, from the off-resonant drive of the other leg
    pub backward: T,
    pub cotunneling: T,
}

impl<T: Real> PumpRates<T> {
    /// Target-state population after `t` (internal units) from p₀.
    pub fn target_population(&self, p0: T, t: T) -> T {
        let lambda = self.forward + self.backward + lit::<T>(2.0) * self.cotunneling;
        if lambda == T::zero() {
            return p0;
        }
        let p_inf = (self.forward + self.cotunneling) / lambda;
        p_inf + (p0 - p_inf) * (-lambda * t).exp()
    }
}

/// Optical-pumping rates from the optical Bloch steady state of each driven
/// cross-polarized leg times the branching into the opposite spin.
pub fn pump_rates<T: Real>(
    params: &DeviceParameters<T>,
    levels: &LevelStructure<T>,
    transition: usize,
    rabi: T,
) -> Result<PumpRates<T>> {
    let pumped = pump_legs(levels, transition)?;
    let laser = levels.leg_energy(pumped);
    let kappa = lit::<T>(2.0) * params.cavity_hwhm;
    let two = lit::<T>(2.0);
    let mu = &params.dipoles.normalized();

    // Flip rate out of spin `from` through the trion whose cross leg starts there.
    let rate_from = |from: Spin| {
        let trion = if from == pumped.spin { pumped.trion } else { other(pumped.trion) };
        let drive_leg = Leg::new(trion, from);
        let emit_leg = Leg::new(trion, from.flipped());
        let total_mu = mu.get(drive_leg) * mu.get(drive_leg) + mu.get(emit_leg) * mu.get(emit_leg);
        let branch_rad = |leg: Leg| {
            if total_mu > T::zero() {
                params.radiative_rate * mu.get(leg) * mu.get(leg) / total_mu
            } else {
                T::zero()
            }
        };
        let g = params.qd_cavity_coupling * mu.get(emit_leg);
        let delta_c = (levels.qd_center_energy - params.cavity_energy) + levels.detuning_from_center(emit_leg);
        let purcell = lit::<T>(4.0) * g * g * kappa / (lit::<T>(4.0) * delta_c * delta_c + kappa * kappa);
        let gamma_t = params.radiative_rate + purcell;
        let to_other = branch_rad(emit_leg) + purcell;
        let gamma2 = gamma_t / two
            + params.spin_dephasing_rate / lit(4.0)
            + params.spin_flip_rate / two
            + params.trion_dephasing_rate;
        let omega = rabi * mu.get(drive_leg);
        let delta = laser - levels.leg_energy(drive_leg);
        if gamma_t == T::zero() {
            return T::zero();
        }
        let excitation = omega * omega / two * gamma2
            / (delta * delta + gamma2 * gamma2 + omega * omega * gamma2 / gamma_t);
        excitation * to_other / gamma_t
    };
    Ok(PumpRates {
        forward: rate_from(pumped.spin),
        backward: rate_from(pumped.spin.flipped()),
        cotunneling: params.spin_flip_rate,
    })
}

fn other(t: Trion) -> Trion {
    match t {
        Trion::T1 => Trion::T2,
        Trion::T2 => Trion::T1,
    }
}

/// Pumps an unpolarized spin with the laser on `transition` (1 or 4) for
/// `duration_ps`, using the engine.
pub fn pump_spin<T: Real>(
    params: &DeviceParameters<T>,
    levels: &LevelStructure<T>,
    transition: usize,
    duration_ps: T,
) -> Result<PumpOutcome<T>> {
    pump_spin_with(
        params,
        levels,
        &PumpProtocol {
            transition,
            duration_ps,
            rabi: lit(DEFAULT_PUMP_RABI_UEV),
            tier: PumpTier::Engine,
        },
    )
}

pub fn pump_spin_with<T: Real>(
    params: &DeviceParameters<T>,
    levels: &LevelStructure<T>,
    protocol: &PumpProtocol<T>,
) -> Result<PumpOutcome<T>> {
    let pumped = pump_legs(levels, protocol.transition)?;
    if !(protocol.duration_ps >= T::zero()) {
        return Err(Error::param("pump_duration_ps", "must be >= 0"));
    }
    let target = pumped.spin.flipped();
    let rates = pump_rates(params, levels, protocol.transition, protocol.rabi)?;
    let warning = (rates.forward < lit::<T>(10.0) * lit::<T>(2.0) * rates.cotunneling).then(|| {
        format!(
            "ineffective pumping: pump rate {:.3e} ueV is not >> co-tunneling rate {:.3e} ueV; use the plateau-centre regime",
            to_f64(rates.forward),
            to_f64(rates.cotunneling)
        )
    });

    let state = match protocol.tier {
        PumpTier::RateEquation => {
            let t = protocol.duration_ps / lit(HBAR_UEV_PS);
            let p_target = rates.target_population(lit(0.5), t);
            let p_up = match target {
                Spin::Up => p_target,
                Spin::Down => T::one() - p_target,
            };
            SpinState::new(p_up, Cplx::new(T::zero(), T::zero()))?
        }
        PumpTier::Engine => {
            let p = DeviceParameters {
                drive_rabi: protocol.rabi,
                ..params.clone()
            };
            let model = build_model(&p, levels, levels.leg_energy(pumped), DEFAULT_FOCK_CUTOFF)?;
            let rho0 = DensityMatrix::ground_state(model.space(), lit(0.5), Cplx::new(T::zero(), T::zero()));
            if protocol.duration_ps == T::zero() {
                SpinState::from_density(&rho0)
            } else {
                let traj = evolve_with(&model, &rho0, &[protocol.duration_ps], &EvolveOptions::exponential())?;
                let rho = &traj[0];
                SpinState::from_density(rho)
            }
        }
    };
    Ok(PumpOutcome {
        state,
        target,
        warning,
    })
}

/// Emission of a spin prepared in `init`, split into Stokes and anti-Stokes
/// windows.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinResolvedSpectra<T> {
    pub stokes: Spectrum<T>,
    pub anti_stokes: Spectrum<T>,
    /// Integrated sideband weights (contour residues).
    pub weights: SidebandWeights<T>,
}

fn settled_analysis<T: Real>(
    model: &LindbladModel<T>,
    init: &SpinState<T>,
) -> Result<EmissionAnalysis<T>> {
    let rho_ss = steady_state(model)?;
    let rho0 = DensityMatrix::ground_state(model.space(), init.p_up, init.coherence);
    let settled = evolve_with(model, &rho0, &[lit(SETTLE_TIME_PS)], &EvolveOptions::exponential())?;
    EmissionAnalysis::from_states(model, &rho_ss, &settled[0])
}

/// Spin-conditioned emission: ρ(0) = init ⊗ |0⟩⟨0|, evolved for
/// [`SETTLE_TIME_PS`], then read out by quantum regression. Linear in the
/// initial state.
pub fn spin_resolved_raman<T: Real>(
    params: &DeviceParameters<T>,
    levels: &LevelStructure<T>,
    init: &SpinState<T>,
    laser_energy: T,
) -> Result<SpinResolvedSpectra<T>> {
    let model = build_model(params, levels, laser_energy, DEFAULT_FOCK_CUTOFF)?;
    let analysis = settled_analysis(&model, init)?;
    let ez = levels.electron_zeeman;
    let width = (analysis.sideband_hwhm() * lit(20.0)).max(lit(5.0));
    let half = if ez > T::zero() { width.min(ez) } else { width };
    let step = lit::<T>(DEFAULT_SPACING_UEV).min(analysis.sideband_hwhm() / lit(2.0));
    let s_grid = centered_grid(laser_energy - ez, half, step)?;
    let as_grid = centered_grid(laser_energy + ez, half, step)?;
    let weights = if ez > T::zero() {
        analysis.sideband_weights()
    } else {
        let w = analysis.pole_weight(T::zero(), lit(0.5));
        SidebandWeights {
            stokes: w,
            anti_stokes: w,
        }
    };
    Ok(SpinResolvedSpectra {
        stokes: analysis.spectrum(&s_grid)?,
        anti_stokes: analysis.spectrum(&as_grid)?,
        weights,
    })
}

/// [`spin_resolved_raman`] for the unpolarized spin left by fast
/// co-tunneling.
pub fn randomized_spin_raman<T: Real>(
    params: &DeviceParameters<T>,
    levels: &LevelStructure<T>,
    laser_energy: T,
) -> Result<SpinResolvedSpectra<T>> {
    spin_resolved_raman(params, levels, &SpinState::mixed(), laser_energy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::build_level_structure;
    use crate::raman::{pinned_laser_energy, raman_intensities, CavityPin};

    fn center_params() -> DeviceParameters<f64> {
        DeviceParameters {
            spin_flip_rate: RelaxationModel::<f64>::default().flip_rate(CotunnelingRegime::PlateauCenter),
            ..Default::default()
        }
    }

    #[test]
    fn t1_interpolation() {
        let m = RelaxationModel::<f64>::default();
        assert!((interpolate_t1(5.2, &m).unwrap() - 2.0e7).abs() < 1e-3);
        assert!((interpolate_t1(16.0, &m).unwrap() - 7.0e4).abs() < 1e-6);
        let mid = interpolate_t1(10.6, &m).unwrap();
        assert!((mid - (2.0e7f64 * 7.0e4).sqrt()).abs() / mid < 1e-12);
        assert!((mid - 1.183e6).abs() < 1e3);
        assert!(matches!(interpolate_t1(4.0, &m), Err(Error::Extrapolation { .. })));
        assert!(matches!(interpolate_t1(16.5, &m), Err(Error::Extrapolation { .. })));
    }

    #[test]
    fn regime_rates() {
        let m = RelaxationModel::<f64>::default();
        let c = m.flip_rate(CotunnelingRegime::PlateauCenter);
        let e = m.flip_rate(CotunnelingRegime::PlateauEdge);
        assert!((e / c - 1000.0).abs() < 1e-9);
        assert!((HBAR_UEV_PS / (2.0 * c) - 2.0e7).abs() < 1e-3);
    }

    #[test]
    fn spin_state_bounds() {
        assert!(SpinState::<f64>::new(1.2, Cplx::new(0.0, 0.0)).is_err());
        assert!(SpinState::<f64>::new(0.5, Cplx::new(0.6, 0.0)).is_err());
        let s = SpinState::<f64>::new(0.25, Cplx::new(0.1, -0.2)).unwrap();
        assert!((s.p_up + s.p_down - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_duration_is_identity() {
        let p = center_params();
        let l = build_level_structure(&p).unwrap();
        let out = pump_spin(&p, &l, 4, 0.0).unwrap();
        assert_eq!(out.state.p_up, 0.5);
        assert!(pump_spin(&p, &l, 2, 100.0).is_err());
    }

    #[test]
    fn pumping_targets() {
        let p = center_params();
        let l = build_level_structure(&p).unwrap();
        let four = pump_spin(&p, &l, 4, DEFAULT_PUMP_DURATION_PS).unwrap();
        assert_eq!(four.target, Spin::Down);
        assert!(four.fidelity() > 0.99, "{}", four.fidelity());
        assert!(four.warning.is_none());
        let one = pump_spin(&p, &l, 1, DEFAULT_PUMP_DURATION_PS).unwrap();
        assert_eq!(one.target, Spin::Up);
        assert!(one.fidelity() > 0.99, "{}", one.fidelity());
    }

    fn fidelity(p: &DeviceParameters<f64>, l: &LevelStructure<f64>, rabi: f64, duration: f64, tier: PumpTier) -> f64 {
        pump_spin_with(
            p,
            l,
            &PumpProtocol {
                transition: 4,
                duration_ps: duration,
                rabi,
                tier,
            },
        )
        .unwrap()
        .fidelity()
    }

    #[test]
    fn engine_matches_rate_equation() {
        let p = center_params();
        let l = build_level_structure(&p).unwrap();
        for (rabi, durations) in [
            (DEFAULT_PUMP_RABI_UEV, [500.0, 1500.0, 3000.0, 20000.0]),
            (1.0, [1000.0, 5000.0, 12000.0, 80000.0]),
        ] {
            for d in durations {
                let e = fidelity(&p, &l, rabi, d, PumpTier::Engine);
                let r = fidelity(&p, &l, rabi, d, PumpTier::RateEquation);
                assert!((e / r - 1.0).abs() < 0.02, "{rabi} {d}: {e} vs {r}");
            }
        }
    }

    #[test]
    fn slow_pump_warns_at_plateau_edge() {
        let p = DeviceParameters::<f64>::default();
        let l = build_level_structure(&p).unwrap();
        let out = pump_spin_with(
            &p,
            &l,
            &PumpProtocol {
                transition: 4,
                duration_ps: 100.0,
                rabi: 0.05,
                tier: PumpTier::RateEquation,
            },
        )
        .unwrap();
        assert!(out.warning.unwrap().contains("ineffective"));
    }

    #[test]
    fn pumping_is_monotone_without_cotunneling() {
        let p = DeviceParameters {
            spin_flip_rate: 0.0,
            ..Default::default()
        };
        let l = build_level_structure(&p).unwrap();
        let mut last = 0.0;
        for d in [0.0, 100.0, 300.0, 1000.0, 3000.0, 10000.0] {
            let f = pump_spin(&p, &l, 4, d).unwrap().fidelity();
            assert!(f >= last - 1e-12, "{d}: {f} < {last}");
            last = f;
        }
    }

    #[test]
    fn fast_cotunneling_randomizes() {
        let p = DeviceParameters {
            spin_flip_rate: 2000.0,
            drive_rabi: DEFAULT_PUMP_RABI_UEV,
            ..Default::default()
        };
        let l = build_level_structure(&p).unwrap();
        let m = build_model(&p, &l, l.transition_energy(4), 2).unwrap();
        let rho = steady_state(&m).unwrap();
        assert!(SpinState::from_density(&rho).polarization().abs() < 1e-3);
    }

    #[test]
    fn resolved_emission_is_linear() {
        let p = center_params();
        let l = build_level_structure(&p).unwrap();
        let w = pinned_laser_energy(p.cavity_energy, l.electron_zeeman, CavityPin::AntiStokes);
        let up = spin_resolved_raman(&p, &l, &SpinState::pure(Spin::Up), w).unwrap();
        let down = spin_resolved_raman(&p, &l, &SpinState::pure(Spin::Down), w).unwrap();
        let mix = SpinState::new(0.3, Cplx::new(0.0, 0.0)).unwrap();
        let m = spin_resolved_raman(&p, &l, &mix, w).unwrap();
        for i in 0..m.anti_stokes.len() {
            let want = 0.3 * up.anti_stokes.values()[i] + 0.7 * down.anti_stokes.values()[i];
            let got = m.anti_stokes.values()[i];
            assert!((got - want).abs() <= 1e-6 * want.abs().max(1e-12), "{i}: {got} vs {want}");
        }
        // AS comes from the down spin
        assert!(up.weights.anti_stokes < 0.05 * down.weights.anti_stokes);
    }

    #[test]
    fn randomized_ratio_tracks_selectivity() {
        // weak-coupling profile, where the closed form applies
        let p = DeviceParameters {
            qd_cavity_coupling: 10.0,
            radiative_rate: 17.25,
            ..center_params()
        };
        let l = build_level_structure(&p).unwrap();
        let w = pinned_laser_energy(p.cavity_energy, l.electron_zeeman, CavityPin::AntiStokes);
        let r = randomized_spin_raman(&p, &l, w).unwrap();
        let engine = r.weights.anti_stokes / r.weights.stokes;
        let i = raman_intensities(w, &p, &l).unwrap();
        let oracle = i.anti_stokes / i.stokes;
        assert!((engine / oracle - 1.0).abs() < 0.05, "{engine} vs {oracle}");

        let halved = DeviceParameters {
            dipoles: p.dipoles.map(|m| m * 0.5),
            ..p.clone()
        };
        let h = randomized_spin_raman(&halved, &l, w).unwrap();
        let ratio_h = h.weights.anti_stokes / h.weights.stokes;
        assert!((ratio_h / engine - 1.0).abs() < 1e-9);

        let zero = DeviceParameters { magnetic_field: 0.0, ..p.clone() };
        let lz = build_level_structure(&zero).unwrap();
        let z = randomized_spin_raman(&zero, &lz, zero.cavity_energy).unwrap();
        assert_eq!(z.weights.anti_stokes, z.weights.stokes);
    }
}
