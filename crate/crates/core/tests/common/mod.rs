//! Independent reference evaluations shared by the integration tests. Nothing
//! here calls into the library's physics code.

#![allow(dead_code)]

pub const MU_B: f64 = 57.8838;
pub const E_X: f64 = 1_291_200.0;
pub const OMEGA_C: f64 = 1_290_700.0;
pub const KAPPA_HALF: f64 = 175.0;
pub const GAMMA: f64 = 9.0;
pub const G_E: f64 = 0.43;
pub const G_T: f64 = 0.21;

fn lorentz(x: f64, w: f64) -> f64 {
    1.0 / (x * x + w * w)
}

/// (I_S, I_AS) for laser detuning `d` from E_X, written out term by term with
/// absolute photon energies.
pub fn brute_intensities(d: f64, b: f64, g_e: f64, g_t: f64, gamma: f64, cavity: f64, hwhm: f64) -> (f64, f64) {
    let ez = g_e * MU_B * b;
    let et = g_t * MU_B * b;
    // Stokes drive T1-up sits at E_X + (ez+et)/2, anti-Stokes drive T2-down
    // at E_X - (ez+et)/2 (up is the lower ground state)
    let s_drive = (ez + et) / 2.0;
    let as_drive = -(ez + et) / 2.0;
    let laser = E_X + d;
    let dos = |w: f64| hwhm * hwhm * lorentz(w - cavity, hwhm);
    let i_s = lorentz(d - s_drive, gamma) * dos(laser - ez);
    let i_as = lorentz(d - as_drive, gamma) * dos(laser + ez);
    (i_s, i_as)
}

/// Selectivity with the anti-Stokes photon on the cavity peak.
pub fn brute_selectivity(b: f64) -> f64 {
    let ez = G_E * MU_B * b;
    let d = OMEGA_C - ez - E_X;
    let (s, a) = brute_intensities(d, b, G_E, G_T, GAMMA, OMEGA_C, KAPPA_HALF);
    (a - s) / (a + s)
}

/// Complementary error function by composite Simpson quadrature of
/// 2/√π ∫_x^∞ e^{-s²} ds (truncated at x + 12).
pub fn erfc_quadrature(x: f64) -> f64 {
    let n = 200_000;
    let hi = x + 12.0;
    let h = (hi - x) / n as f64;
    let f = |s: f64| (-s * s).exp();
    let mut sum = f(x) + f(hi);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(x + k as f64 * h);
    }
    sum * h / 3.0 * 2.0 / std::f64::consts::PI.sqrt()
}

/// Gaussian-smoothed 1 − e^{−|τ|/t_rise} at τ = 0: 1 − e^{a²/4} erfc(a/2), a = Δt/t_rise.
pub fn convolved_rise_at_zero(dt: f64, t_rise: f64) -> f64 {
    let a = dt / t_rise;
    1.0 - (a * a / 4.0).exp() * erfc_quadrature(a / 2.0)
}

/// Steady excited population of a driven two-level system with population
/// decay `decay` and coherence decay `gamma2` (optical Bloch equations).
pub fn two_level_excited(omega: f64, delta: f64, decay: f64, gamma2: f64) -> f64 {
    let s = omega * omega * gamma2 / decay;
    0.5 * s / (delta * delta + gamma2 * gamma2 + s)
}
