// Copyright 2026 The mirrorcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Steady-state quadrature moments under position measurement and
//! momentum feedback.
//!
//! Two independent routes are provided: the closed forms in the physical
//! parameters (Γ, η, n̄, g, γ_m, ω_m), and the stationary covariance of the
//! linear Langevin system built from the bath coefficients (γ, N, M).

use serde::{Deserialize, Serialize};

use crate::bath::EffectiveBath;
use crate::error::{Error, Result};
use crate::linalg::lyapunov_2x2;

/// Lower bound on ⟨X²⟩⟨P²⟩ for quadratures with [X, P] = i/2.
pub const HEISENBERG_BOUND: f64 = 1.0 / 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMethod {
    ClosedForm,
    Lyapunov,
    /// The large-gain asymptotic form; an approximation.
    HighGain,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyMoments {
    pub var_x: f64,
    pub var_p: Option<f64>,
    /// Symmetrized ⟨XP + PX⟩/2.
    pub cov_xp_sym: Option<f64>,
    /// Effective temperature T·ω_m²/g² (K); T itself without feedback.
    pub t_eff: Option<f64>,
    pub method: MomentMethod,
    /// ⟨X²⟩⟨P²⟩ ≥ 1/16, when ⟨P²⟩ is known.
    pub heisenberg_ok: Option<bool>,
}

impl SteadyMoments {
    fn new(var_x: f64, var_p: Option<f64>, cov_xp_sym: Option<f64>, t_eff: Option<f64>, method: MomentMethod) -> Result<Self> {
        if !(var_x.is_finite() && var_x > 0.0) {
            return Err(Error::InvalidSetup { quantity: "var_x" });
        }
        if let Some(vp) = var_p {
            if !(vp.is_finite() && vp > 0.0) {
                return Err(Error::InvalidSetup { quantity: "var_p" });
            }
        }
        Ok(SteadyMoments {
            var_x,
            var_p,
            cov_xp_sym,
            t_eff,
            method,
            heisenberg_ok: var_p.map(|vp| var_x * vp >= HEISENBERG_BOUND),
        })
    }
}

/// Effective temperature T·ω_m²/g², or T when there is no feedback.
pub fn effective_temperature(temperature: f64, omega_m: f64, g: f64) -> f64 {
    if g > 0.0 {
        temperature * omega_m * omega_m / (g * g)
    } else {
        temperature
    }
}

/// Closed-form ⟨X²⟩ at φ = −π/2, from the physical parameters alone.
pub(crate) fn closed_form_var_x(omega_m: f64, gamma_m: f64, meas: f64, eta: f64, n_bar: f64, g: f64) -> f64 {
    let w2 = omega_m * omega_m;
    let den = (gamma_m + g) * (w2 + gamma_m * g);
    let feedback = if g == 0.0 { 0.0 } else { g * g / (8.0 * eta * meas) };
    // (k_BT/2ħω_m + Γ/8γ_m)·γ_m, written so that γ_m = 0 stays finite.
    let thermal = n_bar * gamma_m / 2.0 + meas / 8.0;
    feedback * (gamma_m * gamma_m + w2 + gamma_m * g) / den + thermal * w2 / den
}

pub(crate) fn closed_form_var_p(omega_m: f64, gamma_m: f64, meas: f64, eta: f64, n_bar: f64, g: f64) -> f64 {
    let w2 = omega_m * omega_m;
    let den = (gamma_m + g) * (w2 + gamma_m * g);
    let feedback = if g == 0.0 { 0.0 } else { g * g / (8.0 * eta * meas) };
    let thermal = n_bar * gamma_m / 2.0 + meas / 8.0;
    feedback * w2 / den + thermal * (g * g + w2 + gamma_m * g) / den
}

/// Closed-form steady variances at φ = −π/2. The symmetrized covariance has no
/// closed form here and is taken from the Lyapunov solution.
pub fn closed_form_moments(bath: &EffectiveBath) -> Result<SteadyMoments> {
    let p = bath.require_params()?;
    bath.require_cooling_phase()?;
    bath.require_stable()?;
    let var_x = closed_form_var_x(p.omega_m, p.gamma_m, p.measurement_rate, p.eta, p.n_bar, p.g);
    let var_p = closed_form_var_p(p.omega_m, p.gamma_m, p.measurement_rate, p.eta, p.n_bar, p.g);
    let sigma = lyapunov_2x2(&bath.drift(), &bath.diffusion())?;
    SteadyMoments::new(
        var_x,
        Some(var_p),
        Some(sigma[(0, 1)]),
        Some(effective_temperature(p.temperature, p.omega_m, p.g)),
        MomentMethod::ClosedForm,
    )
}

/// Large-gain approximation of ⟨X²⟩ (valid for g ≫ ω_m·Q_m):
/// k_B·T_eff/(2ħω_m) + Γω_m²/(8γ_m g²) + g/(8ηΓ).
pub fn high_gain_moments(bath: &EffectiveBath) -> Result<SteadyMoments> {
    let p = bath.require_params()?;
    bath.require_cooling_phase()?;
    bath.require_stable()?;
    if !(p.g > 0.0) {
        return Err(Error::validation("g", "high-gain form needs g > 0"));
    }
    let ratio = (p.omega_m / p.g).powi(2);
    let var_x = p.n_bar / 2.0 * ratio
        + p.measurement_rate * ratio / (8.0 * p.gamma_m)
        + p.g / (8.0 * p.eta * p.measurement_rate);
    SteadyMoments::new(
        var_x,
        None,
        None,
        Some(effective_temperature(p.temperature, p.omega_m, p.g)),
        MomentMethod::HighGain,
    )
}

/// Stationary covariance of the Langevin system with drift and diffusion
/// read off the bath coefficients. Valid for any stable phase.
pub fn lyapunov_moments(bath: &EffectiveBath) -> Result<SteadyMoments> {
    let sigma = lyapunov_2x2(&bath.drift(), &bath.diffusion())?;
    let t_eff = bath
        .inputs
        .map(|i| effective_temperature(i.temperature, bath.omega_m, bath.g));
    SteadyMoments::new(
        sigma[(0, 0)],
        Some(sigma[(1, 1)]),
        Some(sigma[(0, 1)]),
        t_eff,
        MomentMethod::Lyapunov,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainOptimum {
    pub g_opt: f64,
    pub var_x_min: f64,
}

const SCAN_POINTS: usize = 256;
const GOLDEN_REL_TOL: f64 = 1e-9;

/// Gain in `[lo, hi]` minimizing the closed-form ⟨X²⟩, by a logarithmic scan
/// followed by golden-section refinement of the best bracket.
pub fn optimize_gain(template: &EffectiveBath, lo: f64, hi: f64) -> Result<GainOptimum> {
    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo <= hi) {
        return Err(Error::InvalidRange { lo, hi });
    }
    let p = template.require_params()?;
    template.require_cooling_phase()?;
    if p.measurement_rate == 0.0 && hi > 0.0 {
        return Err(Error::MissingMeasurement { g: hi });
    }
    let f = |g: f64| closed_form_var_x(p.omega_m, p.gamma_m, p.measurement_rate, p.eta, p.n_bar, g);
    if lo == hi {
        return Ok(GainOptimum { g_opt: lo, var_x_min: f(lo) });
    }

    let start = if lo > 0.0 { lo } else { hi * 1e-12 };
    let mut grid = Vec::with_capacity(SCAN_POINTS + 1);
    if lo == 0.0 {
        grid.push(0.0);
    }
    let ratio = (hi / start).ln() / (SCAN_POINTS - 1) as f64;
    grid.extend((0..SCAN_POINTS).map(|i| start * (ratio * i as f64).exp()));
    *grid.last_mut().unwrap() = hi;

    let values: Vec<f64> = grid.iter().map(|&g| f(g)).collect();
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(grid.len() - 1)];

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while (b - a) > GOLDEN_REL_TOL * (a.abs() + b.abs()).max(f64::MIN_POSITIVE) {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    let mut g_opt = 0.5 * (a + b);
    let mut var_x_min = f(g_opt);
    // The scan may already sit on a range endpoint.
    if values[best] < var_x_min {
        g_opt = grid[best];
        var_x_min = values[best];
    }
    Ok(GainOptimum { g_opt, var_x_min })
}
