// Copyright 2026 The mirrorcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Symmetrized position-quadrature noise spectrum under feedback.
//!
//! Convention: S(ω) = ∫⟨X(t)X(0)⟩_s e^{iωt} dt, so that
//! (1/2π)∫S(ω)dω = ⟨X²⟩.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::EffectiveBath;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::steady::closed_form_moments;

pub const DEFAULT_GRID_POINTS: usize = 4096;
pub const DEFAULT_GRID_SPAN: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Raw,
    /// Divided by 2π⟨X²⟩ at zero gain.
    Fig1Scaled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSeries {
    pub omega: Vec<f64>,
    pub values: Vec<f64>,
    pub normalization: Normalization,
    pub params: EffectiveBath,
}

impl SpectrumSeries {
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// Grid point carrying the largest value (first one on ties).
    pub fn argmax(&self) -> Option<(f64, f64)> {
        self.omega
            .iter()
            .zip(&self.values)
            .fold(None, |best: Option<(f64, f64)>, (&w, &v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((w, v)),
            })
    }
}

/// Ξ(ω) = (iω + g)(iω + γ_m) + ω_m².
pub fn xi(bath: &EffectiveBath, omega: f64) -> Complex64 {
    let i_w = Complex64::new(0.0, omega);
    (i_w + bath.g) * (i_w + bath.gamma_m) + bath.omega_m * bath.omega_m
}

/// |Ξ(ω)|² = (ω_m² + γ_m g − ω²)² + ω²(γ_m + g)².
pub fn xi_modulus_sq(bath: &EffectiveBath, omega: f64) -> f64 {
    let w2 = omega * omega;
    let re = bath.omega_m * bath.omega_m + bath.gamma_m * bath.g - w2;
    let damping = bath.gamma_m + bath.g;
    re * re + w2 * damping * damping
}

/// Pointwise spectrum at φ = −π/2:
/// γ/(4|Ξ|²)·[(γ_m² + ω² + ω_m²)(2N+1) + (γ_m² + ω² − ω_m²)·2ReM].
///
/// The caller is responsible for phase and stability.
pub fn spectral_density(bath: &EffectiveBath, omega: f64) -> f64 {
    let (gm2, w2, wm2) = (bath.gamma_m * bath.gamma_m, omega * omega, bath.omega_m * bath.omega_m);
    let bracket = (gm2 + w2 + wm2) * (2.0 * bath.n + 1.0) + (gm2 + w2 - wm2) * 2.0 * bath.m.re;
    bath.gamma / 4.0 * bracket / xi_modulus_sq(bath, omega)
}

pub fn eval_spectrum(bath: &EffectiveBath, omega_grid: &[f64]) -> Result<SpectrumSeries> {
    bath.require_cooling_phase()?;
    bath.require_stable()?;
    if omega_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if let Some(w) = omega_grid.iter().find(|w| !w.is_finite()) {
        return Err(Error::validation("omega", format!("grid contains non-finite value {w}")));
    }
    Ok(SpectrumSeries {
        omega: omega_grid.to_vec(),
        values: omega_grid.iter().map(|&w| spectral_density(bath, w)).collect(),
        normalization: Normalization::Raw,
        params: *bath,
    })
}

/// Uniform grid of `points` over [lo, hi], inclusive.
pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        n => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// 4096 points over [−5(ω_m + g), 5(ω_m + g)].
pub fn default_grid(bath: &EffectiveBath) -> Vec<f64> {
    let edge = DEFAULT_GRID_SPAN * (bath.omega_m + bath.g);
    uniform_grid(-edge, edge, DEFAULT_GRID_POINTS)
}

/// Divides by 2π⟨X²⟩_{g=0}, the normalization used for gain comparisons.
pub fn fig1_scale(series: &SpectrumSeries, var_x_g0: f64) -> Result<SpectrumSeries> {
    if series.normalization != Normalization::Raw {
        return Err(Error::AlreadyScaled);
    }
    if !(var_x_g0.is_finite() && var_x_g0 > 0.0) {
        return Err(Error::validation("var_x_g0", format!("must be finite and > 0, got {var_x_g0}")));
    }
    let scale = 2.0 * PI * var_x_g0;
    Ok(SpectrumSeries {
        omega: series.omega.clone(),
        values: series.values.iter().map(|v| v / scale).collect(),
        normalization: Normalization::Fig1Scaled,
        params: series.params,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumRule {
    /// (1/2π)∫S(ω)dω.
    pub integral: f64,
    pub var_x: f64,
    pub rel_err: f64,
    /// Quadrature error estimate on the integral.
    pub quad_error: f64,
}

/// Relative cutoff (in units of the largest system rate) beyond which the
/// spectrum is replaced by its asymptotic expansion.
const TAIL_CUTOFF: f64 = 1e4;

/// Compares (1/2π)∫S dω against the closed-form ⟨X²⟩.
pub fn sum_rule_check(bath: &EffectiveBath) -> Result<SumRule> {
    let var_x = closed_form_moments(bath)?.var_x;
    let (integral, quad_error) = spectrum_integral(bath)?;
    Ok(SumRule {
        integral,
        var_x,
        rel_err: (integral - var_x).abs() / var_x,
        quad_error,
    })
}

/// (1/2π)∫_{−∞}^{∞} S(ω)dω: adaptive quadrature on [0, Ω] plus the analytic
/// tail of S = (γ/4)(aω² + b)/(ω⁴ + pω² + q) ≈ α/ω² + β/ω⁴ beyond Ω.
pub fn spectrum_integral(bath: &EffectiveBath) -> Result<(f64, f64)> {
    bath.require_cooling_phase()?;
    bath.require_stable()?;
    let (gm, g, wm) = (bath.gamma_m, bath.g, bath.omega_m);
    let a = 2.0 * bath.n + 1.0 + 2.0 * bath.m.re;
    let b = (gm * gm + wm * wm) * (2.0 * bath.n + 1.0) + (gm * gm - wm * wm) * 2.0 * bath.m.re;
    let p = (gm + g).powi(2) - 2.0 * (wm * wm + gm * g);
    let alpha = bath.gamma / 4.0 * a;
    let beta = bath.gamma / 4.0 * (b - a * p);

    let resonance = (wm * wm + gm * g).sqrt();
    let scale = wm.max(gm + g).max(resonance);
    let cutoff = TAIL_CUTOFF * scale;

    let mut breaks = vec![0.0];
    let lo = scale * 1e-4;
    let n_log = 48;
    breaks.extend((0..=n_log).map(|i| lo * (cutoff / lo).powf(i as f64 / n_log as f64)));
    for w in [wm, resonance] {
        let width = gm + g;
        for k in [-4.0, -1.0, 0.0, 1.0, 4.0] {
            let x = w + k * width;
            if x > 0.0 && x < cutoff {
                breaks.push(x);
            }
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let opts = QuadOptions {
        rel_tol: 1e-12,
        ..QuadOptions::default()
    };
    let (half, err) = integrate(|w| spectral_density(bath, w), &breaks, opts)?;
    let tail = alpha / cutoff + beta / (3.0 * cutoff.powi(3));
    Ok(((half + tail) / PI, err / PI))
}
