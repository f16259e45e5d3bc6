// Copyright 2026 The mirrorcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Laboratory inputs and the coupling constants of the linearized
//! cavity–mirror model.
//!
//! Frequencies are entered in Hz and converted to angular units once, in
//! [`derive_coupling`]. Every rate downstream is in rad/s.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ratio γ_b/|χ| below which the fast-cavity elimination is flagged as doubtful.
pub const ADIABATIC_RATIO: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConstants {
    /// Reduced Planck constant (J·s).
    pub hbar: f64,
    /// Boltzmann constant (J/K).
    pub k_b: f64,
    /// Speed of light (m/s).
    pub c: f64,
}

impl PhysicalConstants {
    /// CODATA 2018 exact values.
    pub const CODATA: PhysicalConstants = PhysicalConstants {
        hbar: 1.054_571_817e-34,
        k_b: 1.380_649e-23,
        c: 299_792_458.0,
    };

    /// ħ = k_B = c = 1, for dimensionless unit tests.
    pub const NATURAL: PhysicalConstants = PhysicalConstants {
        hbar: 1.0,
        k_b: 1.0,
        c: 1.0,
    };

    pub fn new(hbar: f64, k_b: f64, c: f64) -> Result<Self> {
        let k = PhysicalConstants { hbar, k_b, c };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("hbar", self.hbar), ("k_B", self.k_b), ("c", self.c)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::validation(name, "must be finite and > 0"));
            }
        }
        Ok(())
    }

    /// Thermal occupation k_B·T/(ħ·ω) in the high-temperature limit.
    pub fn thermal_occupation(&self, temperature: f64, omega: f64) -> f64 {
        self.k_b * temperature / (self.hbar * omega)
    }

    /// Inverse of [`thermal_occupation`](Self::thermal_occupation).
    pub fn temperature_for_occupation(&self, n_bar: f64, omega: f64) -> f64 {
        n_bar * self.hbar * omega / self.k_b
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA
    }
}

/// Experimenter-facing inputs. Field names on the wire follow the usual
/// physics symbols (`m`, `L`, `T_r`, `P_in`, `T`, `g`, `Delta`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalSetup {
    /// Mirror mass (kg).
    #[serde(rename = "m")]
    pub mass: f64,
    /// Mechanical frequency (Hz).
    pub nu_m: f64,
    /// Mechanical damping rate (1/s).
    pub gamma_m: f64,
    /// Cavity length (m).
    #[serde(rename = "L")]
    pub cavity_length: f64,
    /// Laser frequency (Hz).
    pub nu_0: f64,
    /// Input mirror transmittivity.
    #[serde(rename = "T_r")]
    pub transmittivity: f64,
    /// Input laser power (W).
    #[serde(rename = "P_in")]
    pub input_power: f64,
    /// Bath temperature (K).
    #[serde(rename = "T")]
    pub temperature: f64,
    /// Photodetector efficiency.
    pub eta: f64,
    /// Feedback gain (1/s).
    #[serde(rename = "g")]
    pub gain: f64,
    /// Feedback phase (rad).
    pub phi: f64,
    /// Detuning (rad/s).
    #[serde(rename = "Delta", default)]
    pub detuning: f64,
}

impl PhysicalSetup {
    /// The room-temperature 10 kg mirror set, with feedback switched off and φ = −π/2.
    pub fn room_temperature() -> Self {
        PhysicalSetup {
            mass: 10.0,
            nu_m: 10.0,
            gamma_m: 1.0,
            cavity_length: 4.0,
            nu_0: 5.82e14,
            transmittivity: 0.02,
            input_power: 10.0,
            temperature: 300.0,
            eta: 1.0,
            gain: 0.0,
            phi: -PI / 2.0,
            detuning: 0.0,
        }
    }

    pub fn with_gain(mut self, g: f64) -> Self {
        self.gain = g;
        self
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("m", self.mass),
            ("nu_m", self.nu_m),
            ("L", self.cavity_length),
            ("nu_0", self.nu_0),
            ("T", self.temperature),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::validation(name, format!("must be finite and > 0, got {v}")));
            }
        }
        let non_negative = [
            ("gamma_m", self.gamma_m),
            ("g", self.gain),
            ("P_in", self.input_power),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::validation(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::validation("eta", format!("must lie in (0, 1], got {}", self.eta)));
        }
        if !(self.transmittivity > 0.0 && self.transmittivity <= 1.0) {
            return Err(Error::validation(
                "T_r",
                format!("must lie in (0, 1], got {}", self.transmittivity),
            ));
        }
        if !self.phi.is_finite() {
            return Err(Error::validation("phi", "must be finite"));
        }
        if !self.detuning.is_finite() {
            return Err(Error::validation("Delta", "must be finite"));
        }
        Ok(())
    }
}

/// Coupling constants of the linearized model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedCoupling {
    pub omega_m: f64,
    pub omega_0: f64,
    /// Cavity amplitude decay rate c·T_r/(2L).
    pub gamma_b: f64,
    /// Single-photon radiation-pressure coupling.
    #[serde(rename = "G")]
    pub coupling_g: f64,
    /// Input field amplitude, photon-flux normalized (s^-1/2), taken real.
    pub beta_in: f64,
    pub beta_s: Complex64,
    /// arg(β_s).
    pub varphi: f64,
    /// Signed effective coupling −4·G·|β_s|.
    pub chi: f64,
    /// Measurement rate χ²/γ_b.
    #[serde(rename = "Gamma")]
    pub measurement_rate: f64,
    /// Static mirror displacement (m).
    pub x_s: f64,
    /// ω_m/γ_m; absent for an undamped mirror.
    #[serde(rename = "Q_m")]
    pub quality_factor: Option<f64>,
    /// k_B·T/(ħ·ω_m).
    pub n_bar: f64,
    /// γ_b > 10·|χ|.
    pub adiabatic_ok: bool,
}

pub fn derive_coupling(setup: &PhysicalSetup, constants: &PhysicalConstants) -> Result<DerivedCoupling> {
    setup.validate()?;
    constants.validate()?;
    let PhysicalConstants { hbar, k_b, c } = *constants;

    let omega_m = 2.0 * PI * setup.nu_m;
    let omega_0 = 2.0 * PI * setup.nu_0;
    // The cavity resonance is identified with the laser frequency; any offset lives in Δ.
    let omega_c = omega_0;
    let l = setup.cavity_length;

    let gamma_b = c * setup.transmittivity / (2.0 * l);
    let coupling_g = (hbar * omega_c * omega_c / (2.0 * setup.mass * omega_m * l * l)).sqrt();
    let beta_in = (setup.input_power / (hbar * omega_0)).sqrt();
    let beta_s = Complex64::new(gamma_b.sqrt() * beta_in, 0.0)
        / Complex64::new(gamma_b / 2.0, -setup.detuning);
    let varphi = beta_s.arg();
    let chi = -4.0 * coupling_g * beta_s.norm();
    let measurement_rate = chi * chi / gamma_b;
    let x_s = hbar * omega_c * beta_s.norm_sqr() / (setup.mass * omega_m * omega_m * l);
    let quality_factor = (setup.gamma_m > 0.0).then(|| omega_m / setup.gamma_m);
    let n_bar = k_b * setup.temperature / (hbar * omega_m);

    let checks = [
        ("omega_m", omega_m),
        ("omega_0", omega_0),
        ("gamma_b", gamma_b),
        ("G", coupling_g),
        ("beta_in", beta_in),
        ("beta_s", beta_s.re),
        ("beta_s", beta_s.im),
        ("chi", chi),
        ("Gamma", measurement_rate),
        ("x_s", x_s),
        ("n_bar", n_bar),
        ("Q_m", quality_factor.unwrap_or(0.0)),
    ];
    for (quantity, v) in checks {
        if !v.is_finite() {
            return Err(Error::InvalidSetup { quantity });
        }
    }

    Ok(DerivedCoupling {
        omega_m,
        omega_0,
        gamma_b,
        coupling_g,
        beta_in,
        beta_s,
        varphi,
        chi,
        measurement_rate,
        x_s,
        quality_factor,
        n_bar,
        adiabatic_ok: gamma_b > ADIABATIC_RATIO * chi.abs(),
    })
}
