// Copyright 2026 The mirrorcool Authors
// SPDX-License-Identifier: Apache-2.0

//! The effective phase-sensitive bath seen by the mirror once the cavity
//! has been eliminated and the homodyne current is fed back onto the
//! momentum quadrature.
//!
//! The generator has the squeezed-bath form
//!
//! ```text
//! dρ/dt = γ/2 (N+1) D[a]ρ + γ/2 N D[a†]ρ − γ/2 M (2a†ρa† − a†²ρ − ρa†²)
//!       − γ/2 M* (2aρa − a²ρ − ρa²) − iω_m[a†a, ρ] − κ([a², ρ] − [a†², ρ])
//! ```
//!
//! with γ = γ_m − g·sinφ and κ = (g·sinφ + γ_m)/4.

use std::f64::consts::FRAC_PI_2;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{DerivedCoupling, PhysicalConstants, PhysicalSetup};

const PHASE_SNAP: f64 = 1e-12;

/// sin and cos of the feedback phase, with the quadrature phases ±π/2 snapped
/// so that cos vanishes exactly there.
pub fn phase_trig(phi: f64) -> (f64, f64) {
    if (phi - FRAC_PI_2).abs() <= PHASE_SNAP {
        (1.0, 0.0)
    } else if (phi + FRAC_PI_2).abs() <= PHASE_SNAP {
        (-1.0, 0.0)
    } else {
        phi.sin_cos()
    }
}

/// Whether `phi` is the position-measurement/momentum-feedback phase −π/2.
pub fn is_cooling_phase(phi: f64) -> bool {
    (phi + FRAC_PI_2).abs() <= PHASE_SNAP
}

/// Model parameters one level below the laboratory setup: everything the
/// bath coefficients depend on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathParams {
    pub omega_m: f64,
    pub gamma_m: f64,
    /// Measurement rate Γ.
    #[serde(rename = "Gamma")]
    pub measurement_rate: f64,
    pub eta: f64,
    pub n_bar: f64,
    /// Bath temperature (K). Only used for the effective temperature.
    #[serde(rename = "T")]
    pub temperature: f64,
    pub g: f64,
    pub phi: f64,
}

impl BathParams {
    pub fn from_physical(coupling: &DerivedCoupling, setup: &PhysicalSetup) -> Self {
        BathParams {
            omega_m: coupling.omega_m,
            gamma_m: setup.gamma_m,
            measurement_rate: coupling.measurement_rate,
            eta: setup.eta,
            n_bar: coupling.n_bar,
            temperature: setup.temperature,
            g: setup.gain,
            phi: setup.phi,
        }
    }

    /// Desk-scale parameters given directly by thermal occupation; the
    /// temperature is back-computed with CODATA constants and φ = −π/2.
    pub fn desk(omega_m: f64, gamma_m: f64, measurement_rate: f64, eta: f64, n_bar: f64, g: f64) -> Self {
        BathParams {
            omega_m,
            gamma_m,
            measurement_rate,
            eta,
            n_bar,
            temperature: PhysicalConstants::CODATA.temperature_for_occupation(n_bar, omega_m),
            g,
            phi: -FRAC_PI_2,
        }
    }

    pub fn with_gain(mut self, g: f64) -> Self {
        self.g = g;
        self
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("omega_m", self.omega_m, 0.0, false),
            ("gamma_m", self.gamma_m, 0.0, true),
            ("Gamma", self.measurement_rate, 0.0, true),
            ("n_bar", self.n_bar, 0.0, true),
            ("T", self.temperature, 0.0, true),
            ("g", self.g, 0.0, true),
        ];
        for (name, v, lo, inclusive) in checks {
            let ok = v.is_finite() && if inclusive { v >= lo } else { v > lo };
            if !ok {
                let op = if inclusive { ">=" } else { ">" };
                return Err(Error::validation(name, format!("must be finite and {op} {lo}, got {v}")));
            }
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::validation("eta", format!("must lie in (0, 1], got {}", self.eta)));
        }
        if !self.phi.is_finite() {
            return Err(Error::validation("phi", "must be finite"));
        }
        Ok(())
    }

    /// Stability margins, computable even where the bath itself is not.
    pub fn margins(&self) -> StabilityMargins {
        StabilityMargins::new(self.omega_m, self.gamma_m, self.g, self.phi)
    }
}

/// Physical inputs retained by a bath built from [`BathParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathInputs {
    #[serde(rename = "Gamma")]
    pub measurement_rate: f64,
    pub eta: f64,
    pub n_bar: f64,
    #[serde(rename = "T")]
    pub temperature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveBath {
    /// Effective damping γ = γ_m − g·sinφ.
    pub gamma: f64,
    /// Effective occupation N.
    #[serde(rename = "N")]
    pub n: f64,
    /// Phase-sensitive coefficient M.
    #[serde(rename = "M")]
    pub m: Complex64,
    /// Coefficient of [a² − a†², ρ], (g·sinφ + γ_m)/4.
    pub squeeze_coeff: f64,
    pub omega_m: f64,
    pub gamma_m: f64,
    pub g: f64,
    pub phi: f64,
    /// `None` when the bath was specified by its coefficients directly.
    pub inputs: Option<BathInputs>,
}

impl EffectiveBath {
    pub fn new(p: &BathParams) -> Result<Self> {
        p.validate()?;
        let (sin_phi, cos_phi) = phase_trig(p.phi);
        let gamma = p.gamma_m - p.g * sin_phi;
        if !(gamma > 0.0) {
            return Err(Error::UnstableBath { gamma });
        }
        let feedback_noise = if p.g == 0.0 {
            0.0
        } else if p.measurement_rate > 0.0 {
            p.g * p.g / (4.0 * p.eta * p.measurement_rate)
        } else {
            return Err(Error::MissingMeasurement { g: p.g });
        };
        let n = (p.gamma_m * (p.n_bar - 0.5)
            + p.measurement_rate / 4.0
            + feedback_noise
            + p.g / 2.0 * sin_phi)
            / gamma;
        let m = -Complex64::new(
            p.gamma_m * p.n_bar + p.measurement_rate / 4.0 - feedback_noise,
            -p.g / 2.0 * cos_phi,
        ) / gamma;
        Ok(EffectiveBath {
            gamma,
            n,
            m,
            squeeze_coeff: (p.g * sin_phi + p.gamma_m) / 4.0,
            omega_m: p.omega_m,
            gamma_m: p.gamma_m,
            g: p.g,
            phi: p.phi,
            inputs: Some(BathInputs {
                measurement_rate: p.measurement_rate,
                eta: p.eta,
                n_bar: p.n_bar,
                temperature: p.temperature,
            }),
        })
    }

    /// A bath given by its generator coefficients. The mechanical damping and
    /// feedback gain are recovered from γ and the squeeze coefficient
    /// (γ + 4κ = 2γ_m, 4κ − γ = 2g·sinφ), with φ = ∓π/2 by the sign of g·sinφ.
    pub fn from_coefficients(gamma: f64, n: f64, m: Complex64, squeeze_coeff: f64, omega_m: f64) -> Result<Self> {
        for (name, v) in [
            ("gamma", gamma),
            ("N", n),
            ("M", m.re),
            ("M", m.im),
            ("squeeze_coeff", squeeze_coeff),
            ("omega_m", omega_m),
        ] {
            if !v.is_finite() {
                return Err(Error::validation(name, "must be finite"));
            }
        }
        if !(gamma > 0.0) {
            return Err(Error::UnstableBath { gamma });
        }
        if omega_m < 0.0 {
            return Err(Error::validation("omega_m", "must be >= 0"));
        }
        let gamma_m = (gamma + 4.0 * squeeze_coeff) / 2.0;
        if gamma_m < 0.0 {
            return Err(Error::validation(
                "squeeze_coeff",
                "implies a negative mechanical damping (gamma + 4*squeeze_coeff < 0)",
            ));
        }
        let g_sin = (4.0 * squeeze_coeff - gamma) / 2.0;
        let (g, phi) = if g_sin <= 0.0 { (-g_sin, -FRAC_PI_2) } else { (g_sin, FRAC_PI_2) };
        Ok(EffectiveBath {
            gamma,
            n,
            m,
            squeeze_coeff,
            omega_m,
            gamma_m,
            g,
            phi,
            inputs: None,
        })
    }

    /// The parameters this bath was built from, when it has them.
    pub fn params(&self) -> Option<BathParams> {
        self.inputs.map(|i| BathParams {
            omega_m: self.omega_m,
            gamma_m: self.gamma_m,
            measurement_rate: i.measurement_rate,
            eta: i.eta,
            n_bar: i.n_bar,
            temperature: i.temperature,
            g: self.g,
            phi: self.phi,
        })
    }

    pub fn require_params(&self) -> Result<BathParams> {
        self.params().ok_or(Error::MissingInputs {
            missing: "Gamma, eta, n_bar, T",
        })
    }

    /// Same bath with a different feedback gain.
    pub fn with_gain(&self, g: f64) -> Result<Self> {
        EffectiveBath::new(&self.require_params()?.with_gain(g))
    }

    /// Drift matrix of the quadrature means (X, P):
    /// d/dt (X, P) = [[g·sinφ, ω_m], [−ω_m, −γ_m]] (X, P).
    pub fn drift(&self) -> Matrix2<f64> {
        let (sin_phi, _) = phase_trig(self.phi);
        Matrix2::new(self.g * sin_phi, self.omega_m, -self.omega_m, -self.gamma_m)
    }

    /// Symmetrized white-noise intensity of the quadrature forces, including
    /// the γ prefactor: γ·[[(2N+1+2ReM)/4, ImM/2], [ImM/2, (2N+1−2ReM)/4]].
    ///
    /// With the physical inputs at hand this equals
    /// [[g²/(4ηΓ), g·cosφ/4], [g·cosφ/4, γ_m·n̄ + Γ/4]], evaluated directly
    /// since at large n̄ the N, M form cancels catastrophically.
    pub fn diffusion(&self) -> Matrix2<f64> {
        if let Some(i) = self.inputs {
            let (_, cos_phi) = phase_trig(self.phi);
            let xx = if self.g == 0.0 {
                0.0
            } else {
                self.g * self.g / (4.0 * i.eta * i.measurement_rate)
            };
            let xp = self.g * cos_phi / 4.0;
            let pp = self.gamma_m * i.n_bar + i.measurement_rate / 4.0;
            return Matrix2::new(xx, xp, xp, pp);
        }
        let two_n1 = 2.0 * self.n + 1.0;
        let xx = self.gamma * (two_n1 + 2.0 * self.m.re) / 4.0;
        let pp = self.gamma * (two_n1 - 2.0 * self.m.re) / 4.0;
        let xp = self.gamma * self.m.im / 2.0;
        Matrix2::new(xx, xp, xp, pp)
    }

    /// N(N+1) − |M|²; positive iff the generator is completely positive.
    ///
    /// For physically specified baths this is 4·det(C)/γ² − 1/4 with C the
    /// diffusion matrix, the same number without the N² − |M|² cancellation.
    pub fn positivity_gap(&self) -> f64 {
        if self.inputs.is_some() {
            let c = self.diffusion();
            let det = c[(0, 0)] * c[(1, 1)] - c[(0, 1)] * c[(0, 1)];
            return 4.0 * det / (self.gamma * self.gamma) - 0.25;
        }
        self.n * (self.n + 1.0) - self.m.norm_sqr()
    }

    pub fn margins(&self) -> StabilityMargins {
        StabilityMargins::new(self.omega_m, self.gamma_m, self.g, self.phi)
    }

    pub(crate) fn require_cooling_phase(&self) -> Result<()> {
        if is_cooling_phase(self.phi) {
            Ok(())
        } else {
            Err(Error::UnsupportedPhase { phi: self.phi })
        }
    }

    pub(crate) fn require_stable(&self) -> Result<()> {
        let m = self.margins();
        if m.stable {
            Ok(())
        } else {
            Err(Error::Unstable {
                margin_damping: m.margin_damping,
                margin_spring: m.margin_spring,
            })
        }
    }
}

pub fn build_bath(coupling: &DerivedCoupling, setup: &PhysicalSetup) -> Result<EffectiveBath> {
    EffectiveBath::new(&BathParams::from_physical(coupling, setup))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityMargins {
    pub stable: bool,
    /// γ_m − g·sinφ.
    pub margin_damping: f64,
    /// ω_m² − γ_m·g·sinφ.
    pub margin_spring: f64,
}

impl StabilityMargins {
    pub fn new(omega_m: f64, gamma_m: f64, g: f64, phi: f64) -> Self {
        let (sin_phi, _) = phase_trig(phi);
        let margin_damping = gamma_m - g * sin_phi;
        let margin_spring = omega_m * omega_m - gamma_m * g * sin_phi;
        StabilityMargins {
            stable: margin_damping > 0.0 && margin_spring > 0.0,
            margin_damping,
            margin_spring,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub stable: bool,
    pub lindblad_positive: bool,
    pub margin_damping: f64,
    pub margin_spring: f64,
    /// N(N+1) − |M|².
    pub positivity_gap: f64,
}

pub fn check_stability(bath: &EffectiveBath) -> StabilityReport {
    let m = bath.margins();
    let positivity_gap = bath.positivity_gap();
    StabilityReport {
        stable: m.stable,
        lindblad_positive: positivity_gap > 0.0,
        margin_damping: m.margin_damping,
        margin_spring: m.margin_spring,
        positivity_gap,
    }
}
