// Copyright 2026 The mirrorcool Authors
// SPDX-License-Identifier: Apache-2.0

//! The JSON run configuration.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::{BathParams, EffectiveBath};
use crate::error::{Error, Result};
use crate::fock::FockConfig;
use crate::langevin::SimConfig;
use crate::params::{derive_coupling, DerivedCoupling, PhysicalConstants, PhysicalSetup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Everything one invocation needs. Exactly one of `setup` and `bath`
/// describes the system.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub setup: Option<PhysicalSetup>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bath: Option<BathOverride>,
    /// Replaces the CODATA constants; meant for ħ = 1 checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unsafe_constants: Option<PhysicalConstants>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fock: Option<FockBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

/// A bath given without going through the laboratory setup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BathOverride {
    /// Model parameters (ω_m, γ_m, Γ, η, n̄, T, g, φ).
    Feedback(BathParams),
    /// Generator coefficients directly.
    Coefficients(BathCoefficients),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathCoefficients {
    pub gamma: f64,
    #[serde(rename = "N")]
    pub n: f64,
    /// `[re, im]`
    #[serde(rename = "M")]
    pub m: Complex64,
    pub squeeze_coeff: f64,
    pub omega_m: f64,
}

/// Uniform frequency grid (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockBlock {
    /// Truncation; chosen from the occupations when absent.
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub t_final: Option<f64>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default = "default_max_n_bar")]
    pub max_n_bar: f64,
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
    /// Write the final density matrix next to the report.
    #[serde(default)]
    pub dump_rho: bool,
}

fn default_max_n_bar() -> f64 {
    50.0
}

fn default_max_dim() -> usize {
    400
}

impl Default for FockBlock {
    fn default() -> Self {
        FockBlock {
            dim: None,
            dt: None,
            t_final: None,
            tol: None,
            max_n_bar: default_max_n_bar(),
            max_dim: default_max_dim(),
            dump_rho: false,
        }
    }
}

impl FockBlock {
    pub fn to_config(&self, dim: usize) -> FockConfig {
        let base = FockConfig::new(dim);
        FockConfig {
            dt: self.dt.unwrap_or(base.dt),
            t_final: self.t_final.unwrap_or(base.t_final),
            tol: self.tol.unwrap_or(base.tol),
            ..base
        }
    }
}

/// Values to sweep. Absent axes stay at the configured point.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<f64>>,
    #[serde(rename = "Gamma", default, skip_serializing_if = "Option::is_none")]
    pub measurement_rate: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<f64>>,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

/// Where the bath comes from once the configuration is resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BathSource {
    Params(BathParams),
    Coefficients(BathCoefficients),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolved {
    pub constants: PhysicalConstants,
    pub coupling: Option<DerivedCoupling>,
    pub source: BathSource,
}

impl Resolved {
    pub fn params(&self) -> Option<BathParams> {
        match self.source {
            BathSource::Params(p) => Some(p),
            BathSource::Coefficients(_) => None,
        }
    }

    pub fn require_params(&self, what: &str) -> Result<BathParams> {
        self.params().ok_or_else(|| {
            Error::validation("bath", format!("{what} needs a setup or a feedback bath, not raw coefficients"))
        })
    }

    pub fn bath(&self) -> Result<EffectiveBath> {
        match self.source {
            BathSource::Params(p) => EffectiveBath::new(&p),
            BathSource::Coefficients(c) => EffectiveBath::from_coefficients(c.gamma, c.n, c.m, c.squeeze_coeff, c.omega_m),
        }
    }
}

impl RunConfig {
    /// The room-temperature setup with feedback off.
    pub fn room_temperature() -> Self {
        RunConfig {
            setup: Some(PhysicalSetup::room_temperature()),
            ..RunConfig::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::validation("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn constants(&self) -> Result<PhysicalConstants> {
        let k = self.unsafe_constants.unwrap_or_default();
        k.validate()?;
        Ok(k)
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let constants = self.constants()?;
        match (&self.setup, &self.bath) {
            (Some(_), Some(_)) => Err(Error::validation("bath", "give either `setup` or `bath`, not both")),
            (None, None) => Err(Error::validation("setup", "one of `setup` or `bath` is required")),
            (Some(setup), None) => {
                let coupling = derive_coupling(setup, &constants)?;
                Ok(Resolved {
                    constants,
                    coupling: Some(coupling),
                    source: BathSource::Params(BathParams::from_physical(&coupling, setup)),
                })
            }
            (None, Some(BathOverride::Feedback(p))) => {
                p.validate()?;
                Ok(Resolved {
                    constants,
                    coupling: None,
                    source: BathSource::Params(*p),
                })
            }
            (None, Some(BathOverride::Coefficients(c))) => Ok(Resolved {
                constants,
                coupling: None,
                source: BathSource::Coefficients(*c),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_mass_is_named() {
        let mut v = serde_json::to_value(RunConfig::room_temperature()).unwrap();
        v["setup"].as_object_mut().unwrap().remove("m");
        let err = RunConfig::from_json(&v.to_string()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("`m`"), "{err}");
    }

    #[test]
    fn setup_and_bath_are_exclusive() {
        let cfg = RunConfig {
            bath: Some(BathOverride::Feedback(BathParams::desk(10.0, 1.0, 40.0, 1.0, 3.0, 8.0))),
            ..RunConfig::room_temperature()
        };
        assert!(matches!(cfg.resolve(), Err(Error::Validation { field, .. }) if field == "bath"));
        assert!(matches!(RunConfig::default().resolve(), Err(Error::Validation { field, .. }) if field == "setup"));
    }

    #[test]
    fn bath_override_forms_parse() {
        let fb = r#"{"bath": {"kind": "feedback", "omega_m": 10, "gamma_m": 1, "Gamma": 40, "eta": 1,
                    "n_bar": 3, "T": 1e-9, "g": 8, "phi": -1.5707963267948966}}"#;
        let cfg = RunConfig::from_json(fb).unwrap();
        assert!(cfg.resolve().unwrap().bath().is_ok());

        let co = r#"{"bath": {"kind": "coefficients", "gamma": 2, "N": 1.5, "M": [0, 0], "squeeze_coeff": 0, "omega_m": 0}}"#;
        let cfg = RunConfig::from_json(co).unwrap();
        let r = cfg.resolve().unwrap();
        assert!(r.params().is_none());
        assert_eq!(r.bath().unwrap().n, 1.5);

        let typo = r#"{"bath": {"kind": "coefficients", "gamma": 2, "N": 1.5, "M": [0, 0], "squeeze": 0, "omega_m": 0}}"#;
        assert!(RunConfig::from_json(typo).is_err());
    }

    #[test]
    fn unsafe_constants_are_checked() {
        let cfg = RunConfig {
            unsafe_constants: Some(PhysicalConstants { hbar: -1.0, k_b: 1.0, c: 1.0 }),
            ..RunConfig::room_temperature()
        };
        assert!(cfg.resolve().is_err());
    }
}
