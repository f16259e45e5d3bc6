// Copyright 2026 The mirrorcool Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("invalid `{field}`: {reason}")]
    Validation { field: String, reason: String },

    /// Inputs were individually valid but produced a non-finite derived value.
    #[error("invalid setup: derived quantity `{quantity}` is not finite")]
    InvalidSetup { quantity: &'static str },

    /// The effective damping γ = γ_m − g·sinφ is not positive, so N and M are undefined.
    #[error("unstable bath: effective damping gamma = {gamma:e} is not positive")]
    UnstableBath { gamma: f64 },

    #[error("feedback gain g = {g:e} requires a measurement channel, but the measurement rate is zero")]
    MissingMeasurement { g: f64 },

    #[error("phase phi = {phi} is not supported here; closed forms exist only for phi = -pi/2 (use lyapunov_moments)")]
    UnsupportedPhase { phi: f64 },

    #[error("parameters are unstable (damping margin {margin_damping:e}, spring margin {margin_spring:e})")]
    Unstable { margin_damping: f64, margin_spring: f64 },

    #[error("Lyapunov system is singular: parameters lie on the stability boundary")]
    StabilityBoundary,

    #[error("bath was built from direct coefficients and lacks the physical inputs `{missing}`")]
    MissingInputs { missing: &'static str },

    #[error("frequency grid is empty")]
    EmptyGrid,

    #[error("invalid gain range [{lo}, {hi}]")]
    InvalidRange { lo: f64, hi: f64 },

    #[error("spectrum is already normalized")]
    AlreadyScaled,

    #[error("quadrature did not converge (estimated error {error:e})")]
    QuadratureFailure { error: f64 },

    #[error("noise covariance is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NonPositiveNoise { min_eigenvalue: f64 },

    #[error("frequency grids do not match: {0}")]
    GridMismatch(String),

    #[error("no steady state reached within t_final = {t_final} s (last moment rate {rate:e})")]
    NoSteadyState { t_final: f64, rate: f64 },

    #[error("Fock truncation too small: population of the last level is {tail:e}")]
    TruncationOverflow { tail: f64 },

    #[error("integrator step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("{0}")]
    Refused(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Process exit code for the command-line front end.
    ///
    /// 2 validation, 3 instability, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation { .. }
            | Error::MissingInputs { .. }
            | Error::UnsupportedPhase { .. }
            | Error::InvalidRange { .. }
            | Error::EmptyGrid
            | Error::AlreadyScaled
            | Error::GridMismatch(_)
            | Error::Refused(_)
            | Error::MissingMeasurement { .. }
            | Error::Io(_)
            | Error::Json(_) => 2,
            Error::UnstableBath { .. }
            | Error::Unstable { .. }
            | Error::StabilityBoundary => 3,
            Error::InvalidSetup { .. }
            | Error::QuadratureFailure { .. }
            | Error::NonPositiveNoise { .. }
            | Error::NoSteadyState { .. }
            | Error::TruncationOverflow { .. }
            | Error::StepUnderflow { .. } => 4,
        }
    }
}
