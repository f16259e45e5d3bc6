// Copyright 2026 The mirrorcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Feedback cooling of a macroscopic mirror by homodyne detection of a
//! cavity field.
//!
//! The crate derives the cavity–mirror coupling from laboratory inputs
//! ([`params`]), builds the effective phase-sensitive bath produced by the
//! feedback loop ([`bath`]), and predicts steady quadrature variances
//! ([`steady`]) and the position noise spectrum ([`spectrum`]) in closed
//! form. Two independent numerical oracles check those predictions: a
//! seeded Monte Carlo integration of the Langevin equations ([`langevin`])
//! and a truncated number-basis integration of the full master equation
//! ([`fock`]). The [`cli`] module backs the `mirrorcool` binary.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bath;
pub mod cli;
pub mod error;
pub mod fock;
pub mod langevin;
pub mod linalg;
pub mod params;
pub mod quadrature;
pub mod spectrum;
pub mod steady;

pub use bath::{build_bath, check_stability, BathParams, EffectiveBath, StabilityReport};
pub use error::{Error, Result};
pub use params::{derive_coupling, DerivedCoupling, PhysicalConstants, PhysicalSetup};
pub use spectrum::{eval_spectrum, fig1_scale, sum_rule_check, SpectrumSeries};
pub use steady::{closed_form_moments, high_gain_moments, lyapunov_moments, optimize_gain, SteadyMoments};
