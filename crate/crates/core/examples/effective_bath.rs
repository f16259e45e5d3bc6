// Copyright 2026 The mirrorcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Effective bath coefficients and the two stability notions versus gain.
//!
//! cargo run --example effective_bath

use mirrorcool::{build_bath, check_stability, derive_coupling, PhysicalConstants, PhysicalSetup};

fn main() -> mirrorcool::Result<()> {
    println!("{:>10} {:>10} {:>14} {:>14} {:>12} {:>7} {:>9}", "g", "gamma", "N", "Re M", "gap", "stable", "positive");
    for g in [0.0, 1.0, 10.0, 100.0, 1000.0] {
        let setup = PhysicalSetup::room_temperature().with_gain(g);
        let coupling = derive_coupling(&setup, &PhysicalConstants::CODATA)?;
        let bath = build_bath(&coupling, &setup)?;
        let report = check_stability(&bath);
        println!(
            "{g:>10} {:>10.3} {:>14.6e} {:>14.6e} {:>12.4e} {:>7} {:>9}",
            bath.gamma, bath.n, bath.m.re, report.positivity_gap, report.stable, report.lindblad_positive
        );
    }
    Ok(())
}
