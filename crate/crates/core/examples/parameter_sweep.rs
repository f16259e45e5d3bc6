// Copyright 2026 The mirrorcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Gain-by-phase sweep over the desk parameters, run in parallel.
//!
//! cargo run --example parameter_sweep

use std::f64::consts::FRAC_PI_2;

use mirrorcool::bath::BathParams;
use mirrorcool::cli::config::SweepConfig;
use mirrorcool::cli::{cmd_sweep, BathOverride, RunConfig};

fn main() -> mirrorcool::Result<()> {
    let cfg = RunConfig {
        bath: Some(BathOverride::Feedback(BathParams::desk(62.8, 1.0, 200.0, 1.0, 100.0, 0.0))),
        sweep: Some(SweepConfig {
            g: Some(vec![0.0, 0.5, 5.0, 50.0, 500.0]),
            phi: Some(vec![-FRAC_PI_2, -FRAC_PI_2 / 2.0, 0.0, FRAC_PI_2]),
            ..SweepConfig::default()
        }),
        ..RunConfig::default()
    };
    let report = cmd_sweep(&cfg, None)?;
    println!("{:>6} {:>8} {:>7} {:>9} {:>14}", "g", "phi", "stable", "positive", "var_x");
    for row in &report.rows {
        let var_x = row.var_x.map(|v| format!("{v:.6e}")).unwrap_or_else(|| "-".into());
        let positive = row.lindblad_positive.map(|p| p.to_string()).unwrap_or_else(|| "-".into());
        println!("{:>6} {:>8.4} {:>7} {positive:>9} {var_x:>14}", row.g, row.phi, row.stable);
    }
    Ok(())
}
