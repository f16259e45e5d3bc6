// Copyright 2026 The mirrorcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Steady-state variances from the closed form, the Lyapunov solution and
//! the large-gain approximation.
//!
//! cargo run --example steady_state_variances

use mirrorcool::bath::BathParams;
use mirrorcool::{closed_form_moments, high_gain_moments, lyapunov_moments, EffectiveBath};

fn main() -> mirrorcool::Result<()> {
    let template = BathParams::desk(62.8, 1.0, 200.0, 1.0, 100.0, 0.0);
    println!("{:>8} {:>14} {:>14} {:>14} {:>14}", "g", "var_x closed", "var_x lyap", "var_x high-g", "var_p closed");
    for g in [0.0, 10.0, 50.0, 200.0, 1e4, 1e5] {
        let bath = EffectiveBath::new(&template.with_gain(g))?;
        let closed = closed_form_moments(&bath)?;
        let lyap = lyapunov_moments(&bath)?;
        let high = high_gain_moments(&bath).map(|m| format!("{:.6e}", m.var_x)).unwrap_or_else(|_| "-".into());
        println!(
            "{g:>8} {:>14.6e} {:>14.6e} {high:>14} {:>14.6e}",
            closed.var_x,
            lyap.var_x,
            closed.var_p.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
