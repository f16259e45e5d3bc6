// Copyright 2026 The mirrorcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Seeded Langevin ensemble checked against the analytic moments and spectrum.
//!
//! cargo run --release --example langevin_monte_carlo

use mirrorcool::bath::BathParams;
use mirrorcool::langevin::{psd_vs_analytic, simulate, CompareOptions, Scheme, SimConfig};
use mirrorcool::{closed_form_moments, eval_spectrum, EffectiveBath};

fn main() -> mirrorcool::Result<()> {
    let bath = EffectiveBath::new(&BathParams::desk(62.8, 1.0, 200.0, 1.0, 100.0, 50.0))?;
    let cfg = SimConfig {
        dt: 1e-3,
        t_relax: 1.0,
        t_sample: 100.0,
        n_traj: 200,
        seed: 42,
        welch_segment: 4096,
        welch_overlap: 0.5,
        scheme: Scheme::Exact,
        dump_trajectory: false,
    };
    let stats = simulate(&bath, &cfg)?;
    let exact = closed_form_moments(&bath)?;
    println!(
        "var_x = {:.5} ± {:.5} (exact {:.5}, z = {:.2})",
        stats.var_x_hat.value,
        stats.var_x_hat.stderr,
        exact.var_x,
        stats.var_x_hat.z_score(exact.var_x)
    );
    let var_p = exact.var_p.unwrap_or(f64::NAN);
    println!(
        "var_p = {:.5} ± {:.5} (exact {var_p:.5}, z = {:.2})",
        stats.var_p_hat.value,
        stats.var_p_hat.stderr,
        stats.var_p_hat.z_score(var_p)
    );
    let series = eval_spectrum(&bath, &stats.psd_hat.omega)?;
    let cmp = psd_vs_analytic(&stats.psd_hat, &series, &CompareOptions::default())?;
    println!(
        "spectrum: {} peak bins, worst relative deviation {:.3}, chi^2/dof = {:.2}",
        cmp.peak_bins,
        cmp.peak_max_rel_dev,
        cmp.chi_square / cmp.dof as f64
    );
    Ok(())
}
