// Copyright 2026 The mirrorcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Master-equation steady state in a truncated number basis, compared with
//! the closed-form variances.
//!
//! cargo run --release --example fock_master_equation

use mirrorcool::bath::BathParams;
use mirrorcool::fock::{build_generator, evolve_to_steady, thermal_state, FockConfig};
use mirrorcool::{closed_form_moments, EffectiveBath};

fn main() -> mirrorcool::Result<()> {
    let bath = EffectiveBath::new(&BathParams::desk(10.0, 1.0, 40.0, 1.0, 3.0, 8.0))?;
    let dim = 80;
    let generator = build_generator(&bath, dim)?;
    let solution = evolve_to_steady(&generator, &FockConfig::new(dim), &thermal_state(dim, 3.0))?;
    let exact = closed_form_moments(&bath)?;
    let m = &solution.moments;
    println!("var_x = {:.12} (closed form {:.12})", m.var_x, exact.var_x);
    println!("var_p = {:.12} (closed form {:.12})", m.var_p, exact.var_p.unwrap_or(f64::NAN));
    println!("<n>   = {:.12}", m.n);
    println!(
        "tail {:.1e}, max trace error {:.1e}, min eigenvalue {:.1e}, completely positive {}",
        solution.tail_population, solution.max_trace_error, solution.min_eigenvalue, solution.lindblad_positive
    );
    println!("steady after t = {:.2} s in {} steps", solution.t_steady, solution.steps);
    Ok(())
}
