// Copyright 2026 The mirrorcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Normalized position spectra for five feedback gains, written as CSV.
//!
//! cargo run --example fig1_spectrum > spectra.csv

use mirrorcool::spectrum::uniform_grid;
use mirrorcool::{
    build_bath, closed_form_moments, derive_coupling, eval_spectrum, fig1_scale, PhysicalConstants, PhysicalSetup,
};

fn main() -> mirrorcool::Result<()> {
    let gains = [0.0, 1.0, 10.0, 100.0, 1000.0];
    let grid = uniform_grid(0.0, 500.0, 501);
    let mut columns = Vec::new();
    let mut reference = None;
    for g in gains {
        let setup = PhysicalSetup::room_temperature().with_gain(g);
        let bath = build_bath(&derive_coupling(&setup, &PhysicalConstants::CODATA)?, &setup)?;
        let var_x_g0 = *reference.get_or_insert(closed_form_moments(&bath)?.var_x);
        columns.push(fig1_scale(&eval_spectrum(&bath, &grid)?, var_x_g0)?.values);
    }
    println!("omega,{}", gains.map(|g| format!("S_g{g}")).join(","));
    for (i, w) in grid.iter().enumerate() {
        let row: Vec<String> = columns.iter().map(|c| format!("{:e}", c[i])).collect();
        println!("{w},{}", row.join(","));
    }
    Ok(())
}
