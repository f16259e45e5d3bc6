// Copyright 2026 The mirrorcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Radiation-pressure coupling constants of the room-temperature setup.
//!
//! cargo run --example derive_room_temperature_coupling

use mirrorcool::{derive_coupling, PhysicalConstants, PhysicalSetup};

fn main() -> mirrorcool::Result<()> {
    let setup = PhysicalSetup::room_temperature();
    let d = derive_coupling(&setup, &PhysicalConstants::CODATA)?;
    println!("omega_m        {:>14.6e} rad/s", d.omega_m);
    println!("cavity decay   {:>14.6e} 1/s", d.gamma_b);
    println!("G              {:>14.6e} 1/s", d.coupling_g);
    println!("|beta_s|       {:>14.6e}", d.beta_s.norm());
    println!("chi            {:>14.6e} 1/s", d.chi);
    println!("Gamma          {:>14.6e} 1/s", d.measurement_rate);
    println!("x_s            {:>14.6e} m", d.x_s);
    println!("n_bar          {:>14.6e}", d.n_bar);
    println!("adiabatic      {}", d.adiabatic_ok);
    Ok(())
}
