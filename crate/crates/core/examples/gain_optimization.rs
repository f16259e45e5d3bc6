// Copyright 2026 The mirrorcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Gain that minimizes the position variance.
//!
//! cargo run --example gain_optimization

use mirrorcool::bath::BathParams;
use mirrorcool::{build_bath, derive_coupling, optimize_gain, EffectiveBath, PhysicalConstants, PhysicalSetup};

fn main() -> mirrorcool::Result<()> {
    let desk = EffectiveBath::new(&BathParams::desk(62.8, 1.0, 200.0, 1.0, 100.0, 1.0))?;
    let opt = optimize_gain(&desk, 1e-2, 1e5)?;
    println!("desk set:         g_opt = {:.6e}, var_x = {:.6e}", opt.g_opt, opt.var_x_min);

    let setup = PhysicalSetup::room_temperature().with_gain(1.0);
    let room = build_bath(&derive_coupling(&setup, &PhysicalConstants::CODATA)?, &setup)?;
    let opt = optimize_gain(&room, 1.0, 1e12)?;
    println!("room temperature: g_opt = {:.6e}, var_x = {:.6e}", opt.g_opt, opt.var_x_min);
    Ok(())
}
