// Copyright 2026 The mirrorcool Authors
// SPDX-License-Identifier: Apache-2.0

use mirrorcool::bath::{BathParams, EffectiveBath};
use mirrorcool::langevin::{simulate, simulate_sde, trajectory_rng, LinearSde, Scheme, SimConfig, Stepper};
use mirrorcool::steady::closed_form_moments;
use nalgebra::{Matrix2, Vector2};
use rand_distr::{Distribution, StandardNormal};

fn cfg(dt: f64, t_relax: f64, t_sample: f64, n_traj: usize, segment: usize) -> SimConfig {
    SimConfig {
        dt,
        t_relax,
        t_sample,
        n_traj,
        seed: 7,
        welch_segment: segment,
        welch_overlap: 0.5,
        scheme: Scheme::Exact,
        dump_trajectory: false,
    }
}

fn desk() -> EffectiveBath {
    EffectiveBath::new(&BathParams::desk(62.8, 1.0, 200.0, 1.0, 100.0, 50.0)).unwrap()
}

/// Two uncoupled OU processes with rate κ and white-noise intensity D.
fn ou(kappa: f64, d: f64) -> LinearSde {
    LinearSde {
        drift: Matrix2::new(-kappa, 0.0, 0.0, -kappa),
        diffusion: Matrix2::new(d, 0.0, 0.0, d),
    }
}

#[test]
fn thermal_oscillator_equipartition() {
    let n_bar = 10.0;
    let b = EffectiveBath::new(&BathParams::desk(10.0, 1.0, 0.0, 1.0, n_bar, 0.0)).unwrap();
    let s = simulate(&b, &cfg(1e-3, 25.0, 100.0, 64, 4096)).unwrap();
    assert!(s.var_x_hat.z_score(n_bar / 2.0) < 4.0, "{:?}", s.var_x_hat);
    assert!(s.var_p_hat.z_score(n_bar / 2.0) < 4.0, "{:?}", s.var_p_hat);
    assert!(s.cov_xp_hat.value.abs() < 4.0 * s.cov_xp_hat.stderr);
}

#[test]
fn desk_moments_within_three_standard_errors() {
    let b = desk();
    let exact = closed_form_moments(&b).unwrap();
    let s = simulate(&b, &cfg(1e-3, 1.0, 50.0, 64, 4096)).unwrap();
    assert!(s.var_x_hat.z_score(exact.var_x) < 3.0, "{:?} vs {}", s.var_x_hat, exact.var_x);
    assert!(s.var_p_hat.z_score(exact.var_p.unwrap()) < 3.0, "{:?}", s.var_p_hat);
}

#[test]
fn result_is_independent_of_thread_count() {
    let b = desk();
    let c = cfg(1e-3, 1.0, 5.0, 8, 1024);
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| simulate(&b, &c).unwrap());
    let parallel = simulate(&b, &c).unwrap();
    assert_eq!(serial, parallel);
}

#[test]
fn ou_spectrum_is_lorentzian() {
    let (kappa, d) = (5.0, 2.0);
    let s = simulate_sde(&ou(kappa, d), &cfg(1e-3, 5.0, 100.0, 256, 8192)).unwrap();
    let psd = &s.psd_hat;
    let mut checked = 0;
    for (w, v) in psd.omega.iter().zip(&psd.values) {
        if *w > 3.0 * kappa {
            break;
        }
        let exact = d / (kappa * kappa + w * w);
        assert!((v - exact).abs() / exact < 0.10, "ω = {w}: {v} vs {exact}");
        checked += 1;
    }
    assert!(checked > 10);

    let var = d / (2.0 * kappa);
    assert!(s.var_x_hat.z_score(var) < 4.0);
    let integral = psd.integral();
    assert!((integral - s.var_x_hat.value).abs() / s.var_x_hat.value < 0.03, "{integral} vs {:?}", s.var_x_hat);
}

/// Feeding the coarse step the exact composition of two fine-step noises
/// must reproduce the fine path: the coarse propagator is Φ(h/2)² and its
/// noise factor spans the two-step covariance.
#[test]
fn halving_dt_with_common_noise_reproduces_the_path() {
    let sde = LinearSde::from_bath(&desk());
    let h = 2e-3;
    let fine = Stepper::new(&sde, h / 2.0, Scheme::Exact).unwrap();
    let coarse = Stepper::new(&sde, h, Scheme::Exact).unwrap();
    let mut rng = trajectory_rng(11, 0);
    let (mut xf, mut xc) = (Vector2::zeros(), Vector2::zeros());
    let (mut sum_f, mut sum_c, mut worst) = (0.0, 0.0, 0.0f64);
    let mut xi_cov = Matrix2::zeros();
    let steps = 200_000;
    for k in 0..steps {
        let z1 = Vector2::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
        let z2 = Vector2::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
        xf = fine.propagator * (fine.propagator * xf + fine.noise_factor * z1) + fine.noise_factor * z2;
        let w = fine.propagator * fine.noise_factor * z1 + fine.noise_factor * z2;
        let xi = coarse.noise_factor.solve_lower_triangular(&w).unwrap();
        xc = coarse.propagator * xc + coarse.noise_factor * xi;
        xi_cov += xi * xi.transpose();
        if k > 1000 {
            sum_f += xf[0] * xf[0];
            sum_c += xc[0] * xc[0];
        }
        worst = worst.max((xf - xc).norm() / xf.norm().max(1.0));
    }
    assert!(worst < 1e-9, "paths drift apart by {worst}");
    assert!((sum_f - sum_c).abs() / sum_f < 1e-9);
    let xi_cov = xi_cov / steps as f64;
    assert!((xi_cov - Matrix2::identity()).amax() < 0.02, "{xi_cov}");
}

#[test]
fn euler_maruyama_agrees_at_small_step() {
    let b = desk();
    let exact = closed_form_moments(&b).unwrap();
    let mut c = cfg(1e-4, 1.0, 20.0, 32, 4096);
    c.scheme = Scheme::EulerMaruyama;
    let s = simulate(&b, &c).unwrap();
    let rel = (s.var_x_hat.value - exact.var_x).abs() / exact.var_x;
    assert!(rel < 0.03 + 3.0 * s.var_x_hat.stderr / exact.var_x, "{rel}");
}
