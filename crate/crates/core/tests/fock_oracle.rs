// Copyright 2026 The mirrorcool Authors
// SPDX-License-Identifier: Apache-2.0

use approx::assert_relative_eq;
use mirrorcool::bath::{check_stability, BathParams, EffectiveBath};
use mirrorcool::fock::{build_generator, evolve_to_steady, thermal_state, FockConfig, FockSolution};
use mirrorcool::steady::{closed_form_moments, lyapunov_moments};
use nalgebra::{DMatrix, Matrix2, Vector2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};

fn desk(g: f64) -> BathParams {
    BathParams::desk(10.0, 1.0, 40.0, 1.0, 3.0, g)
}

/// N(N+1) − |M|² written out from the bath definitions, independent of the
/// library's evaluation.
fn scan_gap(p: &BathParams) -> f64 {
    let gamma = p.gamma_m + p.g;
    let feedback = p.g * p.g / (4.0 * p.eta * p.measurement_rate);
    let n = (p.gamma_m * (p.n_bar - 0.5) + p.measurement_rate / 4.0 + feedback - p.g / 2.0) / gamma;
    let m = -(p.gamma_m * p.n_bar + p.measurement_rate / 4.0 - feedback) / gamma;
    n * (n + 1.0) - m * m
}

/// Smallest integer gain at which the desk generator is completely positive.
fn positive_gain() -> f64 {
    (0..=40).map(f64::from).find(|&g| scan_gap(&desk(g)) > 0.0).unwrap()
}

fn solve(p: &BathParams, dim: usize) -> FockSolution {
    let b = EffectiveBath::new(p).unwrap();
    let gen = build_generator(&b, dim).unwrap();
    evolve_to_steady(&gen, &FockConfig::new(dim), &thermal_state(dim, p.n_bar)).unwrap()
}

#[test]
fn positivity_scan_fixture() {
    let g = positive_gain();
    assert_eq!(g, 8.0);
    for k in 0..=12 {
        let p = desk(f64::from(k));
        let report = check_stability(&EffectiveBath::new(&p).unwrap());
        assert_eq!(report.lindblad_positive, k >= 8, "g = {k}");
        assert_relative_eq!(report.positivity_gap, scan_gap(&p), epsilon = 1e-12, max_relative = 1e-12);
    }
}

#[test]
fn desk_steady_state_matches_closed_forms_and_converges_in_dim() {
    let p = desk(positive_gain());
    let expected = closed_form_moments(&EffectiveBath::new(&p).unwrap()).unwrap();
    let s80 = solve(&p, 80);
    assert!(s80.lindblad_positive);
    assert_relative_eq!(s80.moments.var_x, expected.var_x, max_relative = 1e-5);
    assert_relative_eq!(s80.moments.var_p, expected.var_p.unwrap(), max_relative = 1e-5);
    assert!(s80.tail_population < 1e-10);
    assert!(s80.max_trace_error < 1e-10);
    assert!(s80.max_hermiticity_error <= 1e-12);
    assert!(s80.min_eigenvalue > -1e-8);
    assert!(!s80.negativity_warning);

    let s100 = solve(&p, 100);
    assert!((s100.moments.var_x - s80.moments.var_x).abs() < 1e-8);
    assert!((s100.moments.var_p - s80.moments.var_p).abs() < 1e-8);
    assert!((s100.moments.n - s80.moments.n).abs() < 1e-8);
}

#[test]
fn non_positive_generator_still_gives_exact_moments() {
    let p = BathParams::desk(10.0, 1.0, 4.0, 1.0, 1.0, 2.0);
    let b = EffectiveBath::new(&p).unwrap();
    assert!(!check_stability(&b).lindblad_positive);
    let s = solve(&p, 40);
    let expected = closed_form_moments(&b).unwrap();
    assert!(!s.lindblad_positive);
    assert_relative_eq!(s.moments.var_x, expected.var_x, max_relative = 1e-5);
    assert_relative_eq!(s.moments.var_p, expected.var_p.unwrap(), max_relative = 1e-5);
}

#[test]
fn off_quadrature_phase_matches_lyapunov() {
    let p = BathParams::desk(10.0, 1.0, 4.0, 1.0, 1.0, 0.6).with_phi(0.8);
    let b = EffectiveBath::new(&p).unwrap();
    let expected = lyapunov_moments(&b).unwrap();
    let s = solve(&p, 100);
    assert_relative_eq!(s.moments.var_x, expected.var_x, max_relative = 1e-5);
    assert_relative_eq!(s.moments.var_p, expected.var_p.unwrap(), max_relative = 1e-5);
    assert_relative_eq!(s.moments.cov_xp_sym, expected.cov_xp_sym.unwrap(), max_relative = 1e-5);
}

/// Without measurement or feedback the fixed point is the thermal state of
/// mean n̄ − 1/2, where ⟨X²⟩ = ⟨P²⟩ = n̄/2.
#[test]
fn thermal_limit_is_diagonal_geometric() {
    let n_bar = 2.0;
    let p = BathParams::desk(2.0, 1.0, 0.0, 1.0, n_bar, 0.0);
    let s = solve(&p, 60);
    assert!((s.moments.n - (n_bar - 0.5)).abs() < 1e-6, "{}", s.moments.n);
    assert!((s.moments.var_x - n_bar / 2.0).abs() < 1e-6);
    let ratio = (n_bar - 0.5) / (n_bar + 0.5);
    for k in 0..20 {
        let pk = s.rho[(k, k)].re;
        assert_relative_eq!(s.rho[(k + 1, k + 1)].re / pk, ratio, max_relative = 1e-5);
    }
    let off = (0..60)
        .flat_map(|i| (0..60).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| s.rho[(i, j)].norm())
        .fold(0.0, f64::max);
    assert!(off < 1e-8, "{off}");
}

fn random_low_state(dim: usize, support: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let m = DMatrix::from_fn(dim, dim, |i, j| {
        if i < support && j < support {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let rho = &m * m.adjoint();
    let tr: Complex64 = rho.diagonal().iter().sum();
    rho / tr
}

/// The generator's first and second moment rates reproduce the linear
/// quadrature dynamics d⟨v⟩/dt = A⟨v⟩ and dΣ/dt = AΣ + ΣAᵀ + C, at any phase.
#[test]
fn generator_moments_reproduce_drift_and_diffusion() {
    let cases = [
        desk(8.0),
        desk(2.0),
        desk(0.0),
        desk(0.7).with_phi(0.9),
        desk(3.0).with_phi(-2.4),
        BathParams::desk(62.8, 1.0, 200.0, 0.6, 100.0, 50.0).with_phi(-1.1),
    ];
    for (case, p) in cases.iter().enumerate() {
        let b = EffectiveBath::new(p).unwrap();
        let gen = build_generator(&b, 24).unwrap();
        let a = b.drift();
        let c = b.diffusion();
        for seed in 0..4 {
            let rho = random_low_state(24, 8, 100 * case as u64 + seed);
            let m = gen.moments(&rho);
            let rate = gen.apply(&rho);
            let (da, da2, dn) = gen.moment_rates(&rate);

            let mean = Vector2::new(m.a.re, m.a.im);
            let mean_rate = a * mean;
            let scale = mean_rate.norm().max(1.0);
            assert!((da.re - mean_rate[0]).abs() < 1e-10 * scale, "case {case}");
            assert!((da.im - mean_rate[1]).abs() < 1e-10 * scale, "case {case}");

            // Uncentred symmetrized second moments.
            let xx = (2.0 * m.a2.re + 2.0 * m.n + 1.0) / 4.0;
            let pp = (-2.0 * m.a2.re + 2.0 * m.n + 1.0) / 4.0;
            let xp = m.a2.im / 2.0;
            let sigma = Matrix2::new(xx, xp, xp, pp);
            let expected = a * sigma + sigma * a.transpose() + c;
            let got = Matrix2::new(
                (2.0 * da2.re + 2.0 * dn) / 4.0,
                da2.im / 2.0,
                da2.im / 2.0,
                (-2.0 * da2.re + 2.0 * dn) / 4.0,
            );
            let scale = expected.norm().max(1.0);
            assert!((got - expected).norm() < 1e-10 * scale, "case {case}: {got} vs {expected}");
        }
    }
}
