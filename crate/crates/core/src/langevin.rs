// Copyright 2026 The mirrorcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Monte Carlo oracle: seeded ensembles of the quadrature Langevin equations
//!
//! ```text
//! dX/dt = g·sinφ·X + ω_m P − √γ ξ_X
//! dP/dt = −ω_m X − γ_m P − √γ ξ_P
//! ```
//!
//! driven by white noises with the symmetrized correlation matrix of the
//! effective bath. Only the symmetric part of the input-noise correlations is
//! simulated; the antisymmetric commutator term has no classical counterpart
//! and drops out of every symmetrized moment and spectrum.
//!
//! The default scheme is exact in distribution for any step: each step applies
//! exp(A·dt) and adds a Gaussian increment with the integrated covariance
//! ∫₀^dt e^{As} C e^{Aᵀs} ds. Euler–Maruyama is kept as a cross-check.
//!
//! Each trajectory draws from its own ChaCha stream selected by
//! (seed, trajectory index), and ensemble reductions use pairwise summation
//! over trajectories in index order, so results do not depend on how the
//! work is scheduled.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{Matrix2, Vector2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::bath::EffectiveBath;
use crate::error::{Error, Result};
use crate::linalg::{exact_step, psd_cholesky, slowest_rate, sym_eigenvalues};
use crate::spectrum::{Normalization, SpectrumSeries};

/// Upper bound on dt times the fastest system rate.
pub const RESOLUTION_GUARD: f64 = 0.1;
/// Minimum transient length in units of the slowest relaxation time.
pub const RELAX_TIMES: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    Exact,
    EulerMaruyama,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub dt: f64,
    pub t_relax: f64,
    pub t_sample: f64,
    pub n_traj: usize,
    pub seed: u64,
    /// Samples per Welch segment.
    pub welch_segment: usize,
    /// Fractional overlap between consecutive segments, in [0, 1).
    #[serde(default = "default_overlap")]
    pub welch_overlap: f64,
    #[serde(default)]
    pub scheme: Scheme,
    /// Keep the sampled path of trajectory 0.
    #[serde(default)]
    pub dump_trajectory: bool,
}

fn default_overlap() -> f64 {
    0.5
}

/// Linear system d(X, P) = A (X, P) dt + noise with intensity C.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSde {
    pub drift: Matrix2<f64>,
    pub diffusion: Matrix2<f64>,
}

impl LinearSde {
    pub fn from_bath(bath: &EffectiveBath) -> Self {
        LinearSde {
            drift: bath.drift(),
            diffusion: bath.diffusion(),
        }
    }

    /// Largest of |tr A| and the entries of A; max(ω_m, γ_m + g) for the bath.
    pub fn rate_scale(&self) -> f64 {
        self.drift
            .iter()
            .fold(self.drift.trace().abs(), |m, v| m.max(v.abs()))
    }

    pub fn slowest_rate(&self) -> f64 {
        slowest_rate(&self.drift)
    }
}

impl SimConfig {
    pub fn validate(&self, sde: &LinearSde) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::validation("dt", "must be finite and > 0"));
        }
        let rate = sde.rate_scale();
        if self.dt * rate >= RESOLUTION_GUARD {
            return Err(Error::validation(
                "dt",
                format!("dt * rate = {:.3e} must stay below {RESOLUTION_GUARD}", self.dt * rate),
            ));
        }
        let slow = sde.slowest_rate();
        if !(self.t_relax >= RELAX_TIMES / slow) {
            return Err(Error::validation(
                "t_relax",
                format!("must be at least {RELAX_TIMES}/slowest rate = {:.4e} s", RELAX_TIMES / slow),
            ));
        }
        if self.n_traj < 2 {
            return Err(Error::validation("n_traj", "at least two trajectories are needed for standard errors"));
        }
        if self.welch_segment < 4 {
            return Err(Error::validation("welch_segment", "must be at least 4 samples"));
        }
        if !(0.0..1.0).contains(&self.welch_overlap) {
            return Err(Error::validation("welch_overlap", "must lie in [0, 1)"));
        }
        if self.samples() < self.welch_segment {
            return Err(Error::validation("t_sample", "shorter than one Welch segment"));
        }
        Ok(())
    }

    pub fn samples(&self) -> usize {
        (self.t_sample / self.dt).round() as usize
    }

    fn relax_steps(&self) -> usize {
        (self.t_relax / self.dt).ceil() as usize
    }
}

/// One-step update x ← Φx + L z with z standard normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stepper {
    pub propagator: Matrix2<f64>,
    /// Cholesky factor of the per-step noise covariance.
    pub noise_factor: Matrix2<f64>,
}

impl Stepper {
    pub fn new(sde: &LinearSde, dt: f64, scheme: Scheme) -> Result<Self> {
        let (propagator, q) = match scheme {
            Scheme::Exact => exact_step(&sde.drift, &sde.diffusion, dt),
            Scheme::EulerMaruyama => (Matrix2::identity() + sde.drift * dt, sde.diffusion * dt),
        };
        Ok(Stepper {
            propagator,
            noise_factor: psd_cholesky(&q)?,
        })
    }

    #[inline]
    pub fn step(&self, x: &Vector2<f64>, rng: &mut ChaCha8Rng) -> Vector2<f64> {
        let z = Vector2::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
        self.propagator * x + self.noise_factor * z
    }
}

/// Random stream for one trajectory.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Mean and standard error of an ensemble statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

impl Estimate {
    /// Mean and between-sample standard error of independent values.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let value = pairwise_sum(samples) / n;
        let dev: Vec<f64> = samples.iter().map(|s| (s - value).powi(2)).collect();
        let var = pairwise_sum(&dev) / (n - 1.0);
        Estimate {
            value,
            stderr: (var / n).sqrt(),
        }
    }

    /// |value − target| in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.value - target).abs() / self.stderr
    }
}

/// One-sided Welch estimate, valued as the even two-sided density on ω ≥ 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdEstimate {
    pub omega: Vec<f64>,
    pub values: Vec<f64>,
    /// Between-trajectory standard error per bin.
    pub stderr: Vec<f64>,
}

impl PsdEstimate {
    /// (1/2π)∫S dω over the full two-sided band, by the rectangle rule on the bins.
    pub fn integral(&self) -> f64 {
        let n = self.values.len();
        if n < 2 {
            return 0.0;
        }
        let d_omega = self.omega[1] - self.omega[0];
        let inner: Vec<f64> = self.values[1..n - 1].iter().map(|v| 2.0 * v).collect();
        (self.values[0] + pairwise_sum(&inner) + self.values[n - 1]) * d_omega / (2.0 * PI)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryEnsembleStats {
    pub var_x_hat: Estimate,
    pub var_p_hat: Estimate,
    pub cov_xp_hat: Estimate,
    pub psd_hat: PsdEstimate,
    /// Equivalent number of independent Gaussian samples behind var_x_hat,
    /// 2⟨X²⟩²/stderr².
    pub n_effective: f64,
    pub n_traj: usize,
    pub samples_per_traj: usize,
    /// Sampled (t, X, P) of trajectory 0 when requested.
    #[serde(skip)]
    pub dump: Option<Vec<[f64; 3]>>,
}

/// Simulates the Langevin system of a stable bath.
pub fn simulate(bath: &EffectiveBath, cfg: &SimConfig) -> Result<TrajectoryEnsembleStats> {
    bath.require_stable()?;
    simulate_sde(&LinearSde::from_bath(bath), cfg)
}

struct TrajectoryOutput {
    xx: f64,
    pp: f64,
    xp: f64,
    psd: Vec<f64>,
    dump: Option<Vec<[f64; 3]>>,
}

pub fn simulate_sde(sde: &LinearSde, cfg: &SimConfig) -> Result<TrajectoryEnsembleStats> {
    let (lo, _) = sym_eigenvalues(&sde.diffusion);
    let (_, hi) = sym_eigenvalues(&sde.diffusion);
    if lo < -1e-12 * hi.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NonPositiveNoise { min_eigenvalue: lo });
    }
    if crate::linalg::max_real_eigenvalue(&sde.drift) >= 0.0 {
        return Err(Error::Unstable {
            margin_damping: -sde.drift.trace(),
            margin_spring: sde.drift.determinant(),
        });
    }
    cfg.validate(sde)?;
    let stepper = Stepper::new(sde, cfg.dt, cfg.scheme)?;
    let welch = Welch::new(cfg.welch_segment, cfg.welch_overlap, cfg.dt);

    let outputs: Vec<TrajectoryOutput> = (0..cfg.n_traj)
        .into_par_iter()
        .map(|i| run_trajectory(&stepper, cfg, &welch, i))
        .collect();

    let pick = |f: fn(&TrajectoryOutput) -> f64| -> Vec<f64> { outputs.iter().map(f).collect() };
    let var_x_hat = Estimate::from_samples(&pick(|o| o.xx));
    let var_p_hat = Estimate::from_samples(&pick(|o| o.pp));
    let cov_xp_hat = Estimate::from_samples(&pick(|o| o.xp));

    let bins = welch.bins();
    let mut values = Vec::with_capacity(bins);
    let mut stderr = Vec::with_capacity(bins);
    for k in 0..bins {
        let column: Vec<f64> = outputs.iter().map(|o| o.psd[k]).collect();
        let e = Estimate::from_samples(&column);
        values.push(e.value);
        stderr.push(e.stderr);
    }

    Ok(TrajectoryEnsembleStats {
        n_effective: 2.0 * var_x_hat.value.powi(2) / var_x_hat.stderr.powi(2),
        var_x_hat,
        var_p_hat,
        cov_xp_hat,
        psd_hat: PsdEstimate {
            omega: welch.omega(),
            values,
            stderr,
        },
        n_traj: cfg.n_traj,
        samples_per_traj: cfg.samples(),
        dump: outputs.into_iter().next().and_then(|o| o.dump),
    })
}

fn run_trajectory(stepper: &Stepper, cfg: &SimConfig, welch: &Welch, index: usize) -> TrajectoryOutput {
    let mut rng = trajectory_rng(cfg.seed, index as u64);
    let mut state = Vector2::zeros();
    for _ in 0..cfg.relax_steps() {
        state = stepper.step(&state, &mut rng);
    }
    let n = cfg.samples();
    let mut xs = Vec::with_capacity(n);
    let mut ps = Vec::with_capacity(n);
    for _ in 0..n {
        state = stepper.step(&state, &mut rng);
        xs.push(state[0]);
        ps.push(state[1]);
    }
    let mean_of = |v: Vec<f64>| pairwise_sum(&v) / n as f64;
    let xx = mean_of(xs.iter().map(|x| x * x).collect());
    let pp = mean_of(ps.iter().map(|p| p * p).collect());
    let xp = mean_of(xs.iter().zip(&ps).map(|(x, p)| x * p).collect());
    let dump = (cfg.dump_trajectory && index == 0).then(|| {
        xs.iter()
            .zip(&ps)
            .enumerate()
            .map(|(k, (&x, &p))| [cfg.t_relax_effective() + (k + 1) as f64 * cfg.dt, x, p])
            .collect()
    });
    TrajectoryOutput {
        xx,
        pp,
        xp,
        psd: welch.estimate(&xs),
        dump,
    }
}

impl SimConfig {
    fn t_relax_effective(&self) -> f64 {
        self.relax_steps() as f64 * self.dt
    }
}

/// Hann-windowed Welch estimator of the two-sided density in angular units:
/// P_k = dt·|Σ w_j x_j e^{−2πijk/n}|² / Σ w_j².
pub struct Welch {
    segment: usize,
    hop: usize,
    dt: f64,
    window: Vec<f64>,
    window_power: f64,
    fft: Arc<dyn Fft<f64>>,
}

impl Welch {
    pub fn new(segment: usize, overlap: f64, dt: f64) -> Self {
        let window: Vec<f64> = (0..segment)
            .map(|j| 0.5 * (1.0 - (2.0 * PI * j as f64 / segment as f64).cos()))
            .collect();
        let window_power = window.iter().map(|w| w * w).sum();
        let hop = (((1.0 - overlap) * segment as f64).round() as usize).max(1);
        Welch {
            segment,
            hop,
            dt,
            window,
            window_power,
            fft: FftPlanner::new().plan_fft_forward(segment),
        }
    }

    pub fn bins(&self) -> usize {
        self.segment / 2 + 1
    }

    pub fn omega(&self) -> Vec<f64> {
        let d_omega = 2.0 * PI / (self.segment as f64 * self.dt);
        (0..self.bins()).map(|k| k as f64 * d_omega).collect()
    }

    pub fn estimate(&self, samples: &[f64]) -> Vec<f64> {
        let mut acc = vec![0.0; self.bins()];
        let mut buf = vec![Complex::new(0.0, 0.0); self.segment];
        let mut count = 0usize;
        let mut start = 0;
        while start + self.segment <= samples.len() {
            for (b, (x, w)) in buf.iter_mut().zip(samples[start..].iter().zip(&self.window)) {
                *b = Complex::new(x * w, 0.0);
            }
            self.fft.process(&mut buf);
            for (a, b) in acc.iter_mut().zip(&buf) {
                *a += b.norm_sqr();
            }
            count += 1;
            start += self.hop;
        }
        let scale = self.dt / (self.window_power * count as f64);
        acc.iter().map(|a| a * scale).collect()
    }
}

/// Sum with O(log n) error growth, independent of thread scheduling.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 16 {
        values.iter().sum()
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareOptions {
    /// Bins with S ≥ peak_fraction·max S form the peak region.
    pub peak_fraction: f64,
    /// Largest allowed relative deviation inside the peak region.
    pub max_rel_dev: f64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            peak_fraction: 0.5,
            max_rel_dev: 0.10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdComparison {
    pub z_scores: Vec<f64>,
    /// Σz² over the peak region.
    pub chi_square: f64,
    pub dof: usize,
    pub peak_bins: usize,
    pub peak_max_rel_dev: f64,
    pub passed: bool,
}

/// Compares a Welch estimate with an analytic series evaluated on the same bins.
pub fn psd_vs_analytic(psd: &PsdEstimate, series: &SpectrumSeries, opts: &CompareOptions) -> Result<PsdComparison> {
    if series.normalization != Normalization::Raw {
        return Err(Error::GridMismatch("analytic series must be unscaled".into()));
    }
    if psd.omega.len() != series.omega.len() {
        return Err(Error::GridMismatch(format!(
            "{} estimate bins vs {} analytic points",
            psd.omega.len(),
            series.omega.len()
        )));
    }
    let span = psd.omega.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    if let Some((a, b)) = psd
        .omega
        .iter()
        .zip(&series.omega)
        .find(|(a, b)| (*a - *b).abs() > 1e-9 * span)
    {
        return Err(Error::GridMismatch(format!("bin at {a} vs analytic point at {b}")));
    }

    let peak = series.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let threshold = opts.peak_fraction * peak;
    let mut z_scores = Vec::with_capacity(psd.values.len());
    let (mut chi_square, mut dof, mut peak_bins, mut peak_max_rel_dev) = (0.0, 0, 0, 0.0f64);
    for ((est, se), s) in psd.values.iter().zip(&psd.stderr).zip(&series.values) {
        let z = if *se > 0.0 { (est - s) / se } else { 0.0 };
        z_scores.push(z);
        if *s >= threshold {
            peak_bins += 1;
            peak_max_rel_dev = peak_max_rel_dev.max((est - s).abs() / s);
            if *se > 0.0 {
                chi_square += z * z;
                dof += 1;
            }
        }
    }
    Ok(PsdComparison {
        z_scores,
        chi_square,
        dof,
        peak_bins,
        peak_max_rel_dev,
        passed: peak_bins > 0 && peak_max_rel_dev <= opts.max_rel_dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::BathParams;
    use approx::assert_relative_eq;

    fn small_cfg(seed: u64) -> SimConfig {
        SimConfig {
            dt: 1e-3,
            t_relax: 1.0,
            t_sample: 20.0,
            n_traj: 16,
            seed,
            welch_segment: 1024,
            welch_overlap: 0.5,
            scheme: Scheme::Exact,
            dump_trajectory: false,
        }
    }

    fn desk(g: f64) -> EffectiveBath {
        EffectiveBath::new(&BathParams::desk(62.8, 1.0, 200.0, 1.0, 100.0, g)).unwrap()
    }

    #[test]
    fn pairwise_sum_matches_naive_on_small_integers() {
        let v: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&v), 500_500.0);
    }

    #[test]
    fn welch_of_white_noise_is_flat() {
        let dt = 0.01;
        let mut rng = trajectory_rng(1, 0);
        let xs: Vec<f64> = (0..1 << 16).map(|_| StandardNormal.sample(&mut rng)).collect();
        let w = Welch::new(256, 0.5, dt);
        let p = w.estimate(&xs);
        let mean = p[1..p.len() - 1].iter().sum::<f64>() / (p.len() - 2) as f64;
        // unit-variance samples at spacing dt: S = dt
        assert_relative_eq!(mean, dt, max_relative = 0.02);
    }

    #[test]
    fn config_guards() {
        let sde = LinearSde::from_bath(&desk(50.0));
        let mut c = small_cfg(0);
        c.dt = 0.01;
        assert!(matches!(c.validate(&sde), Err(Error::Validation { field, .. }) if field == "dt"));
        let mut c = small_cfg(0);
        c.t_relax = 0.01;
        assert!(matches!(c.validate(&sde), Err(Error::Validation { field, .. }) if field == "t_relax"));
        let mut c = small_cfg(0);
        c.n_traj = 1;
        assert!(c.validate(&sde).is_err());
        assert!(small_cfg(0).validate(&sde).is_ok());
    }

    #[test]
    fn negative_noise_is_refused() {
        let sde = LinearSde {
            drift: -Matrix2::identity(),
            diffusion: Matrix2::new(1.0, 0.0, 0.0, -0.5),
        };
        assert!(matches!(
            simulate_sde(&sde, &small_cfg(0)),
            Err(Error::NonPositiveNoise { min_eigenvalue }) if min_eigenvalue == -0.5
        ));
    }

    #[test]
    fn fixed_seed_is_bitwise_reproducible() {
        let b = desk(50.0);
        let a = simulate(&b, &small_cfg(7)).unwrap();
        let c = simulate(&b, &small_cfg(7)).unwrap();
        assert_eq!(a, c);
        let d = simulate(&b, &small_cfg(8)).unwrap();
        assert_ne!(a.var_x_hat, d.var_x_hat);
    }

    #[test]
    fn dump_holds_first_trajectory() {
        let mut c = small_cfg(3);
        c.dump_trajectory = true;
        let s = simulate(&desk(50.0), &c).unwrap();
        let dump = s.dump.unwrap();
        assert_eq!(dump.len(), c.samples());
        assert!(dump[0][0] > c.t_relax - 1e-12);
    }

    #[test]
    fn self_comparison_has_zero_deviation() {
        let b = desk(50.0);
        let omega: Vec<f64> = (0..64).map(|k| k as f64 * 2.0).collect();
        let series = crate::spectrum::eval_spectrum(&b, &omega).unwrap();
        let psd = PsdEstimate {
            omega: omega.clone(),
            values: series.values.clone(),
            stderr: vec![1.0; omega.len()],
        };
        let r = psd_vs_analytic(&psd, &series, &CompareOptions::default()).unwrap();
        assert_eq!(r.peak_max_rel_dev, 0.0);
        assert_eq!(r.chi_square, 0.0);
        assert!(r.passed);

        let shifted = PsdEstimate { omega: omega.iter().map(|w| w + 0.5).collect(), ..psd };
        assert!(matches!(psd_vs_analytic(&shifted, &series, &CompareOptions::default()), Err(Error::GridMismatch(_))));
    }
}
