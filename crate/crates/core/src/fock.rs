// Copyright 2026 The mirrorcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Number-basis oracle: the full feedback master equation for the mirror
//! mode, integrated on a truncated Fock space.
//!
//! All ladder-operator products are banded, so applying the generator costs
//! O(dim²) rather than the O(dim³) of dense matrix products. The operators
//! are the truncated matrices themselves (a†a and aa† are formed as products
//! of truncated a and a†), which keeps the generator exactly trace
//! preserving on the truncated space.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::{check_stability, EffectiveBath};
use crate::error::{Error, Result};

/// Largest population allowed in the last retained number state.
pub const TAIL_THRESHOLD: f64 = 1e-10;
/// Eigenvalues below −NEGATIVITY_TOLERANCE are reported.
pub const NEGATIVITY_TOLERANCE: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A matrix with a single nonzero diagonal: op[i, i + offset] = diag[i].
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub offset: isize,
    pub diag: Vec<f64>,
}

impl Band {
    pub fn identity(dim: usize) -> Self {
        Band { offset: 0, diag: vec![1.0; dim] }
    }

    /// Truncated annihilation operator, a[n, n+1] = √(n+1).
    pub fn annihilation(dim: usize) -> Self {
        let diag = (0..dim)
            .map(|i| if i + 1 < dim { ((i + 1) as f64).sqrt() } else { 0.0 })
            .collect();
        Band { offset: 1, diag }
    }

    /// Truncated creation operator, a†[n+1, n] = √(n+1).
    pub fn creation(dim: usize) -> Self {
        let diag = (0..dim).map(|i| (i as f64).sqrt()).collect();
        Band { offset: -1, diag }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    #[inline]
    fn col(&self, row: usize) -> Option<usize> {
        let c = row as isize + self.offset;
        (c >= 0 && (c as usize) < self.dim()).then_some(c as usize)
    }

    pub fn product(&self, other: &Band) -> Band {
        let diag = (0..self.dim())
            .map(|i| match self.col(i) {
                Some(l) => self.diag[i] * other.diag[l],
                None => 0.0,
            })
            .collect();
        Band {
            offset: self.offset + other.offset,
            diag,
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            if let Some(j) = self.col(i) {
                m[(i, j)] = Complex64::new(self.diag[i], 0.0);
            }
        }
        m
    }

    /// Tr(op·ρ).
    pub fn expect(&self, rho: &DMatrix<Complex64>) -> Complex64 {
        (0..self.dim())
            .filter_map(|i| self.col(i).map(|l| rho[(l, i)] * self.diag[i]))
            .sum()
    }
}

/// out += coeff · left · ρ · right.
fn accumulate(out: &mut DMatrix<Complex64>, coeff: Complex64, left: &Band, rho: &DMatrix<Complex64>, right: &Band) {
    let n = rho.nrows();
    let kl = left.offset;
    // Rows i with i + kl inside the matrix.
    let i0 = (-kl).max(0) as usize;
    let i1 = (n as isize - kl).min(n as isize).max(0) as usize;
    if i0 >= i1 {
        return;
    }
    let src = rho.as_slice();
    let dst = out.as_mut_slice();
    let lw = &left.diag[i0..i1];
    for j in 0..n {
        // (ρ·right)[·, j] draws from column l = j − offset_right.
        let l = j as isize - right.offset;
        if l < 0 || l as usize >= n {
            continue;
        }
        let l = l as usize;
        let rw = right.diag[l];
        if rw == 0.0 {
            continue;
        }
        let c = coeff * rw;
        let k0 = (i0 as isize + kl) as usize;
        let rho_col = &src[l * n + k0..l * n + k0 + (i1 - i0)];
        let out_col = &mut dst[j * n + i0..j * n + i1];
        for ((o, w), r) in out_col.iter_mut().zip(lw).zip(rho_col) {
            *o += c * (r * w);
        }
    }
}

#[derive(Debug, Clone)]
struct Term {
    coeff: Complex64,
    left: usize,
    right: usize,
}

/// The master-equation generator on a `dim`-level truncation.
#[derive(Debug, Clone)]
pub struct FockGenerator {
    dim: usize,
    /// a, a†, a†a, aa†, a², a†², I
    ops: Vec<Band>,
    terms: Vec<Term>,
    pub bath: EffectiveBath,
    pub lindblad_positive: bool,
}

const A: usize = 0;
const AD: usize = 1;
const NUM: usize = 2;
const ANTI_NUM: usize = 3;
const A2: usize = 4;
const AD2: usize = 5;
const ID: usize = 6;

pub const MIN_DIM: usize = 4;

/// Assembles the generator: the (N+1) and N dissipators, the −M and −M*
/// two-photon blocks, the free rotation −iω_m[a†a, ρ] and the squeeze
/// commutator −κ([a², ρ] − [a†², ρ]).
pub fn build_generator(bath: &EffectiveBath, dim: usize) -> Result<FockGenerator> {
    if dim < MIN_DIM {
        return Err(Error::validation("dim", format!("must be at least {MIN_DIM}")));
    }
    let a = Band::annihilation(dim);
    let ad = Band::creation(dim);
    let num = ad.product(&a);
    let anti_num = a.product(&ad);
    let a2 = a.product(&a);
    let ad2 = ad.product(&ad);
    let ops = vec![a, ad, num, anti_num, a2, ad2, Band::identity(dim)];

    let half_gamma = bath.gamma / 2.0;
    let c_down = Complex64::from(half_gamma * (bath.n + 1.0));
    let c_up = Complex64::from(half_gamma * bath.n);
    let c_m = -half_gamma * bath.m;
    let c_mc = -half_gamma * bath.m.conj();
    let rot = Complex64::new(0.0, bath.omega_m);
    let kappa = Complex64::from(bath.squeeze_coeff);

    let t = |coeff: Complex64, left: usize, right: usize| Term { coeff, left, right };
    let terms = vec![
        t(2.0 * c_down, A, AD),
        t(-c_down - rot, NUM, ID),
        t(-c_down + rot, ID, NUM),
        t(2.0 * c_up, AD, A),
        t(-c_up, ANTI_NUM, ID),
        t(-c_up, ID, ANTI_NUM),
        t(2.0 * c_m, AD, AD),
        t(-c_m + kappa, AD2, ID),
        t(-c_m - kappa, ID, AD2),
        t(2.0 * c_mc, A, A),
        t(-c_mc - kappa, A2, ID),
        t(-c_mc + kappa, ID, A2),
    ];
    Ok(FockGenerator {
        dim,
        ops,
        terms,
        bath: *bath,
        lindblad_positive: check_stability(bath).lindblad_positive,
    })
}

impl FockGenerator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn annihilation(&self) -> &Band {
        &self.ops[A]
    }

    pub fn apply(&self, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut out = DMatrix::from_element(self.dim, self.dim, ZERO);
        for term in &self.terms {
            accumulate(&mut out, term.coeff, &self.ops[term.left], rho, &self.ops[term.right]);
        }
        out
    }

    pub fn moments(&self, rho: &DMatrix<Complex64>) -> FockMoments {
        let a = self.ops[A].expect(rho);
        let a2 = self.ops[A2].expect(rho);
        let n = self.ops[NUM].expect(rho).re;
        // ⟨X²⟩ = (2Re⟨a²⟩ + 2⟨a†a⟩ + 1)/4, ⟨P²⟩ = (−2Re⟨a²⟩ + 2⟨a†a⟩ + 1)/4
        let x = a.re;
        let p = a.im;
        FockMoments {
            a,
            a2,
            n,
            var_x: (2.0 * a2.re + 2.0 * n + 1.0) / 4.0 - x * x,
            var_p: (-2.0 * a2.re + 2.0 * n + 1.0) / 4.0 - p * p,
            cov_xp_sym: a2.im / 2.0 - x * p,
        }
    }

    /// d⟨a⟩/dt, d⟨a²⟩/dt, d⟨a†a⟩/dt at state ρ, given L(ρ).
    pub fn moment_rates(&self, rate: &DMatrix<Complex64>) -> (Complex64, Complex64, f64) {
        (
            self.ops[A].expect(rate),
            self.ops[A2].expect(rate),
            self.ops[NUM].expect(rate).re,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockMoments {
    /// ⟨a⟩
    pub a: Complex64,
    /// ⟨a²⟩
    pub a2: Complex64,
    /// ⟨a†a⟩
    pub n: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub cov_xp_sym: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockConfig {
    pub dim: usize,
    /// Initial step (s); the step is then adapted by the embedded error estimate.
    pub dt: f64,
    pub t_final: f64,
    /// Steady state is declared once |d⟨a⟩/dt|, |d⟨a²⟩/dt| and |d⟨a†a⟩/dt|,
    /// averaged over one relaxation time 1/γ, are all below this.
    pub tol: f64,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
}

fn default_rtol() -> f64 {
    1e-8
}

fn default_atol() -> f64 {
    1e-12
}

impl FockConfig {
    pub fn new(dim: usize) -> Self {
        FockConfig {
            dim,
            dt: 1e-4,
            t_final: 200.0,
            tol: 1e-10,
            rtol: default_rtol(),
            atol: default_atol(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < MIN_DIM {
            return Err(Error::validation("dim", format!("must be at least {MIN_DIM}")));
        }
        for (name, v) in [("dt", self.dt), ("t_final", self.t_final), ("tol", self.tol), ("rtol", self.rtol), ("atol", self.atol)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::validation(name, "must be finite and > 0"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockSolution {
    #[serde(skip)]
    pub rho: DMatrix<Complex64>,
    pub dim: usize,
    pub moments: FockMoments,
    pub trace_error: f64,
    /// Largest |Tr ρ − 1| over all accepted steps.
    pub max_trace_error: f64,
    /// Largest max|ρ − ρ†| over all accepted steps.
    pub max_hermiticity_error: f64,
    pub min_eigenvalue: f64,
    pub tail_population: f64,
    pub lindblad_positive: bool,
    /// Negative eigenvalues beyond tolerance from a generator that is not
    /// completely positive; expected, not a failure.
    pub negativity_warning: bool,
    pub t_steady: f64,
    pub steps: usize,
}

/// Thermal state with occupation ratio e^{−ħω_m/k_BT} = e^{−1/n̄}, renormalized
/// on the truncated space.
pub fn thermal_state(dim: usize, n_bar: f64) -> DMatrix<Complex64> {
    let q = if n_bar > 0.0 { (-1.0 / n_bar).exp() } else { 0.0 };
    let weights: Vec<f64> = (0..dim).map(|k| q.powi(k as i32)).collect();
    let total: f64 = weights.iter().sum();
    DMatrix::from_fn(dim, dim, |i, j| if i == j { Complex64::from(weights[i] / total) } else { ZERO })
}

/// Number state |k⟩⟨k|.
pub fn fock_state(dim: usize, k: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(dim, dim, |i, j| if i == k && j == k { Complex64::from(1.0) } else { ZERO })
}

pub fn trace(rho: &DMatrix<Complex64>) -> Complex64 {
    rho.diagonal().iter().sum()
}

pub fn hermiticity_error(rho: &DMatrix<Complex64>) -> f64 {
    let n = rho.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((rho[(i, j)] - rho[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn min_eigenvalue(rho: &DMatrix<Complex64>) -> f64 {
    let herm = (rho + rho.adjoint()) * Complex64::from(0.5);
    herm.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const AA: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn lincomb(y: &DMatrix<Complex64>, h: f64, coeffs: &[f64], ks: &[DMatrix<Complex64>]) -> DMatrix<Complex64> {
    let mut out = y.clone();
    for (c, k) in coeffs.iter().zip(ks) {
        if *c != 0.0 {
            out.zip_apply(k, |o, kv| *o += kv * (h * c));
        }
    }
    out
}

/// Adaptive Dormand–Prince integrator over a generator. `on_step` sees each
/// accepted (t, ρ, L(ρ)) and returns `true` to stop.
struct Integrator<'a> {
    generator: &'a FockGenerator,
    rtol: f64,
    atol: f64,
}

impl Integrator<'_> {
    fn run(
        &self,
        rho0: &DMatrix<Complex64>,
        dt0: f64,
        t_end: f64,
        mut on_step: impl FnMut(f64, &DMatrix<Complex64>, &DMatrix<Complex64>) -> bool,
    ) -> Result<(f64, DMatrix<Complex64>, usize)> {
        let mut t = 0.0;
        let mut y = rho0.clone();
        let mut k1 = self.generator.apply(&y);
        let mut h = dt0.min(t_end);
        let mut steps = 0usize;
        if on_step(t, &y, &k1) {
            return Ok((t, y, steps));
        }
        while t < t_end {
            h = h.min(t_end - t);
            let mut ks: Vec<DMatrix<Complex64>> = Vec::with_capacity(7);
            ks.push(k1.clone());
            for s in 1..7 {
                let ys = lincomb(&y, h, &AA[s][..s], &ks);
                ks.push(self.generator.apply(&ys));
            }
            let y_new = lincomb(&y, h, &AA[6][..6], &ks);
            let err_est = lincomb(&DMatrix::from_element(y.nrows(), y.ncols(), ZERO), h, &E, &ks);
            let mut err = 0.0f64;
            for ((e, a), b) in err_est.iter().zip(y.iter()).zip(y_new.iter()) {
                let scale = self.atol + self.rtol * a.norm().max(b.norm());
                err = err.max(e.norm() / scale);
            }
            let _ = C;
            if err <= 1.0 {
                t += h;
                y = y_new;
                k1 = ks.pop().unwrap();
                steps += 1;
                if on_step(t, &y, &k1) {
                    return Ok((t, y, steps));
                }
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
            if h < 1e-14 * t.max(1.0) {
                return Err(Error::StepUnderflow { t });
            }
        }
        Ok((t, y, steps))
    }
}

/// Integrates ρ from `rho0` for a fixed time `t_end`.
pub fn evolve(generator: &FockGenerator, rho0: &DMatrix<Complex64>, t_end: f64, cfg: &FockConfig) -> Result<DMatrix<Complex64>> {
    let integrator = Integrator {
        generator,
        rtol: cfg.rtol,
        atol: cfg.atol,
    };
    let (_, y, _) = integrator.run(rho0, cfg.dt, t_end, |_, _, _| false)?;
    Ok(y)
}

/// Integrates until all tracked moment rates fall below `cfg.tol`.
pub fn evolve_to_steady(generator: &FockGenerator, cfg: &FockConfig, rho0: &DMatrix<Complex64>) -> Result<FockSolution> {
    cfg.validate()?;
    let dim = generator.dim();
    if rho0.nrows() != dim || rho0.ncols() != dim {
        return Err(Error::validation("rho0", format!("must be {dim}x{dim}")));
    }
    let tail0 = rho0[(dim - 1, dim - 1)].re;
    if tail0 > TAIL_THRESHOLD {
        return Err(Error::TruncationOverflow { tail: tail0 });
    }
    generator.bath.require_stable()?;

    let integrator = Integrator {
        generator,
        rtol: cfg.rtol,
        atol: cfg.atol,
    };
    // Rates are measured as moment differences over one relaxation time:
    // the instantaneous Tr(op·L(ρ)) also sees high-level coherences that
    // chatter at the integrator tolerance and never settle below it.
    let window = 1.0 / generator.bath.gamma;
    let mut checkpoint = (0.0, generator.moments(rho0));
    let mut max_trace_error = 0.0f64;
    let mut max_hermiticity_error = 0.0f64;
    let mut last_rate = f64::INFINITY;
    let mut reached = false;
    let (t, rho, steps) = integrator.run(rho0, cfg.dt, cfg.t_final, |t, y, _| {
        max_trace_error = max_trace_error.max((trace(y) - 1.0).norm());
        max_hermiticity_error = max_hermiticity_error.max(hermiticity_error(y));
        let (t0, m0) = checkpoint;
        if t - t0 < window {
            return false;
        }
        let m = generator.moments(y);
        let dt = t - t0;
        last_rate = ((m.a - m0.a).norm() / dt)
            .max((m.a2 - m0.a2).norm() / dt)
            .max((m.n - m0.n).abs() / dt);
        checkpoint = (t, m);
        reached = last_rate < cfg.tol;
        reached
    })?;
    if !reached {
        return Err(Error::NoSteadyState {
            t_final: cfg.t_final,
            rate: last_rate,
        });
    }

    let tail_population = rho[(dim - 1, dim - 1)].re;
    if tail_population > TAIL_THRESHOLD {
        return Err(Error::TruncationOverflow { tail: tail_population });
    }
    let min_eig = min_eigenvalue(&rho);
    Ok(FockSolution {
        dim,
        moments: generator.moments(&rho),
        trace_error: (trace(&rho) - 1.0).norm(),
        max_trace_error,
        max_hermiticity_error,
        min_eigenvalue: min_eig,
        tail_population,
        lindblad_positive: generator.lindblad_positive,
        negativity_warning: min_eig < -NEGATIVITY_TOLERANCE,
        t_steady: t,
        steps,
        rho,
    })
}
