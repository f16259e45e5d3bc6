// Copyright 2026 The mirrorcool Authors
// SPDX-License-Identifier: Apache-2.0

//! One function per verb. Each returns a typed, serializable report; the
//! rendering to files lives in the parent module.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{BathSource, GridConfig, RunConfig};
use crate::bath::{check_stability, is_cooling_phase, BathParams, EffectiveBath, StabilityReport};
use crate::error::{Error, Result};
use crate::fock::{build_generator, evolve_to_steady, thermal_state, FockConfig, FockSolution, TAIL_THRESHOLD};
use crate::langevin::{psd_vs_analytic, simulate, CompareOptions, Estimate, PsdComparison, SimConfig, TrajectoryEnsembleStats};
use crate::linalg::{lyapunov_2x2, sym_eigenvalues};
use crate::params::{DerivedCoupling, PhysicalConstants, PhysicalSetup};
use crate::spectrum::{default_grid, eval_spectrum, fig1_scale, sum_rule_check, uniform_grid, SumRule};
use crate::steady::{closed_form_moments, high_gain_moments, lyapunov_moments, optimize_gain, GainOptimum, MomentMethod, SteadyMoments};

/// Gains plotted in the comparison figure.
pub const FIG1_GAINS: [f64; 5] = [0.0, 1.0, 10.0, 100.0, 1000.0];
const FIG1_GRID_POINTS: usize = 4001;
const FIG1_GRID_SPAN: f64 = 8.0;

// ---------------------------------------------------------------- derive

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilitySummary {
    pub stable: bool,
    pub margin_damping: f64,
    pub margin_spring: f64,
    /// Unknown when the bath coefficients are undefined (γ ≤ 0).
    pub lindblad_positive: Option<bool>,
    pub positivity_gap: Option<f64>,
}

impl From<StabilityReport> for StabilitySummary {
    fn from(r: StabilityReport) -> Self {
        StabilitySummary {
            stable: r.stable,
            margin_damping: r.margin_damping,
            margin_spring: r.margin_spring,
            lindblad_positive: Some(r.lindblad_positive),
            positivity_gap: Some(r.positivity_gap),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeriveReport {
    pub constants: PhysicalConstants,
    pub setup: Option<PhysicalSetup>,
    pub coupling: Option<DerivedCoupling>,
    pub params: Option<BathParams>,
    pub bath: Option<EffectiveBath>,
    pub stability: StabilitySummary,
    /// Why the bath could not be built, when it could not.
    pub bath_error: Option<String>,
}

/// Coupling, bath and stability of the configured system. An unstable
/// configuration is reported, not rejected.
pub fn cmd_derive(cfg: &RunConfig) -> Result<DeriveReport> {
    let r = cfg.resolve()?;
    let (bath, stability, bath_error) = match (r.bath(), r.params()) {
        (Ok(b), _) => (Some(b), check_stability(&b).into(), None),
        (Err(e @ Error::UnstableBath { .. }), Some(p)) => {
            let m = p.margins();
            let summary = StabilitySummary {
                stable: m.stable,
                margin_damping: m.margin_damping,
                margin_spring: m.margin_spring,
                lindblad_positive: None,
                positivity_gap: None,
            };
            (None, summary, Some(e.to_string()))
        }
        (Err(e), _) => return Err(e),
    };
    Ok(DeriveReport {
        constants: r.constants,
        setup: cfg.setup,
        coupling: r.coupling,
        params: r.params(),
        bath,
        stability,
        bath_error,
    })
}

// -------------------------------------------------------------- variance

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub bath: EffectiveBath,
    pub stability: StabilityReport,
    /// Closed form and high-gain rows appear only for φ = −π/2; high gain
    /// only with feedback on.
    pub rows: Vec<SteadyMoments>,
}

pub fn cmd_variance(cfg: &RunConfig) -> Result<VarianceReport> {
    let bath = cfg.resolve()?.bath()?;
    bath.require_stable()?;
    let mut rows = Vec::new();
    let cooling = is_cooling_phase(bath.phi);
    if cooling && bath.inputs.is_some() {
        rows.push(closed_form_moments(&bath)?);
    }
    rows.push(lyapunov_moments(&bath)?);
    if cooling && bath.inputs.is_some() && bath.g > 0.0 {
        rows.push(high_gain_moments(&bath)?);
    }
    Ok(VarianceReport {
        bath,
        stability: check_stability(&bath),
        rows,
    })
}

// -------------------------------------------------------------- spectrum

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpectrumOptions {
    pub fig1: bool,
    pub g_list: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumColumn {
    pub label: String,
    pub g: f64,
    pub values: Vec<f64>,
    pub sum_rule: SumRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub fig1: bool,
    pub omega: Vec<f64>,
    pub columns: Vec<SpectrumColumn>,
}

/// Column label for gain `g`: `S_g10`, `S_g2.5`.
pub fn gain_label(g: f64) -> String {
    format!("S_g{g}")
}

fn grid_from(cfg: &Option<GridConfig>) -> Result<Option<Vec<f64>>> {
    match cfg {
        None => Ok(None),
        Some(g) => {
            if !(g.lo.is_finite() && g.hi.is_finite() && g.lo < g.hi) {
                return Err(Error::validation("grid", format!("need finite lo < hi, got [{}, {}]", g.lo, g.hi)));
            }
            if g.points < 2 {
                return Err(Error::validation("grid.points", "must be at least 2"));
            }
            Ok(Some(uniform_grid(g.lo, g.hi, g.points)))
        }
    }
}

pub fn cmd_spectrum(cfg: &RunConfig, opts: &SpectrumOptions) -> Result<SpectrumReport> {
    let r = cfg.resolve()?;
    let base = r.bath()?;
    let gains = match (&opts.g_list, opts.fig1) {
        (Some(list), _) => Some(list.clone()),
        (None, true) => Some(FIG1_GAINS.to_vec()),
        (None, false) => None,
    };
    let baths: Vec<(String, EffectiveBath)> = match &gains {
        None => vec![("S".to_string(), base)],
        Some(list) => {
            let p = r.require_params("a gain list")?;
            if list.is_empty() {
                return Err(Error::validation("g-list", "must not be empty"));
            }
            list.iter()
                .map(|&g| Ok((gain_label(g), EffectiveBath::new(&p.with_gain(g))?)))
                .collect::<Result<_>>()?
        }
    };
    let omega = match grid_from(&cfg.grid)? {
        Some(grid) => grid,
        None if opts.fig1 => uniform_grid(0.0, FIG1_GRID_SPAN * base.omega_m, FIG1_GRID_POINTS),
        None => default_grid(&baths[0].1),
    };
    let scale_ref = if opts.fig1 {
        let p = r.require_params("--fig1")?;
        Some(closed_form_moments(&EffectiveBath::new(&p.with_gain(0.0))?)?.var_x)
    } else {
        None
    };
    let columns = baths
        .par_iter()
        .map(|(label, bath)| {
            let raw = eval_spectrum(bath, &omega)?;
            let series = match scale_ref {
                Some(v0) => fig1_scale(&raw, v0)?,
                None => raw,
            };
            Ok(SpectrumColumn {
                label: label.clone(),
                g: bath.g,
                values: series.values,
                sum_rule: sum_rule_check(bath)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumReport {
        fig1: opts.fig1,
        omega,
        columns,
    })
}

// -------------------------------------------------------------- simulate

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub sim: SimConfig,
    pub stats: TrajectoryEnsembleStats,
}

fn sim_config(cfg: &RunConfig, seed: Option<u64>) -> Result<SimConfig> {
    let mut sim = cfg.sim.ok_or_else(|| Error::validation("sim", "this command needs a `sim` block"))?;
    if let Some(s) = seed {
        sim.seed = s;
    }
    Ok(sim)
}

pub fn cmd_simulate(cfg: &RunConfig, seed: Option<u64>) -> Result<SimulateReport> {
    let sim = sim_config(cfg, seed)?;
    let bath = cfg.resolve()?.bath()?;
    let stats = simulate(&bath, &sim)?;
    Ok(SimulateReport { sim, stats })
}

// --------------------------------------------------------------- compare

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub analytic: f64,
    pub estimate: Estimate,
    pub z: f64,
}

impl MomentCheck {
    fn new(analytic: f64, estimate: Estimate) -> Self {
        MomentCheck {
            analytic,
            estimate,
            z: estimate.z_score(analytic),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub sim: SimConfig,
    pub var_x: MomentCheck,
    pub var_p: MomentCheck,
    /// (1/2π)∫Ŝ dω of the Welch estimate.
    pub psd_integral: f64,
    /// Analytic spectrum on the Welch bins, when a closed form exists (φ = −π/2).
    pub analytic_psd: Option<Vec<f64>>,
    pub psd: Option<PsdComparison>,
    pub stats: TrajectoryEnsembleStats,
    /// Moments within 3 standard errors and, when compared, the peak within tolerance.
    pub passed: bool,
}

pub const MOMENT_Z_LIMIT: f64 = 3.0;

pub fn cmd_compare(cfg: &RunConfig, seed: Option<u64>) -> Result<CompareReport> {
    let sim = sim_config(cfg, seed)?;
    let bath = cfg.resolve()?.bath()?;
    let analytic = lyapunov_moments(&bath)?;
    let stats = simulate(&bath, &sim)?;
    let var_x = MomentCheck::new(analytic.var_x, stats.var_x_hat);
    let var_p = MomentCheck::new(analytic.var_p.unwrap_or(f64::NAN), stats.var_p_hat);
    let (analytic_psd, psd) = if is_cooling_phase(bath.phi) {
        let series = eval_spectrum(&bath, &stats.psd_hat.omega)?;
        let cmp = psd_vs_analytic(&stats.psd_hat, &series, &CompareOptions::default())?;
        (Some(series.values), Some(cmp))
    } else {
        (None, None)
    };
    let passed = var_x.z < MOMENT_Z_LIMIT && var_p.z < MOMENT_Z_LIMIT && psd.as_ref().is_none_or(|c| c.passed);
    Ok(CompareReport {
        sim,
        var_x,
        var_p,
        psd_integral: stats.psd_hat.integral(),
        analytic_psd,
        psd,
        stats,
        passed,
    })
}

// ------------------------------------------------------------------ fock

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockReport {
    pub config: FockConfig,
    /// Smallest truncation whose geometric tail stays below the guard.
    pub required_dim: usize,
    pub solution: FockSolution,
    pub analytic: SteadyMoments,
    pub rel_err_var_x: f64,
    pub rel_err_var_p: f64,
}

/// Smallest d with n^(d−1)/(n+1)^d ≤ `threshold`, the last-level weight of a
/// thermal state of mean `n`.
pub fn geometric_tail_dim(n: f64, threshold: f64) -> usize {
    if n <= 0.0 {
        return 1;
    }
    let d_minus_1 = (threshold.ln() + (n + 1.0).ln()) / (n / (n + 1.0)).ln();
    d_minus_1.max(0.0).ceil() as usize + 1
}

const AUTO_DIM_MARGIN: usize = 10;

pub fn cmd_fock(cfg: &RunConfig) -> Result<FockReport> {
    let r = cfg.resolve()?;
    let bath = r.bath()?;
    bath.require_stable()?;
    let block = cfg.fock.unwrap_or_default();
    let n_initial = match r.source {
        BathSource::Params(p) => p.n_bar,
        BathSource::Coefficients(c) => c.n,
    };
    if !(n_initial <= block.max_n_bar) {
        return Err(Error::Refused(format!(
            "initial occupation {n_initial:e} exceeds the fock ceiling max_n_bar = {}; the number basis cannot hold this state",
            block.max_n_bar
        )));
    }
    let analytic = if is_cooling_phase(bath.phi) && bath.inputs.is_some() {
        closed_form_moments(&bath)?
    } else {
        lyapunov_moments(&bath)?
    };
    let sigma = lyapunov_2x2(&bath.drift(), &bath.diffusion())?;
    // A Gaussian state's populations decay no faster than a thermal state
    // with the larger principal variance.
    let n_steady = (2.0 * sym_eigenvalues(&sigma).1 - 0.5).max(0.0);
    let required_dim = geometric_tail_dim(n_initial.max(n_steady), TAIL_THRESHOLD);
    let dim = block.dim.unwrap_or(required_dim + AUTO_DIM_MARGIN);
    if required_dim > block.max_dim || dim > block.max_dim {
        return Err(Error::Refused(format!(
            "truncation of {} levels (at least {required_dim} needed) exceeds the fock ceiling max_dim = {}",
            dim.max(required_dim),
            block.max_dim
        )));
    }
    let config = block.to_config(dim);
    let generator = build_generator(&bath, dim)?;
    let solution = evolve_to_steady(&generator, &config, &thermal_state(dim, n_initial))?;
    let var_p = analytic.var_p.unwrap_or(f64::NAN);
    Ok(FockReport {
        config,
        required_dim,
        rel_err_var_x: (solution.moments.var_x - analytic.var_x).abs() / analytic.var_x,
        rel_err_var_p: (solution.moments.var_p - var_p).abs() / var_p,
        solution,
        analytic,
    })
}

// ----------------------------------------------------------------- sweep

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub g: f64,
    pub phi: f64,
    #[serde(rename = "Gamma")]
    pub measurement_rate: f64,
    pub eta: f64,
    #[serde(rename = "T")]
    pub temperature: f64,
    pub n_bar: f64,
    pub stable: bool,
    pub lindblad_positive: Option<bool>,
    pub positivity_gap: Option<f64>,
    pub var_x: Option<f64>,
    pub var_p: Option<f64>,
    pub t_eff: Option<f64>,
    pub method: Option<MomentMethod>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMinimum {
    pub g: f64,
    pub var_x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// For pure gain sweeps at φ = −π/2: the best grid point and the
    /// continuous optimum over the same range.
    pub grid_minimum: Option<GridMinimum>,
    pub optimum: Option<GainOptimum>,
}

fn axis(values: &Option<Vec<f64>>, name: &str, current: f64) -> Result<Vec<f64>> {
    match values {
        None => Ok(vec![current]),
        Some(v) if v.is_empty() => Err(Error::validation(format!("sweep.{name}"), "must not be empty")),
        Some(v) => Ok(v.clone()),
    }
}

fn sweep_point(index: usize, p: BathParams) -> Result<SweepRow> {
    p.validate()?;
    let margins = p.margins();
    let mut row = SweepRow {
        index,
        g: p.g,
        phi: p.phi,
        measurement_rate: p.measurement_rate,
        eta: p.eta,
        temperature: p.temperature,
        n_bar: p.n_bar,
        stable: margins.stable,
        lindblad_positive: None,
        positivity_gap: None,
        var_x: None,
        var_p: None,
        t_eff: None,
        method: None,
    };
    let bath = match EffectiveBath::new(&p) {
        Ok(b) => b,
        Err(Error::UnstableBath { .. }) => return Ok(row),
        Err(e) => return Err(e),
    };
    let report = check_stability(&bath);
    row.lindblad_positive = Some(report.lindblad_positive);
    row.positivity_gap = Some(report.positivity_gap);
    if report.stable {
        let m = if is_cooling_phase(p.phi) {
            closed_form_moments(&bath)?
        } else {
            lyapunov_moments(&bath)?
        };
        row.var_x = Some(m.var_x);
        row.var_p = m.var_p;
        row.t_eff = m.t_eff;
        row.method = Some(m.method);
    }
    Ok(row)
}

/// Cartesian sweep, outermost axis first: g, φ, Γ, η, T. Changing T also
/// changes n̄ through the configured constants.
pub fn cmd_sweep(cfg: &RunConfig, g_list: Option<&[f64]>) -> Result<SweepReport> {
    let r = cfg.resolve()?;
    let base = r.require_params("sweep")?;
    let sweep = cfg.sweep.clone().unwrap_or_default();
    let gs = match g_list {
        Some(list) => axis(&Some(list.to_vec()), "g", base.g)?,
        None => axis(&sweep.g, "g", base.g)?,
    };
    let phis = axis(&sweep.phi, "phi", base.phi)?;
    let rates = axis(&sweep.measurement_rate, "Gamma", base.measurement_rate)?;
    let etas = axis(&sweep.eta, "eta", base.eta)?;
    let temps = axis(&sweep.temperature, "T", base.temperature)?;
    let swept_t = sweep.temperature.is_some();

    let mut points = Vec::with_capacity(gs.len() * phis.len() * rates.len() * etas.len() * temps.len());
    for &g in &gs {
        for &phi in &phis {
            for &rate in &rates {
                for &eta in &etas {
                    for &t in &temps {
                        let n_bar = if swept_t { r.constants.thermal_occupation(t, base.omega_m) } else { base.n_bar };
                        points.push(BathParams {
                            g,
                            phi,
                            measurement_rate: rate,
                            eta,
                            temperature: t,
                            n_bar,
                            ..base
                        });
                    }
                }
            }
        }
    }
    let rows = points
        .into_par_iter()
        .enumerate()
        .map(|(i, p)| sweep_point(i, p))
        .collect::<Result<Vec<_>>>()?;

    let gain_only = gs.len() > 1 && phis.len() == 1 && rates.len() == 1 && etas.len() == 1 && temps.len() == 1;
    let (grid_minimum, optimum) = if gain_only && is_cooling_phase(phis[0]) {
        let best = rows
            .iter()
            .filter_map(|r| r.var_x.map(|v| GridMinimum { g: r.g, var_x: v }))
            .min_by(|a, b| a.var_x.total_cmp(&b.var_x));
        let lo = gs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = gs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let template = EffectiveBath::new(&BathParams { phi: phis[0], g: lo, ..base })?;
        (best, Some(optimize_gain(&template, lo, hi)?))
    } else {
        (None, None)
    };
    Ok(SweepReport {
        rows,
        grid_minimum,
        optimum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::{BathOverride, SweepConfig};
    use std::f64::consts::FRAC_PI_2;

    fn desk_cfg(g: f64, phi: f64) -> RunConfig {
        RunConfig {
            bath: Some(BathOverride::Feedback(BathParams::desk(10.0, 1.0, 40.0, 1.0, 3.0, g).with_phi(phi))),
            ..RunConfig::default()
        }
    }

    #[test]
    fn derive_reports_instability_without_failing() {
        let mut cfg = RunConfig::room_temperature();
        cfg.setup = Some(PhysicalSetup::room_temperature().with_phi(FRAC_PI_2).with_gain(2.0));
        let rep = cmd_derive(&cfg).unwrap();
        assert!(!rep.stability.stable);
        assert!(rep.bath.is_none() && rep.bath_error.is_some());
    }

    #[test]
    fn variance_rows_follow_the_phase() {
        let rep = cmd_variance(&desk_cfg(8.0, -FRAC_PI_2)).unwrap();
        let methods: Vec<_> = rep.rows.iter().map(|r| r.method).collect();
        assert_eq!(methods, [MomentMethod::ClosedForm, MomentMethod::Lyapunov, MomentMethod::HighGain]);
        let rep = cmd_variance(&desk_cfg(0.5, 0.3)).unwrap();
        assert_eq!(rep.rows.len(), 1);
        let err = cmd_variance(&desk_cfg(2.0, FRAC_PI_2)).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn tail_dim_matches_direct_count() {
        for n in [0.5, 3.0, 20.0] {
            let d = geometric_tail_dim(n, 1e-10);
            let w = |k: usize| ((k as f64 - 1.0) * n.ln() - k as f64 * (n + 1.0).ln()).exp();
            assert!(w(d) <= 1e-10 * (1.0 + 1e-12));
            assert!(w(d - 1) > 1e-10);
        }
    }

    #[test]
    fn fock_refuses_hot_states() {
        let cfg = RunConfig::room_temperature();
        let mut p = BathParams::desk(10.0, 1.0, 40.0, 1.0, 3.0, 8.0);
        p.n_bar = 1e3;
        let hot = RunConfig {
            bath: Some(BathOverride::Feedback(p)),
            ..RunConfig::default()
        };
        assert!(matches!(cmd_fock(&cfg), Err(Error::Refused(_))));
        assert!(matches!(cmd_fock(&hot), Err(Error::Refused(_))));
    }

    #[test]
    fn sweep_is_ordered_and_flags_instability() {
        let mut cfg = desk_cfg(0.0, -FRAC_PI_2);
        cfg.sweep = Some(SweepConfig {
            phi: Some(vec![-FRAC_PI_2, FRAC_PI_2]),
            ..SweepConfig::default()
        });
        let rep = cmd_sweep(&cfg, Some(&[0.5, 2.0])).unwrap();
        let idx: Vec<_> = rep.rows.iter().map(|r| r.index).collect();
        assert_eq!(idx, [0, 1, 2, 3]);
        assert!(rep.rows[0].stable && rep.rows[1].stable);
        assert!(rep.rows[2].stable && !rep.rows[3].stable);
        assert!(rep.rows[3].var_x.is_none());
        assert!(rep.optimum.is_none());
    }
}
