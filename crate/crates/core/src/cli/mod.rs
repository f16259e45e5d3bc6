// Copyright 2026 The mirrorcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Command-line front end: argument parsing, dispatch and file output.
//!
//! Every verb produces a JSON document and a CSV table; `--format` picks
//! which one goes to `--out` (or stdout). When writing to a file, companion
//! files named `<stem>.<suffix>` carry data the primary format omits.

pub mod commands;
pub mod config;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
pub use commands::*;
pub use config::{BathCoefficients, BathOverride, Format, RunConfig};

#[derive(Debug, Clone, Parser)]
#[command(name = "mirrorcool", version, about = "Feedback cooling of a mirror: analytic predictions and numerical oracles")]
pub struct Args {
    #[command(subcommand)]
    pub verb: Verb,
    /// JSON run configuration; the built-in room-temperature setup when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Overrides `sim.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Five-gain normalized spectrum dataset.
    #[arg(long, global = true)]
    pub fig1: bool,
    /// Comma-separated gains for `spectrum` and `sweep`.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub g_list: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Verb {
    /// Coupling constants, effective bath and stability report.
    Derive,
    /// Steady-state variances: closed form, Lyapunov and high-gain.
    Variance,
    /// Position noise spectrum on a frequency grid.
    Spectrum,
    /// Seeded Langevin Monte Carlo: moment estimates and Welch spectrum.
    Simulate,
    /// Master-equation steady state in a truncated number basis.
    Fock,
    /// Cartesian parameter sweep over g, phi, Gamma, eta and T.
    Sweep,
    /// Monte Carlo run checked against the analytic moments and spectrum.
    Compare,
}

/// A file written next to the primary output.
#[derive(Debug, Clone, PartialEq)]
pub struct Sidecar {
    pub suffix: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Shortest round-trip decimal; exponent form outside [1e-4, 1e15).
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn fmt_opt_bool(v: Option<bool>) -> String {
    v.map(|b| b.to_string()).unwrap_or_default()
}

fn flatten(prefix: &str, v: &Value, table: &mut Table) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                flatten(&key(k), child, table);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), child, table);
            }
        }
        Value::Number(n) => {
            let s = n.as_f64().map(fmt_f64).unwrap_or_else(|| n.to_string());
            table.rows.push(vec![prefix.to_string(), s]);
        }
        Value::Null => table.rows.push(vec![prefix.to_string(), String::new()]),
        Value::Bool(b) => table.rows.push(vec![prefix.to_string(), b.to_string()]),
        Value::String(s) => table.rows.push(vec![prefix.to_string(), s.replace(',', ";")]),
    }
}

/// A report as `key,value` rows with dotted keys.
pub fn key_value_table(v: &Value) -> Table {
    let mut t = Table::new(&["key", "value"]);
    flatten("", v, &mut t);
    t
}

/// A verb's result in both output formats.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub json: Value,
    pub table: Table,
    /// Written whatever the format, when output goes to a file.
    pub sidecars: Vec<Sidecar>,
    /// Suffixes under which the non-primary format is also written: (when
    /// JSON is primary, when CSV is primary).
    pub companion: Option<(String, String)>,
    pub default_format: Format,
}

fn to_json<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

pub fn render_derive(rep: &DeriveReport) -> Result<Rendered> {
    let json = to_json(rep)?;
    Ok(Rendered {
        table: key_value_table(&json),
        json,
        sidecars: vec![],
        companion: None,
        default_format: Format::Json,
    })
}

pub fn render_variance(rep: &VarianceReport) -> Result<Rendered> {
    let mut table = Table::new(&["method", "var_x", "var_p", "cov_xp_sym", "t_eff", "heisenberg_ok"]);
    for r in &rep.rows {
        let method = serde_json::to_value(r.method)?.as_str().unwrap_or_default().to_string();
        table.rows.push(vec![
            method,
            fmt_f64(r.var_x),
            fmt_opt(r.var_p),
            fmt_opt(r.cov_xp_sym),
            fmt_opt(r.t_eff),
            fmt_opt_bool(r.heisenberg_ok),
        ]);
    }
    Ok(Rendered {
        json: to_json(rep)?,
        table,
        sidecars: vec![],
        companion: None,
        default_format: Format::Json,
    })
}

pub fn render_spectrum(rep: &SpectrumReport) -> Result<Rendered> {
    let mut header = vec!["omega".to_string()];
    header.extend(rep.columns.iter().map(|c| c.label.clone()));
    let rows = rep
        .omega
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let mut row = vec![fmt_f64(*w)];
            row.extend(rep.columns.iter().map(|c| fmt_f64(c.values[i])));
            row
        })
        .collect();
    let mut sums = Table::new(&["label", "g", "integral", "var_x", "rel_err", "quad_error"]);
    for c in &rep.columns {
        let s = &c.sum_rule;
        sums.rows.push(vec![
            c.label.clone(),
            fmt_f64(c.g),
            fmt_f64(s.integral),
            fmt_f64(s.var_x),
            fmt_f64(s.rel_err),
            fmt_f64(s.quad_error),
        ]);
    }
    Ok(Rendered {
        json: to_json(rep)?,
        table: Table { header, rows },
        sidecars: vec![Sidecar {
            suffix: "sum_rule.csv".into(),
            bytes: sums.to_csv().into_bytes(),
        }],
        companion: None,
        default_format: Format::Csv,
    })
}

fn psd_table(omega: &[f64], values: &[f64], stderr: &[f64]) -> Table {
    let mut t = Table::new(&["omega", "S", "stderr"]);
    for ((w, v), e) in omega.iter().zip(values).zip(stderr) {
        t.rows.push(vec![fmt_f64(*w), fmt_f64(*v), fmt_f64(*e)]);
    }
    t
}

fn trajectory_sidecar(dump: &Option<Vec<[f64; 3]>>) -> Vec<Sidecar> {
    match dump {
        None => vec![],
        Some(path) => {
            let mut t = Table::new(&["t", "X", "P"]);
            for [time, x, p] in path {
                t.rows.push(vec![fmt_f64(*time), fmt_f64(*x), fmt_f64(*p)]);
            }
            vec![Sidecar {
                suffix: "traj.csv".into(),
                bytes: t.to_csv().into_bytes(),
            }]
        }
    }
}

pub fn render_simulate(rep: &SimulateReport) -> Result<Rendered> {
    let psd = &rep.stats.psd_hat;
    Ok(Rendered {
        json: to_json(rep)?,
        table: psd_table(&psd.omega, &psd.values, &psd.stderr),
        sidecars: trajectory_sidecar(&rep.stats.dump),
        companion: Some(("psd.csv".into(), "stats.json".into())),
        default_format: Format::Json,
    })
}

pub fn render_compare(rep: &CompareReport) -> Result<Rendered> {
    let psd = &rep.stats.psd_hat;
    let mut table = Table::new(&["omega", "S_hat", "stderr", "S", "z"]);
    for i in 0..psd.omega.len() {
        let analytic = rep.analytic_psd.as_ref().map(|a| a[i]);
        let z = rep.psd.as_ref().map(|c| c.z_scores[i]);
        table.rows.push(vec![
            fmt_f64(psd.omega[i]),
            fmt_f64(psd.values[i]),
            fmt_f64(psd.stderr[i]),
            fmt_opt(analytic),
            fmt_opt(z),
        ]);
    }
    Ok(Rendered {
        json: to_json(rep)?,
        table,
        sidecars: vec![],
        companion: Some(("bins.csv".into(), "report.json".into())),
        default_format: Format::Json,
    })
}

/// Row-major (re, im) little-endian f64 pairs.
pub fn density_matrix_bytes(rho: &nalgebra::DMatrix<num_complex::Complex64>) -> Vec<u8> {
    let mut bytes = Vec::with_capacity(rho.len() * 16);
    for i in 0..rho.nrows() {
        for j in 0..rho.ncols() {
            bytes.extend_from_slice(&rho[(i, j)].re.to_le_bytes());
            bytes.extend_from_slice(&rho[(i, j)].im.to_le_bytes());
        }
    }
    bytes
}

pub fn render_fock(rep: &FockReport, dump_rho: bool) -> Result<Rendered> {
    let json = to_json(rep)?;
    let sidecars = if dump_rho {
        vec![Sidecar {
            suffix: "rho.bin".into(),
            bytes: density_matrix_bytes(&rep.solution.rho),
        }]
    } else {
        vec![]
    };
    Ok(Rendered {
        table: key_value_table(&json),
        json,
        sidecars,
        companion: None,
        default_format: Format::Json,
    })
}

pub fn render_sweep(rep: &SweepReport) -> Result<Rendered> {
    let mut table = Table::new(&[
        "index",
        "g",
        "phi",
        "Gamma",
        "eta",
        "T",
        "n_bar",
        "stable",
        "lindblad_positive",
        "positivity_gap",
        "var_x",
        "var_p",
        "t_eff",
    ]);
    for r in &rep.rows {
        table.rows.push(vec![
            r.index.to_string(),
            fmt_f64(r.g),
            fmt_f64(r.phi),
            fmt_f64(r.measurement_rate),
            fmt_f64(r.eta),
            fmt_f64(r.temperature),
            fmt_f64(r.n_bar),
            r.stable.to_string(),
            fmt_opt_bool(r.lindblad_positive),
            fmt_opt(r.positivity_gap),
            fmt_opt(r.var_x),
            fmt_opt(r.var_p),
            fmt_opt(r.t_eff),
        ]);
    }
    Ok(Rendered {
        json: to_json(rep)?,
        table,
        sidecars: vec![],
        companion: None,
        default_format: Format::Csv,
    })
}

fn check_flags(args: &Args) -> Result<()> {
    if args.fig1 && args.verb != Verb::Spectrum {
        return Err(Error::validation("fig1", "only applies to `spectrum`"));
    }
    if args.g_list.is_some() && !matches!(args.verb, Verb::Spectrum | Verb::Sweep) {
        return Err(Error::validation("g-list", "only applies to `spectrum` and `sweep`"));
    }
    if args.seed.is_some() && !matches!(args.verb, Verb::Simulate | Verb::Compare) {
        return Err(Error::validation("seed", "only applies to `simulate` and `compare`"));
    }
    Ok(())
}

/// Runs one verb against a parsed configuration.
pub fn execute(args: &Args, cfg: &RunConfig) -> Result<Rendered> {
    check_flags(args)?;
    match args.verb {
        Verb::Derive => render_derive(&cmd_derive(cfg)?),
        Verb::Variance => render_variance(&cmd_variance(cfg)?),
        Verb::Spectrum => render_spectrum(&cmd_spectrum(
            cfg,
            &SpectrumOptions {
                fig1: args.fig1,
                g_list: args.g_list.clone(),
            },
        )?),
        Verb::Simulate => render_simulate(&cmd_simulate(cfg, args.seed)?),
        Verb::Compare => render_compare(&cmd_compare(cfg, args.seed)?),
        Verb::Fock => render_fock(&cmd_fock(cfg)?, cfg.fock.is_some_and(|f| f.dump_rho)),
        Verb::Sweep => render_sweep(&cmd_sweep(cfg, args.g_list.as_deref())?),
    }
}

fn encode(r: &Rendered, format: Format) -> Result<Vec<u8>> {
    Ok(match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&r.json)?;
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => r.table.to_csv().into_bytes(),
    })
}

/// `dir/run.json` + `psd.csv` → `dir/run.psd.csv`.
pub fn sidecar_path(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.{suffix}"))
}

/// Writes the primary output and any companions; returns the paths written.
pub fn write_outputs(r: &Rendered, format: Format, out: Option<&Path>) -> Result<Vec<PathBuf>> {
    let primary = encode(r, format)?;
    let Some(out) = out else {
        std::io::stdout().write_all(&primary)?;
        return Ok(vec![]);
    };
    let mut written = vec![out.to_path_buf()];
    std::fs::write(out, primary)?;
    if let Some((json_primary, csv_primary)) = &r.companion {
        let (suffix, other) = match format {
            Format::Json => (json_primary, Format::Csv),
            Format::Csv => (csv_primary, Format::Json),
        };
        let path = sidecar_path(out, suffix);
        std::fs::write(&path, encode(r, other)?)?;
        written.push(path);
    }
    for s in &r.sidecars {
        let path = sidecar_path(out, &s.suffix);
        std::fs::write(&path, &s.bytes)?;
        written.push(path);
    }
    Ok(written)
}

pub fn run(args: &Args) -> Result<()> {
    let cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::room_temperature(),
    };
    let rendered = execute(args, &cfg)?;
    let output = cfg.output.clone().unwrap_or_default();
    let format = args.format.or(output.format).unwrap_or(rendered.default_format);
    let out = args.out.clone().or(output.path);
    write_outputs(&rendered, format, out.as_deref())?;
    Ok(())
}

/// Parses the process arguments, runs, and returns the exit code.
pub fn main_entry() -> i32 {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
