//! `erange`: scattering observables and tail-theorem scans from the
//! command line. Output is strictly deterministic: a fixed row order and
//! fixed float formatting regardless of internal parallelism.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use erange_core::*;
use serde_json::json;

use config::{MethodChoice, Overrides, RunConfig};
use output::{observable_cells, observable_json, Cell, Report};

#[derive(Parser)]
#[command(
    name = "erange",
    version,
    about = "Low-energy scattering observables for short-range central potentials"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct CommonArgs {
    /// TOML run configuration; flags override file values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<config::OutputFormat>,
    /// Angular momentum
    #[arg(long)]
    ell: Option<u32>,
    #[arg(long)]
    kmin: Option<f64>,
    #[arg(long)]
    kmax: Option<f64>,
    #[arg(long)]
    kpoints: Option<usize>,
    /// Outer grid radius (default: sized from the potential tail)
    #[arg(long)]
    rmax: Option<f64>,
    /// integral | matching | both (for effective-range: direct integrals
    /// vs low-k fit)
    #[arg(long, value_enum)]
    method: Option<MethodChoice>,
    /// Comma-separated tail exponents for `scan`
    #[arg(long = "s-list", value_delimiter = ',')]
    s_list: Option<Vec<f64>>,
    /// Comma-separated angular momenta for `scan`
    #[arg(long = "ell-list", value_delimiter = ',')]
    ell_list: Option<Vec<u32>>,
}

impl CommonArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let over = Overrides {
            ell: self.ell,
            k_min: self.kmin,
            k_max: self.kmax,
            k_points: self.kpoints,
            r_max: self.rmax,
            method: self.method,
            format: self.format,
            out: self.out.clone(),
            s_list: self.s_list.clone(),
            ell_list: self.ell_list.clone(),
        };
        RunConfig::load(self.config.as_ref(), &over)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Phase-shift curve delta_l(k) by the integral formula and/or
    /// asymptotic matching
    PhaseShift(CommonArgs),
    /// Scattering length, b coefficient, and effective range
    EffectiveRange(CommonArgs),
    /// Truncation-scan theorem matrix over tail exponents
    Scan(CommonArgs),
    /// Levinson check: delta_l(k_min) against n*pi
    Levinson(CommonArgs),
    /// Bound-state spectrum gamma_j
    BoundStates(CommonArgs),
    /// Run every module's invariant checks
    Validate(CommonArgs),
}

fn main() -> ExitCode {
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let cli = Cli::parse();
    let run = match &cli.cmd {
        Cmd::PhaseShift(a) => a.resolve().and_then(cmd_phase_shift),
        Cmd::EffectiveRange(a) => a.resolve().and_then(cmd_effective_range),
        Cmd::Scan(a) => a.resolve().and_then(cmd_scan),
        Cmd::Levinson(a) => a.resolve().and_then(cmd_levinson),
        Cmd::BoundStates(a) => a.resolve().and_then(cmd_bound_states),
        Cmd::Validate(a) => a.resolve().and_then(cmd_validate),
    };
    match run {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}

/// ERANGE_THREADS caps worker parallelism; 0 or unset means automatic.
fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("ERANGE_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("ERANGE_THREADS = {raw:?} is not a count")))?;
    if n == 0 {
        return Ok(());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))
}

fn build_grid(cfg: &RunConfig, k_max_needed: f64) -> Result<Arc<RadialGrid>> {
    RadialGrid::build(&cfg.potential, &cfg.grid_spec(k_max_needed)?)
}

fn cmd_phase_shift(cfg: RunConfig) -> Result<()> {
    let ks = cfg.k_values();
    let grid = build_grid(&cfg, cfg.k_grid.k_max)?;
    let pot = &cfg.potential;
    let integral = match cfg.method {
        MethodChoice::Integral | MethodChoice::Both => Some(phase_shift_curve(
            pot,
            cfg.ell,
            &ks,
            &grid,
            PhaseMethod::IntegralFormula,
        )?),
        MethodChoice::Matching => None,
    };
    let matching = match cfg.method {
        MethodChoice::Matching | MethodChoice::Both => Some(phase_shift_curve(
            pot,
            cfg.ell,
            &ks,
            &grid,
            PhaseMethod::AsymptoticMatching,
        )?),
        MethodChoice::Integral => None,
    };

    let mut headers = vec!["k [1/length]".to_string()];
    if integral.is_some() {
        headers.push("delta_integral [rad]".into());
    }
    if matching.is_some() {
        headers.push("delta_matching [rad]".into());
    }
    if integral.is_some() && matching.is_some() {
        headers.push("abs_difference [rad]".into());
    }
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for (i, &k) in ks.iter().enumerate() {
        let mut row = vec![Cell::Num(k)];
        let mut obj = json!({ "k": k });
        let di = integral.as_ref().map(|c| c.delta[i]);
        let dm = matching.as_ref().map(|c| c.delta[i]);
        if let Some(d) = di {
            row.push(Cell::Num(d));
            obj["delta_integral"] = json!(d);
        }
        if let Some(d) = dm {
            row.push(Cell::Num(d));
            obj["delta_matching"] = json!(d);
        }
        if let (Some(a), Some(b)) = (di, dm) {
            row.push(Cell::Num((a - b).abs()));
            obj["abs_difference"] = json!((a - b).abs());
        }
        rows.push(row);
        results.push(obj);
    }
    let report = Report {
        headers,
        rows,
        results,
        diagnostics: json!({ "ell": cfg.ell, "r_max": grid.r_max(), "grid_nodes": grid.len() }),
    };
    report.write(&cfg)
}

fn method_name(tag: &MethodTag) -> &'static str {
    match tag {
        MethodTag::DirectIntegral => "direct_integral",
        MethodTag::LowKFit => "low_k_fit",
    }
}

fn effective_range_row(res: &EffectiveRangeResult) -> (Vec<Cell>, serde_json::Value) {
    let (a_c, a_e) = observable_cells(&res.a);
    let (b_c, b_e) = observable_cells(&res.b);
    let (r_c, r_e) = observable_cells(&res.r_eff);
    let d = &res.diagnostics;
    let row = vec![
        Cell::Text(method_name(&res.method).into()),
        a_c,
        a_e,
        b_c,
        b_e,
        r_c,
        r_e,
        d.a_limit_form.map_or(Cell::Empty, Cell::Num),
        Cell::Text(d.warning.clone().unwrap_or_default()),
    ];
    let obj = json!({
        "method": method_name(&res.method),
        "a": observable_json(&res.a),
        "b": observable_json(&res.b),
        "r_eff": observable_json(&res.r_eff),
        "diagnostics": serde_json::to_value(d).expect("diagnostics serialize"),
    });
    (row, obj)
}

/// The a = 0 case (e.g. the free potential): Eq. (22) divides by a, so the
/// effective range is reported as undefined rather than as a failure.
fn zero_a_row(method: &'static str) -> (Vec<Cell>, serde_json::Value) {
    let row = vec![
        Cell::Text(method.into()),
        Cell::Num(0.0),
        Cell::Empty,
        Cell::Num(0.0),
        Cell::Empty,
        Cell::Text("a=0: undefined".into()),
        Cell::Empty,
        Cell::Num(0.0),
        Cell::Empty,
    ];
    let obj = json!({
        "method": method,
        "a": { "status": "finite", "value": 0.0 },
        "b": { "status": "finite", "value": 0.0 },
        "r_eff": "a=0: undefined",
    });
    (row, obj)
}

fn cmd_effective_range(cfg: RunConfig) -> Result<()> {
    let pot = &cfg.potential;
    let want_fit = matches!(cfg.method, MethodChoice::Matching | MethodChoice::Both);
    // the phase-shift default k grid reaches far too high for an Eq. (33)
    // fit; when the user has not customized it, fit well below 1/range
    let fit_ks = if cfg.k_grid == config::KGridConfig::default() {
        let top = 0.3 / pot.characteristic_range().max(1e-3);
        (0..16).map(|i| top / 15.0f64.powf(1.0 - i as f64 / 15.0)).collect()
    } else {
        cfg.k_values()
    };
    let k_needed = if want_fit { fit_ks.iter().cloned().fold(0.0, f64::max) } else { 0.0 };
    let grid = build_grid(&cfg, k_needed)?;
    let is_free = pot.tail_abs_moment(0.0, 0) == 0.0;
    let mut rows = Vec::new();
    let mut results = Vec::new();

    if matches!(cfg.method, MethodChoice::Integral | MethodChoice::Both) {
        let (row, obj) = if is_free {
            zero_a_row("direct_integral")
        } else {
            let res = effective_range_direct(pot, cfg.ell, &grid)?;
            effective_range_row(&res)
        };
        rows.push(row);
        results.push(obj);
    }
    if matches!(cfg.method, MethodChoice::Matching | MethodChoice::Both) {
        let (row, obj) = if is_free {
            zero_a_row("low_k_fit")
        } else {
            let res = low_k_expansion(pot, cfg.ell, &fit_ks, &grid)?;
            effective_range_row(&res)
        };
        rows.push(row);
        results.push(obj);
    }

    let report = Report {
        headers: [
            "method",
            "a [length]",
            "a_exponent",
            "b [length^3]",
            "b_exponent",
            "r_eff [length]",
            "r_eff_exponent",
            "a_limit_form [length]",
            "note",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
        rows,
        results,
        diagnostics: json!({ "ell": cfg.ell, "r_max": grid.r_max(), "grid_nodes": grid.len() }),
    };
    report.write(&cfg)
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Convergent => "convergent",
        Verdict::Divergent => "divergent",
    }
}

fn cmd_scan(cfg: RunConfig) -> Result<()> {
    let matrix = theorem_matrix(&cfg.ell_list, &cfg.s_list, 1.0)?;
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for c in &matrix.cells {
        rows.push(vec![
            Cell::Int(c.ell as i64),
            Cell::Num(c.s),
            Cell::Text(if c.predicted_a { "finite" } else { "divergent" }.into()),
            Cell::Text(if c.predicted_r { "finite" } else { "divergent" }.into()),
            Cell::Text(verdict_name(c.observed_a).into()),
            Cell::Text(verdict_name(c.observed_r).into()),
            c.exponent_a.map_or(Cell::Empty, Cell::Num),
            c.exponent_r.map_or(Cell::Empty, Cell::Num),
            Cell::Text(c.r_implied.to_string()),
            Cell::Text(c.near_threshold.to_string()),
            Cell::Text(c.mismatch.to_string()),
        ]);
        results.push(serde_json::to_value(c).expect("cell serializes"));
    }
    let report = Report {
        headers: [
            "ell",
            "s",
            "predicted_a",
            "predicted_r",
            "observed_a",
            "observed_r",
            "exponent_a",
            "exponent_r",
            "r_implied",
            "near_threshold",
            "mismatch",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect(),
        rows,
        results,
        diagnostics: json!({ "passed": matrix.passed() }),
    };
    report.write(&cfg)?;
    if matrix.passed() {
        Ok(())
    } else {
        Err(Error::Numeric("theorem matrix: observed verdicts disagree with prediction".into()))
    }
}

fn cmd_levinson(cfg: RunConfig) -> Result<()> {
    let k_min = cfg.k_grid.k_min;
    let grid = build_grid(&cfg, k_min)?;
    let rep = levinson(&cfg.potential, cfg.ell, &grid, k_min)?;
    let report = Report {
        headers: ["n", "delta_at_kmin [rad]", "residual [rad]", "near_resonance"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows: vec![vec![
            Cell::Int(rep.n as i64),
            Cell::Num(rep.delta_at_kmin),
            Cell::Num(rep.residual),
            Cell::Text(rep.near_resonance.to_string()),
        ]],
        results: vec![serde_json::to_value(&rep).expect("report serializes")],
        diagnostics: json!({ "ell": cfg.ell, "k_min": k_min, "r_max": grid.r_max() }),
    };
    report.write(&cfg)
}

fn cmd_bound_states(cfg: RunConfig) -> Result<()> {
    let grid = build_grid(&cfg, 0.0)?;
    let spectrum = bound_states(&cfg.potential, cfg.ell, &grid)?;
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for (j, &g) in spectrum.gammas.iter().enumerate() {
        rows.push(vec![Cell::Int(j as i64 + 1), Cell::Num(g), Cell::Num(g * g)]);
        results.push(json!({ "index": j + 1, "gamma": g, "binding_energy": g * g }));
    }
    let report = Report {
        headers: ["index", "gamma [1/length]", "binding_energy [1/length^2]"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        rows,
        results,
        diagnostics: json!({
            "ell": cfg.ell,
            "count": spectrum.gammas.len(),
            "node_count": spectrum.node_count,
        }),
    };
    report.write(&cfg)
}

fn cmd_validate(cfg: RunConfig) -> Result<()> {
    let checks = validation_suite();
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    let mut rows = Vec::new();
    let mut results = Vec::new();
    for c in &checks {
        rows.push(vec![
            Cell::Text(c.name.into()),
            Cell::Text(if c.passed { "pass" } else { "FAIL" }.into()),
            Cell::Text(c.detail.clone()),
        ]);
        results.push(serde_json::to_value(c).expect("check serializes"));
    }
    let report = Report {
        headers: ["check", "status", "detail"].iter().map(|s| s.to_string()).collect(),
        rows,
        results,
        diagnostics: json!({ "total": checks.len(), "failed": failed.len() }),
    };
    report.write(&cfg)?;
    // a human-readable table on stderr when results went to a file
    if cfg.out.is_some() {
        for c in &checks {
            eprintln!("[{}] {} — {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::Numeric(format!("validation failures: {}", failed.join(", "))))
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn float_format_is_17_sig_digits() {
        assert_eq!(crate::output::fmt_f64(0.5179862099604994), "5.1798620996049938e-1");
        assert_eq!(crate::output::fmt_f64(1.0), "1.0000000000000000e0");
    }
}
