//! The `kernel`, `khat`, `solve` and `validate` subcommands.

use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde_json::{json, Value};
use vofl_core::oracles::{run_suite, CheckReport, SuiteOptions};
use vofl_core::sinexform::{
    khat_at_lambda, measured_tail, period_trace, truncation_error_estimate, KhatGrid, LambdaScaling,
};
use vofl_core::spectral::{default_table_grid, poisson_residual, solve_poisson_with, TransformOptions};
use vofl_core::{khat, kernel_eval, make_example1, make_example2, ExponentProfile, RegularizationPolicy, SineTransformResult, SpectralTable};

use crate::config::{GridSpec, Origin, RunConfig};
use crate::error::{exit, CliError, CliResult};
use crate::files::{read_columns, write_file, write_json, Cell, Table};
use crate::schema::{self, figure_specs, KERNEL, KHAT, PERIODS, SOLVE, SYMBOL_TABLE, TRUNCATION};

pub const KERNEL_GRID: GridSpec = GridSpec::log(0.01, 100.0, 200);
pub const KHAT_GRID: GridSpec = GridSpec::log(0.05, 20.0, 100);
pub const SOLVE_GRID: GridSpec = GridSpec::log(1e-3, 12.0, 400);
/// Damping values of the figure-analogue curves.
pub const FIGURE_LAMBDAS: [f64; 3] = [0.2, 0.1, 0.05];
pub const FIGURE_K: f64 = 5.0;
pub const FIGURE_TRACE_LAMBDA: f64 = 0.1;

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub exit_code: u8,
}

impl Outcome {
    fn ok(files: Vec<PathBuf>) -> Self {
        Self {
            files,
            exit_code: exit::OK,
        }
    }
}

fn provenance(config: &RunConfig, profile: &ExponentProfile, command: &str, extra: Value) -> Value {
    let mut p = json!({
        "tool": "vofl",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "profile": {
            "spec": config.profile.value.source,
            "description": profile.to_string(),
            "n": profile.n(),
            "s_at_zero": profile.s_at_zero(),
            "s_at_infinity": profile.s_at_infinity(),
        },
        "policy": config.policy.value,
    });
    if let (Value::Object(p), Value::Object(extra)) = (&mut p, extra) {
        p.extend(extra);
    }
    p
}

fn kernel_table(profile: &ExponentProfile, radii: &[f64]) -> CliResult<Table> {
    let mut table = Table::new(&KERNEL);
    for &r in radii {
        let e = kernel_eval(profile, r).map_err(|e| CliError::core(format!("kernel at r = {r}"), e))?;
        table.push(vec![r.into(), e.s_local.into(), e.k_value.into(), e.p_value.into(), (-e.k_value).into()]);
    }
    Ok(table)
}

pub fn cmd_kernel(config: &RunConfig) -> CliResult<Outcome> {
    let profile = config.profile.value.build()?;
    let grid = config.r_grid(KERNEL_GRID)?;
    let table = kernel_table(&profile, &grid.points())?;
    let prov = provenance(config, &profile, "kernel", json!({ "r_grid": grid_json(&grid) }));
    Ok(Outcome::ok(vec![table.write(&config.out, "kernel", config.format, &prov)?]))
}

fn grid_json(g: &GridSpec) -> Value {
    json!({ "min": g.min, "max": g.max, "count": g.count, "spacing": format!("{:?}", g.spacing).to_lowercase() })
}

/// One K̂ curve: extrapolated when `lambda` is `None`, else at that damping.
struct Curve {
    lambda: f64,
    results: Vec<(f64, vofl_core::Result<SineTransformResult>)>,
}

fn khat_curve(profile: &ExponentProfile, ks: &[f64], lambda: Option<f64>, policy: &RegularizationPolicy) -> Curve {
    let results = ks
        .par_iter()
        .map(|&k| {
            let r = match lambda {
                Some(l) => khat_at_lambda(profile, k, l, policy),
                None => khat(profile, k, policy),
            };
            (k, r)
        })
        .collect();
    Curve {
        lambda: lambda.unwrap_or(0.0),
        results,
    }
}

/// Rows for `curves`; failed wavenumbers are kept with their message and
/// counted.
fn khat_table(curves: &[Curve]) -> (Table, usize) {
    let mut table = Table::new(&KHAT);
    let mut failures = 0;
    for c in curves {
        for (k, r) in &c.results {
            match r {
                Ok(r) => table.push(vec![
                    c.lambda.into(),
                    (*k).into(),
                    r.value.into(),
                    r.lambda_used.into(),
                    r.truncation_bound.into(),
                    r.periods_summed.into(),
                    r.error_estimate.into(),
                    "ok".into(),
                ]),
                Err(e) => {
                    failures += 1;
                    warn!("k = {k}, lambda = {}: {e}", c.lambda);
                    let nan = || Cell::Num(f64::NAN);
                    table.push(vec![
                        c.lambda.into(),
                        (*k).into(),
                        nan(),
                        nan(),
                        nan(),
                        0usize.into(),
                        nan(),
                        format!("error: {e}").into(),
                    ]);
                }
            }
        }
    }
    (table, failures)
}

fn trace_table(profile: &ExponentProfile, k: f64, lambdas: &[f64], count: usize) -> CliResult<Table> {
    let traces: Vec<_> = lambdas
        .par_iter()
        .map(|&l| period_trace(profile, k, l, count).map_err(|e| CliError::core(format!("trace at k = {k}, lambda = {l}"), e)))
        .collect::<CliResult<_>>()?;
    let mut table = Table::new(&PERIODS);
    for (l, rows) in lambdas.iter().zip(traces) {
        for row in rows {
            table.push(vec![(*l).into(), k.into(), row.i.into(), row.r_i.into(), row.delta_numeric.into(), row.delta_estimate.into()]);
        }
    }
    Ok(table)
}

fn truncation_table(profile: &ExponentProfile, k: f64, lambdas: &[f64], periods: &[usize]) -> CliResult<Table> {
    let cases: Vec<(f64, usize)> = lambdas.iter().flat_map(|&l| periods.iter().map(move |&i| (l, i))).collect();
    let values: Vec<(f64, f64)> = cases
        .par_iter()
        .map(|&(l, i)| {
            let ctx = || format!("truncation tail at k = {k}, lambda = {l}, I = {i}");
            let tail = measured_tail(profile, i, k, l).map_err(|e| CliError::core(ctx(), e))?;
            let est = truncation_error_estimate(profile, i, k, l).map_err(|e| CliError::core(ctx(), e))?;
            Ok((tail.abs(), est))
        })
        .collect::<CliResult<_>>()?;
    let mut table = Table::new(&TRUNCATION);
    for ((l, i), (tail, est)) in cases.into_iter().zip(values) {
        table.push(vec![l.into(), k.into(), i.into(), tail.into(), est.into()]);
    }
    Ok(table)
}

/// Damping values for traces: the fixed values if given, none for a
/// decaying kernel, the policy's sequence otherwise.
fn trace_lambdas(config: &RunConfig, profile: &ExponentProfile, k: f64) -> Vec<f64> {
    if let Some(l) = &config.fixed_lambdas {
        return l.value.clone();
    }
    if profile.decay_exponent() < 0.0 {
        return vec![0.0];
    }
    let p = &config.policy.value;
    p.lambda_sequence.iter().map(|&l| p.damping(l, k)).collect()
}

pub fn cmd_khat(config: &RunConfig, figures: bool) -> CliResult<Outcome> {
    if figures {
        return cmd_figures(config);
    }
    let profile = config.profile.value.build()?;
    let grid = config.k_grid(KHAT_GRID)?;
    let ks = grid.points();
    let policy = &config.policy.value;
    let curves: Vec<Curve> = match &config.fixed_lambdas {
        Some(l) => l.value.iter().map(|&l| khat_curve(&profile, &ks, Some(l), policy)).collect(),
        None => vec![khat_curve(&profile, &ks, None, policy)],
    };
    let (table, failures) = khat_table(&curves);
    let prov = provenance(config, &profile, "khat", json!({ "k_grid": grid_json(&grid) }));
    let mut files = vec![table.write(&config.out, "khat", config.format, &prov)?];
    if let Some(k) = config.trace_k {
        let lambdas = trace_lambdas(config, &profile, k);
        let extra = json!({ "trace_k": k, "lambdas": lambdas });
        let prov = provenance(config, &profile, "khat --trace", extra);
        let trace = trace_table(&profile, k, &lambdas, config.trace_periods)?;
        files.push(trace.write(&config.out, "trace", config.format, &prov)?);
        let trunc = truncation_table(&profile, k, &lambdas, &config.truncation_periods)?;
        files.push(trunc.write(&config.out, "truncation", config.format, &prov)?);
    }
    let mut outcome = Outcome::ok(files);
    if failures > 0 {
        warn!("{failures} of {} wavenumbers did not converge", table.rows.len());
        outcome.exit_code = exit::NUMERICAL;
    }
    Ok(outcome)
}

/// Data behind the figure analogues, always as CSV, plus `figures.json`.
fn cmd_figures(config: &RunConfig) -> CliResult<Outcome> {
    let ks = config.k_grid(KHAT_GRID)?.points();
    let radii = config.r_grid(KERNEL_GRID)?.points();
    let (ex1, ex2) = (make_example1(), make_example2());
    let policy = &config.policy.value;
    let lambdas = config.fixed_lambdas.as_ref().map_or(FIGURE_LAMBDAS.to_vec(), |l| l.value.clone());
    let k = config.trace_k.unwrap_or(FIGURE_K);
    let dir = &config.out;
    let mut files = Vec::new();
    let mut failures = 0;
    let mut put = |stem: &str, table: &Table| -> CliResult<()> {
        debug_assert_eq!(schema::figure_schema(stem), Some(table.schema));
        let path = dir.join(format!("{stem}.csv"));
        write_file(&path, &table.to_csv())?;
        files.push(path);
        Ok(())
    };

    let (t, f) = khat_table(&[khat_curve(&ex1, &ks, None, policy)]);
    failures += f;
    put("fig1_khat", &t)?;
    put("fig1_phi", &kernel_table(&ex1, &radii)?)?;
    let curves: Vec<Curve> = lambdas.iter().map(|&l| khat_curve(&ex2, &ks, Some(l), policy)).collect();
    let (t, f) = khat_table(&curves);
    failures += f;
    put("fig2_khat_lambda", &t)?;
    put("fig2_dk_periods", &trace_table(&ex2, k, &lambdas, config.trace_periods)?)?;
    put("fig3_dk_compare", &trace_table(&ex2, k, &[FIGURE_TRACE_LAMBDA], config.trace_periods)?)?;
    put(
        "fig3_truncation",
        &truncation_table(&ex2, k, &[FIGURE_TRACE_LAMBDA], &config.truncation_periods)?,
    )?;
    // λ proportional to k keeps the extrapolation accurate down to small k
    let relative = policy.clone().with_scaling(LambdaScaling::RelativeToK);
    let (t, f) = khat_table(&[khat_curve(&ex2, &ks, None, &relative)]);
    failures += f;
    put("fig4_khat_bounds", &t)?;
    put("fig4_phi", &kernel_table(&ex2, &radii)?)?;

    let spec_path = dir.join("figures.json");
    write_json(&spec_path, &figure_specs())?;
    files.push(spec_path);
    Ok(Outcome {
        files,
        exit_code: if failures > 0 { exit::NUMERICAL } else { exit::OK },
    })
}

fn load_table(path: &Path, profile: &ExponentProfile, policy: &RegularizationPolicy) -> CliResult<SpectralTable> {
    let cols = read_columns(path, SYMBOL_TABLE.columns)?;
    let [ks, values]: [Vec<f64>; 2] = cols.try_into().expect("two columns requested");
    SpectralTable::new(profile, policy.clone(), ks, values)
        .map_err(|e| CliError::config(format!("symbol table {}: {e}", path.display())))
}

fn build_table(profile: &ExponentProfile, grid: &[f64], per_decade: usize, policy: &RegularizationPolicy) -> CliResult<SpectralTable> {
    let (r_min, r_max) = (grid[0], grid[grid.len() - 1]);
    let ks = default_table_grid(r_min, r_max, per_decade).map_err(|e| CliError::core("symbol table grid", e))?;
    info!("building a {}-point symbol table on [{:e}, {:e}]", ks.len(), ks[0], ks[ks.len() - 1]);
    let results = ks.par_iter().map(|&k| khat(profile, k, policy)).collect();
    let grid = KhatGrid::from_results(profile.clone(), policy.clone(), ks, results).map_err(|e| CliError::core("symbol table", e))?;
    if let Some((k, e)) = grid.failures().next() {
        let n = grid.failures().count();
        return Err(CliError::core(format!("symbol table: {n} wavenumbers failed, first at k = {k}"), e.clone()));
    }
    grid.to_table().map_err(|e| CliError::core("symbol table", e))
}

pub fn cmd_solve(config: &RunConfig) -> CliResult<Outcome> {
    let source = config
        .source_spec()?
        .ok_or_else(|| CliError::config("solve needs a source: --source gaussian(SIGMA, MASS), plummer(A, MASS) or table:PATH"))?;
    let profile = config.profile.value.build()?;
    let grid = config.r_grid(SOLVE_GRID)?;
    let g = source.field(&grid.points())?;
    // without explicit settings the damping follows k, which keeps the
    // table accurate at the smallest wavenumbers
    let policy = match config.policy.origin {
        Origin::Default => config.policy.value.clone().with_scaling(LambdaScaling::RelativeToK),
        _ => config.policy.value.clone(),
    };
    let table = match &config.table {
        Some(path) => load_table(path, &profile, &policy)?,
        None => build_table(&profile, g.grid(), config.table_per_decade, &policy)?,
    };
    let opts = TransformOptions::default();
    let solution = solve_poisson_with(&profile, &g, &table, &opts).map_err(|e| CliError::core("solve", e))?;
    let residual =
        poisson_residual(&profile, &solution.solution, &g, &table, &opts).map_err(|e| CliError::core("residual check", e))?;
    let f = &solution.solution;
    info!("relative L2 residual of the round trip: {residual:e}");

    let mut out = Table::new(&SOLVE);
    for ((r, fv), gv) in f.grid().iter().zip(f.values()).zip(g.values()) {
        out.push(vec![(*r).into(), (*fv).into(), (*gv).into()]);
    }
    let mut symbol = Table::new(&SYMBOL_TABLE);
    for (k, v) in table.k_grid().iter().zip(table.values()) {
        symbol.push(vec![(*k).into(), (*v).into()]);
    }
    let diagnostics = json!({
        "source": source.to_string(),
        "residual_relative_l2": residual,
        "solution_nonpositive": f.values().iter().all(|v| *v <= 0.0),
        "spectral": solution.diagnostics,
        "table": {
            "points": table.len(),
            "k_min": table.k_grid()[0],
            "k_max": table.k_grid()[table.len() - 1],
            "from_file": config.table.as_ref().map(|p| p.display().to_string()),
        },
    });
    let prov = provenance(config, &profile, "solve", json!({ "r_grid": grid_json(&grid), "diagnostics": diagnostics }));
    let mut files = vec![out.write(&config.out, "solve", config.format, &prov)?];
    files.push(symbol.write(&config.out, "solve_table", config.format, &prov)?);
    let diag_path = config.out.join("solve_diagnostics.json");
    write_json(&diag_path, &diagnostics)?;
    files.push(diag_path);
    Ok(Outcome::ok(files))
}

pub fn suite_options(config: &RunConfig) -> SuiteOptions {
    SuiteOptions {
        quick: config.quick,
        example2: config.example2,
    }
}

/// Runs the check suite, writes `validate.json`, and fails when any check does.
pub fn cmd_validate(config: &RunConfig) -> CliResult<(Outcome, Vec<CheckReport>)> {
    let reports = run_suite(suite_options(config));
    let path = config.out.join("validate.json");
    write_json(&path, &reports)?;
    let failed = reports.iter().filter(|r| !r.passed).count();
    let mut outcome = Outcome::ok(vec![path]);
    if failed > 0 {
        outcome.exit_code = exit::VALIDATION;
    }
    Ok((outcome, reports))
}
