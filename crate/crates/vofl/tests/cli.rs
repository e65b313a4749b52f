use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use vofl::schema::{self, CsvSchema, FigureSpec};

fn vofl(args: &[&str], out: &Path) -> Output {
    vofl_env(args, out, &[])
}

fn vofl_env(args: &[&str], out: &Path, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_vofl"));
    cmd.args(args).arg("--out").arg(out).env_remove("VOFL_LOG");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("vofl runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn assert_exit(o: &Output, code: i32) {
    assert_eq!(o.status.code(), Some(code), "stderr:\n{}", stderr(o));
}

/// Header check, then the rows as strings.
fn read_csv(path: &Path, schema: &CsvSchema) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), schema.columns.join(","), "{}", path.display());
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn column(rows: &[Vec<String>], schema: &CsvSchema, name: &str) -> Vec<f64> {
    let i = schema.columns.iter().position(|c| *c == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn kernel_green_function_is_negative() {
    let dir = TempDir::new().unwrap();
    let o = vofl(&["kernel", "--profile", "example1", "--rmin", "0.01", "--rmax", "100"], dir.path());
    assert_exit(&o, 0);
    let rows = read_csv(&dir.path().join("kernel.csv"), &schema::KERNEL);
    assert_eq!(rows.len(), 200);
    let phi = column(&rows, &schema::KERNEL, "phi");
    assert!(phi.iter().all(|v| *v < 0.0));
    let s = column(&rows, &schema::KERNEL, "s");
    assert!(s.iter().all(|s| (0.6..0.9).contains(s)));
}

#[test]
fn constant_order_one_is_newtonian() {
    let dir = TempDir::new().unwrap();
    let o = vofl(&["kernel", "--profile", "constant:1", "--rnum", "25"], dir.path());
    assert_exit(&o, 0);
    let rows = read_csv(&dir.path().join("kernel.csv"), &schema::KERNEL);
    let r = column(&rows, &schema::KERNEL, "r");
    let phi = column(&rows, &schema::KERNEL, "phi");
    for (r, phi) in r.iter().zip(&phi) {
        let exact = -1.0 / (4.0 * std::f64::consts::PI * r);
        assert!((phi / exact - 1.0).abs() < 1e-13, "r = {r}: {phi} vs {exact}");
    }
}

#[test]
fn malformed_profiles_exit_with_a_diagnostic() {
    let dir = TempDir::new().unwrap();
    let o = vofl(&["kernel", "--profile", "constant:1.6"], dir.path());
    assert_exit(&o, 2);
    assert!(stderr(&o).contains("range hypothesis"), "{}", stderr(&o));
    let o = vofl(&["kernel", "--profile", "moebius:-1,9,10"], dir.path());
    assert_exit(&o, 2);
    assert!(stderr(&o).contains("limit hypothesis at the origin"), "{}", stderr(&o));
    let o = vofl(&["kernel", "--profile", "moebius:1,2"], dir.path());
    assert_exit(&o, 2);
    assert!(stderr(&o).contains("three coefficients"), "{}", stderr(&o));
    assert!(!dir.path().join("kernel.csv").exists());
}

#[test]
fn bad_flags_are_config_errors() {
    let dir = TempDir::new().unwrap();
    assert_exit(&vofl(&["kernel", "--rmin", "5", "--rmax", "1"], dir.path()), 2);
    assert_exit(&vofl(&["kernel", "--rnum", "0"], dir.path()), 2);
    assert_exit(&vofl(&["kernel", "--bogus"], dir.path()), 2);
    assert_exit(&vofl(&["khat", "--trace", "5"], dir.path()), 2);
    assert_exit(&vofl(&["kernel", "--config", "/nonexistent/run.toml"], dir.path()), 2);
}

#[test]
fn config_errors_name_the_line() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "profile = \"example1\"\n\n[r_grid]\nmin = 1.0\nmax = 0.5\ncount = 10\n").unwrap();
    let o = vofl(&["kernel", "--config", cfg.to_str().unwrap()], dir.path());
    assert_exit(&o, 2);
    assert!(stderr(&o).contains("run.toml:3: r_grid: min must be below max"), "{}", stderr(&o));

    fs::write(&cfg, "profile = \"example1\"\nformat = \"xml\"\n").unwrap();
    let o = vofl(&["kernel", "--config", cfg.to_str().unwrap()], dir.path());
    assert_exit(&o, 2);
    assert!(stderr(&o).contains("run.toml:2:"), "{}", stderr(&o));

    // a flag fixes the grid the file got wrong
    fs::write(&cfg, "[r_grid]\nmin = 1.0\nmax = 0.5\ncount = 10\n").unwrap();
    let o = vofl(&["kernel", "--config", cfg.to_str().unwrap(), "--rmax", "2"], dir.path());
    assert_exit(&o, 0);
    assert_eq!(read_csv(&dir.path().join("kernel.csv"), &schema::KERNEL).len(), 10);
}

#[test]
fn example1_khat_is_a_positive_undamped_curve() {
    let dir = TempDir::new().unwrap();
    let o = vofl(&["khat", "--profile", "example1", "--knum", "20"], dir.path());
    assert_exit(&o, 0);
    let rows = read_csv(&dir.path().join("khat.csv"), &schema::KHAT);
    assert_eq!(rows.len(), 20);
    assert!(column(&rows, &schema::KHAT, "khat").iter().all(|v| *v > 0.0));
    assert!(column(&rows, &schema::KHAT, "lambda_used").iter().all(|v| *v == 0.0));
    assert!(rows.iter().all(|r| r.last().unwrap() == "ok"));
}

#[test]
fn example2_damped_curves_and_trace() {
    let dir = TempDir::new().unwrap();
    let o = vofl(
        &["khat", "--profile", "example2", "--lambda", "0.2,0.1,0.05", "--knum", "6", "--trace", "k=5"],
        dir.path(),
    );
    assert_exit(&o, 0);
    let rows = read_csv(&dir.path().join("khat.csv"), &schema::KHAT);
    assert_eq!(rows.len(), 18);
    let lambdas = column(&rows, &schema::KHAT, "lambda");
    assert_eq!(lambdas.iter().filter(|l| **l == 0.1).count(), 6);
    assert_eq!(column(&rows, &schema::KHAT, "lambda_used"), lambdas);

    let trace = read_csv(&dir.path().join("trace.csv"), &schema::PERIODS);
    assert_eq!(trace.len(), 3 * 200);
    // at λ = 0.1 the contributions change sign where λ r_i = a = 0.6
    let at = |name| -> Vec<f64> {
        let lam = column(&trace, &schema::PERIODS, "lambda");
        column(&trace, &schema::PERIODS, name)
            .into_iter()
            .zip(lam)
            .filter(|(_, l)| *l == 0.1)
            .map(|(v, _)| v)
            .collect()
    };
    let (r, num, est) = (at("r_i"), at("delta_numeric"), at("delta_estimate"));
    let period = 2.0 * std::f64::consts::PI / 5.0;
    for series in [&num, &est] {
        let j = series.windows(2).position(|w| w[0] < 0.0 && w[1] >= 0.0).expect("sign change");
        let crossing = r[j] - series[j] * (r[j + 1] - r[j]) / (series[j + 1] - series[j]);
        assert!((crossing - 6.0).abs() < period, "sign change at r = {crossing}");
    }

    let trunc = read_csv(&dir.path().join("truncation.csv"), &schema::TRUNCATION);
    assert_eq!(trunc.len(), 3 * 20);
}

#[test]
fn undamped_example2_reports_failures_and_continues() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "[regularization]\nperiod_budget = 200\n").unwrap();
    let o = vofl(
        &["khat", "--config", cfg.to_str().unwrap(), "--profile", "example2", "--lambda", "0", "--knum", "3"],
        dir.path(),
    );
    assert_exit(&o, 3);
    let rows = read_csv(&dir.path().join("khat.csv"), &schema::KHAT);
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.last().unwrap().starts_with("error: no convergence")), "{rows:?}");
}

#[test]
fn output_is_deterministic() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let args = ["khat", "--profile", "example2", "--knum", "16"];
    assert_exit(&vofl_env(&args, a.path(), &[("RAYON_NUM_THREADS", "1")]), 0);
    assert_exit(&vofl_env(&args, b.path(), &[("RAYON_NUM_THREADS", "4")]), 0);
    let read = |d: &TempDir| fs::read(d.path().join("khat.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn json_envelope_carries_provenance() {
    let dir = TempDir::new().unwrap();
    let o = vofl(&["khat", "--profile", "example1", "--knum", "4", "--format", "json"], dir.path());
    assert_exit(&o, 0);
    let doc: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("khat.json")).unwrap()).unwrap();
    assert_eq!(doc["schema"], "khat");
    assert_eq!(doc["columns"].as_array().unwrap().len(), schema::KHAT.columns.len());
    assert_eq!(doc["rows"].as_array().unwrap().len(), 4);
    let prov = &doc["provenance"];
    assert_eq!(prov["profile"]["spec"], "example1");
    assert_eq!(prov["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(prov["policy"]["tail_tolerance"], 1e-8);
    assert_eq!(prov["k_grid"]["count"], 4);
}

#[test]
fn log_verbosity_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let quiet = vofl(&["kernel", "--rnum", "3"], dir.path());
    assert!(stderr(&quiet).is_empty(), "{}", stderr(&quiet));
    let loud = vofl_env(&["kernel", "--rnum", "3"], dir.path(), &[("VOFL_LOG", "info")]);
    assert!(stderr(&loud).contains("kernel.csv"), "{}", stderr(&loud));
}

fn newtonian_table(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("newton.csv");
    let mut text = String::from("k,khat\n");
    for k in vofl_core::log_grid(1e-6, 1e5, 221) {
        text.push_str(&format!("{k:.16e},{:.16e}\n", k.powi(-2)));
    }
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn newtonian_far_field() {
    let dir = TempDir::new().unwrap();
    let table = newtonian_table(dir.path());
    let o = vofl(
        &["solve", "--profile", "constant:1", "--source", "gaussian(0.5, 2)", "--table", table.to_str().unwrap()],
        dir.path(),
    );
    assert_exit(&o, 0);
    let rows = read_csv(&dir.path().join("solve.csv"), &schema::SOLVE);
    let r = column(&rows, &schema::SOLVE, "r");
    let f = column(&rows, &schema::SOLVE, "f");
    for (r, f) in r.iter().zip(&f).filter(|(r, _)| **r > 4.0) {
        let exact = -2.0 / (4.0 * std::f64::consts::PI * r);
        assert!((f / exact - 1.0).abs() < 1e-3, "r = {r}: {f} vs {exact}");
    }
    let diag: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("solve_diagnostics.json")).unwrap()).unwrap();
    assert_eq!(diag["solution_nonpositive"], true);
    assert!(diag["residual_relative_l2"].as_f64().unwrap() < 1e-4, "{diag}");
    read_csv(&dir.path().join("solve_table.csv"), &schema::SYMBOL_TABLE);
}

#[test]
fn example1_gaussian_round_trip() {
    let dir = TempDir::new().unwrap();
    let o = vofl(&["solve", "--profile", "example1", "--source", "gaussian(1,1)"], dir.path());
    assert_exit(&o, 0);
    let diag: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("solve_diagnostics.json")).unwrap()).unwrap();
    let residual = diag["residual_relative_l2"].as_f64().unwrap();
    assert!(residual <= 1e-3, "residual {residual}");
    assert_eq!(diag["solution_nonpositive"], true);
}

#[test]
fn solve_input_errors() {
    let dir = TempDir::new().unwrap();
    let o = vofl(&["solve", "--source", "gaussian(1,1)", "--table", "/nonexistent/khat.csv"], dir.path());
    assert_exit(&o, 2);
    assert!(stderr(&o).contains("/nonexistent/khat.csv"), "{}", stderr(&o));
    assert_exit(&vofl(&["solve", "--source", "table:/nonexistent/g.csv"], dir.path()), 2);
    assert_exit(&vofl(&["solve"], dir.path()), 2);
    assert_exit(&vofl(&["solve", "--source", "cauchy(1)"], dir.path()), 2);
    assert_exit(&vofl(&["solve", "--source", "gaussian(-1)"], dir.path()), 2);
}

#[test]
fn solve_reports_the_failing_k_range() {
    let dir = TempDir::new().unwrap();
    let table = dir.path().join("short.csv");
    fs::write(&table, "k,khat\n1,1\n2,0.25\n4,0.0625\n").unwrap();
    let o = vofl(
        &["solve", "--profile", "constant:1", "--source", "gaussian(1)", "--table", table.to_str().unwrap()],
        dir.path(),
    );
    assert_exit(&o, 3);
    assert!(stderr(&o).contains("outside the table coverage"), "{}", stderr(&o));
}

#[test]
fn quick_validation_passes() {
    let dir = TempDir::new().unwrap();
    let start = std::time::Instant::now();
    let o = vofl(&["validate", "--quick"], dir.path());
    let elapsed = start.elapsed();
    assert_exit(&o, 0);
    let reports: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("validate.json")).unwrap()).unwrap();
    let reports = reports.as_array().unwrap();
    assert!(reports.len() >= 10);
    assert!(reports.iter().all(|r| r["passed"] == true));
    assert!(stderr(&o).contains(&format!("{0} of {0} checks passed", reports.len())));
    assert!(elapsed.as_secs_f64() < 10.0, "quick suite took {elapsed:?}");
}

#[test]
fn figure_data_sets() {
    let dir = TempDir::new().unwrap();
    let o = vofl(&["khat", "--figures", "--knum", "12", "--rnum", "30"], dir.path());
    assert_exit(&o, 0);
    for (stem, layout) in schema::FIGURE_FILES {
        let rows = read_csv(&dir.path().join(format!("{stem}.csv")), layout);
        assert!(!rows.is_empty(), "{stem}");
    }
    let specs: Vec<FigureSpec> = serde_json::from_str(&fs::read_to_string(dir.path().join("figures.json")).unwrap()).unwrap();
    assert_eq!(specs.len(), schema::FIGURE_FILES.len());
    for spec in &specs {
        spec.validate(dir.path()).unwrap();
    }
    let lambdas = column(&read_csv(&dir.path().join("fig2_khat_lambda.csv"), &schema::KHAT), &schema::KHAT, "lambda");
    assert_eq!(lambdas.len(), 36);
    // Example 1 lies between its constant-order limits; Example 2 dips
    // below both around k = 1, so only its sign is checked
    let curve = |stem: &str| {
        let rows = read_csv(&dir.path().join(format!("{stem}.csv")), &schema::KHAT);
        (column(&rows, &schema::KHAT, "k"), column(&rows, &schema::KHAT, "khat"))
    };
    let (k, kh) = curve("fig1_khat");
    for (k, kh) in k.iter().zip(&kh) {
        let (lo, hi) = (k.powf(-1.2).min(k.powf(-1.8)), k.powf(-1.2).max(k.powf(-1.8)));
        assert!(*kh > lo && *kh < hi, "k = {k}: {kh} outside [{lo}, {hi}]");
    }
    assert!(curve("fig4_khat_bounds").1.iter().all(|v| *v > 0.0));
}
