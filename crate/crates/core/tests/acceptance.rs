//! Acceptance criteria 1–10, run concurrently and reported in order.
//!
//! Every criterion prints exactly one `PASS`/`FAIL` line; the individual
//! checks of a failing criterion follow it, indented.

use std::process::ExitCode;
use std::thread;
use std::time::{Duration, Instant};

use vofl_core::exponent::{make_example1, make_example2, ExponentProfile};
use vofl_core::log_grid;
use vofl_core::oracles::{
    build_table, check_asymptotic_slopes, check_classical_limit, check_constant_order_identity,
    check_delta_maximum_scaling, check_example1_asymptotics, check_example1_derivative, check_example1_monotonicity,
    check_example1_positivity, check_inversion, check_period_estimate, check_spectral_vs_direct,
    check_truncation_bound, CheckReport,
};

struct Outcome {
    id: u32,
    title: &'static str,
    reports: Vec<CheckReport>,
    elapsed: Duration,
}

fn timed(id: u32, title: &'static str, f: impl FnOnce() -> Vec<CheckReport>) -> Outcome {
    let start = Instant::now();
    let reports = f();
    Outcome { id, title, reports, elapsed: start.elapsed() }
}

fn constant_order() -> Vec<CheckReport> {
    let ks = log_grid(0.1, 10.0, 50);
    [0.3, 0.6, 0.9].iter().map(|&s| check_constant_order_identity(s, &ks, 1e-6)).collect()
}

fn regularized() -> Vec<CheckReport> {
    [1.1, 1.3].iter().map(|&s| check_constant_order_identity(s, &[1.0, 2.0, 5.0], 1e-3)).collect()
}

fn classical() -> Vec<CheckReport> {
    let [green, _] = check_classical_limit(&[], &log_grid(0.01, 100.0, 401));
    vec![green]
}

fn lemma() -> Vec<CheckReport> {
    let mut out = vec![
        check_example1_monotonicity(&log_grid(1e-6, 1e6, 1201)),
        check_example1_derivative(&log_grid(0.01, 100.0, 201)),
    ];
    out.extend(check_example1_asymptotics());
    out
}

fn proposition() -> Vec<CheckReport> {
    vec![check_example1_positivity(&log_grid(0.05, 20.0, 100))]
}

fn period_estimate() -> Vec<CheckReport> {
    let ex2 = make_example2();
    let mut out = check_period_estimate(&ex2, 5.0, 0.1, &[50, 100, 200, 400], 0.05).to_vec();
    out.push(check_delta_maximum_scaling(&ex2, &[(5.0, 0.05), (5.0, 0.1), (10.0, 0.05), (10.0, 0.1)], 0.2));
    out
}

fn truncation() -> Vec<CheckReport> {
    vec![
        check_truncation_bound(&make_example1(), 5.0, 0.0, &[50, 100, 200]),
        check_truncation_bound(&make_example2(), 5.0, 0.1, &[50, 100, 200]),
    ]
}

fn slopes() -> Vec<CheckReport> {
    check_asymptotic_slopes(&make_example1(), (0.01, 0.02), (50.0, 100.0)).to_vec()
}

/// Criteria 8 and 9 share one symbol table; its build time is charged to
/// both.
fn spectral_criteria(ex1: &ExponentProfile) -> [Outcome; 2] {
    let start = Instant::now();
    let table = build_table(ex1, 1e-3, 12.0, 20);
    let table_time = start.elapsed();
    let [inversion, direct] = match &table {
        Ok(table) => thread::scope(|scope| {
            let a = scope.spawn(|| timed(8, "inversion round trip", || check_inversion(ex1, table, 1e-3).to_vec()));
            let b = scope.spawn(|| {
                timed(9, "spectral vs direct convolution", || {
                    vec![check_spectral_vs_direct(ex1, table, &log_grid(0.2, 5.0, 10), 1e-3)]
                })
            });
            [a.join().expect("criterion 8 panicked"), b.join().expect("criterion 9 panicked")]
        }),
        Err(e) => {
            let failed = |id, title| Outcome {
                id,
                title,
                reports: vec![CheckReport::failed("symbol table", e)],
                elapsed: Duration::ZERO,
            };
            [failed(8, "inversion round trip"), failed(9, "spectral vs direct convolution")]
        }
    };
    [
        Outcome { elapsed: inversion.elapsed + table_time, ..inversion },
        Outcome { elapsed: direct.elapsed + table_time, ..direct },
    ]
}

fn main() -> ExitCode {
    let ex1 = make_example1();
    let outcomes: Vec<Outcome> = thread::scope(|scope| {
        let mut handles = vec![
            scope.spawn(|| timed(1, "constant-order identity", constant_order)),
            scope.spawn(|| timed(2, "regularized regime", regularized)),
            scope.spawn(|| timed(3, "classical limit", classical)),
            scope.spawn(|| timed(4, "example 1 lemma", lemma)),
            scope.spawn(|| timed(5, "example 1 proposition", proposition)),
            scope.spawn(|| timed(6, "per-period estimate", period_estimate)),
            scope.spawn(|| timed(7, "truncation estimate", truncation)),
            scope.spawn(|| timed(10, "asymptotic envelope", slopes)),
        ];
        let spectral = scope.spawn(|| spectral_criteria(&ex1));
        let mut out: Vec<Outcome> = handles.drain(..).map(|h| h.join().expect("criterion panicked")).collect();
        out.extend(spectral.join().expect("spectral criteria panicked"));
        out.sort_by_key(|o| o.id);
        out
    });

    let mut failures = 0;
    for o in &outcomes {
        let passed = !o.reports.is_empty() && o.reports.iter().all(|r| r.passed);
        let worst = o
            .reports
            .iter()
            .find(|r| !r.passed)
            .or_else(|| o.reports.last())
            .map(|r| format!("{}: measured {:.6e}, expected {:.6e}", r.name, r.measured, r.expected))
            .unwrap_or_default();
        println!(
            "criterion {:>2} {} {} ({} checks, {:.1} s) {}",
            o.id,
            if passed { "PASS" } else { "FAIL" },
            o.title,
            o.reports.len(),
            o.elapsed.as_secs_f64(),
            worst
        );
        if !passed {
            failures += 1;
            for r in &o.reports {
                println!(
                    "    {} {}: measured {:.10e}, expected {:.10e}, tolerance {:e}; {}",
                    if r.passed { "ok  " } else { "FAIL" },
                    r.name,
                    r.measured,
                    r.expected,
                    r.tolerance,
                    r.detail
                );
            }
        }
    }
    println!("{} of {} criteria passed", outcomes.len() - failures, outcomes.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
