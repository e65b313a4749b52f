use vofl_core::oracles::build_table;
use vofl_core::spectral::{apply_vofl, relative_l2, solve_poisson, GaussianSource, RadialFunction};
use vofl_core::{log_grid, make_example1, make_example2, ExponentProfile, RadialField};

fn grid() -> Vec<f64> {
    log_grid(1e-2, 10.0, 200)
}

#[test]
fn nonnegative_sources_give_nonpositive_potentials() {
    let grid = grid();
    let sources: [Box<dyn RadialFunction>; 2] = [
        Box::new(GaussianSource::new(1.0, 1.0).unwrap()),
        Box::new(GaussianSource::new(0.3, 2.0).unwrap()),
    ];
    for profile in [make_example1(), make_example2()] {
        let table = build_table(&profile, grid[0], grid[grid.len() - 1], 10).unwrap();
        for src in &sources {
            let g = RadialField::sample(src.as_ref(), &grid).unwrap();
            let f = solve_poisson(&profile, &g, &table).unwrap();
            let worst = f.values().iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert!(worst <= 0.0, "{profile}: max f = {worst:e}");
        }
    }
}

#[test]
fn solver_is_linear() {
    let grid = grid();
    let profile = make_example1();
    let table = build_table(&profile, grid[0], grid[grid.len() - 1], 10).unwrap();
    let a = RadialField::sample(&GaussianSource::new(1.0, 1.0).unwrap(), &grid).unwrap();
    let b = RadialField::sample(&GaussianSource::new(0.5, 1.0).unwrap(), &grid).unwrap();
    let ab = a.combine(2.0, &b, -3.0).unwrap();
    let fa = solve_poisson(&profile, &a, &table).unwrap();
    let fb = solve_poisson(&profile, &b, &table).unwrap();
    let fab = solve_poisson(&profile, &ab, &table).unwrap();
    let sum = fa.combine(2.0, &fb, -3.0).unwrap();
    assert!(relative_l2(fab.values(), sum.values()) < 1e-8);
}

#[test]
fn constant_order_table_reproduces_the_power_symbol() {
    // for s = 1 the operator is −Δ, and −Δ e^{-r²/2} = (3 − r²) e^{-r²/2}
    let grid = grid();
    let profile = ExponentProfile::constant(1.0, 3);
    let table = build_table(&profile, grid[0], grid[grid.len() - 1], 10).unwrap();
    let f = RadialField::from_fn(&grid, |r| (-0.5 * r * r).exp()).unwrap();
    let lap = apply_vofl(&profile, &f, &table).unwrap();
    let exact: Vec<f64> = grid.iter().map(|r| (3.0 - r * r) * (-0.5 * r * r).exp()).collect();
    assert!(relative_l2(lap.values(), &exact) < 1e-4, "{}", relative_l2(lap.values(), &exact));
}
