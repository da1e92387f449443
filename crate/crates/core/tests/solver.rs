mod common;

use memriccati::discretization::Discretization;
use memriccati::newton::{iterate, solve, InitialGuess, NewtonSettings};
use memriccati::order::{OperatorKind, OrderSpec};
use memriccati::presets::Preset;
use memriccati::problem::{CoefficientSet, Grid, Problem};

use common::*;

#[test]
fn residual_is_small_at_the_solution() {
    let settings = NewtonSettings::with_eps(EPS);
    for preset in ALL_PRESETS {
        for kind in OperatorKind::BOTH {
            let problem = preset_problem(preset, kind, SMALL_GRID);
            let outcome = solve(&problem, &settings).unwrap();
            assert!(outcome.converged);
            let disc = Discretization::new(&problem).unwrap();
            let worst = disc
                .residual_vector(&outcome.solution.values)
                .iter()
                .fold(0.0f64, |m, f| m.max(f.abs()));
            assert!(worst <= 10.0 * EPS, "{preset} {kind}: {worst}");
        }
    }
}

#[test]
fn example1_saturates_near_minus_one() {
    let problem = Preset::Example1.default_problem(OperatorKind::LagTime).unwrap();
    let outcome = solve(&problem, &NewtonSettings::with_eps(EPS)).unwrap();
    let last = outcome.solution.last().unwrap();
    assert!((last + 1.0).abs() <= 0.05, "u(T) = {last}");
}

#[test]
fn zero_coefficients_converge_immediately() {
    for kind in OperatorKind::BOTH {
        for guess in [InitialGuess::Predictor, InitialGuess::Constant] {
            let grid = Grid::new(50.0, 10).unwrap();
            let problem =
                Problem::new(grid, CoefficientSet::constant(0.0, 0.0, 0.0), 2.0, OrderSpec::constant(kind, 0.5))
                    .unwrap();
            let outcome = solve(&problem, &NewtonSettings::with_eps(EPS).initial_guess(guess)).unwrap();
            assert!(outcome.iterations <= 2);
            assert!(outcome.solution.values.iter().all(|&u| u == 2.0));
        }
    }
}

#[test]
fn constant_guess_reports_exhausted_budget_without_error() {
    let problem = preset_problem(Preset::Example4, OperatorKind::LagTime, SMALL_GRID);
    let mut settings = NewtonSettings::with_eps(EPS).initial_guess(InitialGuess::Constant);
    settings.max_iterations = 3;
    let outcome = iterate(&problem, &settings).unwrap();
    assert_eq!(outcome.iterations, 3);
    assert!(!outcome.converged);
    assert!(solve(&problem, &settings).is_err());
}
