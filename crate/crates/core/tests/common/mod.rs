#![allow(dead_code)]

use memriccati::convergence::{run_study, ConvergenceReport, RefinementSchedule, StudyOptions};
use memriccati::discretization::Discretization;
use memriccati::newton::{solve, solve_linear, LinearBackend, LowerTriangular, NewtonSettings};
use memriccati::oracle::sequential_march;
use memriccati::order::{OperatorKind, OrderSpec, HALF_PI};
use memriccati::presets::{Preset, DEFAULT_HORIZON, DEFAULT_U0};
use memriccati::problem::{CoefficientSet, Grid, Problem};
use memriccati::special::gamma;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const SEED: u64 = 0x5eed_2024;
pub const EPS: f64 = 1e-4;
pub const SMALL_GRID: usize = 129;

pub const ALL_PRESETS: [Preset; 5] = [
    Preset::Example1,
    Preset::Example2,
    Preset::Example3,
    Preset::Example4,
    Preset::FigureVerify,
];

pub fn rng() -> StdRng {
    StdRng::seed_from_u64(SEED)
}

/// Largest relative deviation of `Γ(x+1) = xΓ(x)` over `samples` points in (0.1, 5).
pub fn gamma_recurrence_error(samples: usize) -> f64 {
    let mut rng = rng();
    (0..samples)
        .map(|_| {
            let x: f64 = rng.gen_range(0.1..5.0);
            let lhs = gamma(x + 1.0).unwrap();
            let rhs = x * gamma(x).unwrap();
            ((lhs - rhs) / lhs).abs()
        })
        .fold(0.0, f64::max)
}

/// `|ω_1 − 1/h|·h` and `max_{i>1} ω_i·h` at order `1 − 1e-9`.
pub fn backward_euler_gap(samples: usize) -> f64 {
    let mut rng = rng();
    let g = 1.0 - 1e-9;
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let h: f64 = rng.gen_range(0.01..1.0);
        let w1 = memriccati::discretization::l1_weight(1, g, h).unwrap();
        worst = worst.max((w1 * h - 1.0).abs());
        for i in 2..20 {
            worst = worst.max(memriccati::discretization::l1_weight(i, g, h).unwrap() * h);
        }
    }
    worst
}

pub fn random_problem(rng: &mut StdRng) -> Problem {
    let nodes = rng.gen_range(2..12);
    let horizon = rng.gen_range(0.5..10.0);
    let kind = if rng.gen_bool(0.5) {
        OperatorKind::CurrentTime
    } else {
        OperatorKind::LagTime
    };
    let order = if rng.gen_bool(0.5) {
        OrderSpec::constant(kind, rng.gen_range(0.05..0.95))
    } else {
        let delta = rng.gen_range(0.3..0.7);
        let theta = rng.gen_range(0.0..0.5);
        OrderSpec::periodic(kind, delta, theta, rng.gen_range(0.1..3.0))
    };
    let coeffs = if rng.gen_bool(0.5) {
        CoefficientSet::ramp()
    } else {
        CoefficientSet::constant(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        )
    };
    Problem::new(Grid::new(horizon, nodes).unwrap(), coeffs, rng.gen_range(-1.0..1.0), order).unwrap()
}

/// Worst relative gap between analytic Jacobian entries and central
/// differences of the residual (step 1e-6) over `count` random problems.
pub fn jacobian_fd_error(count: usize) -> f64 {
    let mut rng = rng();
    let step = 1e-6;
    let mut worst = 0.0f64;
    for _ in 0..count {
        let problem = random_problem(&mut rng);
        let disc = Discretization::new(&problem).unwrap();
        let n = disc.nodes();
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
        for row in 1..=n {
            for col in 1..=n {
                let mut up = u.clone();
                let mut down = u.clone();
                up[col - 1] += step;
                down[col - 1] -= step;
                let fd = (disc.residual(&up, row) - disc.residual(&down, row)) / (2.0 * step);
                let exact = disc.jacobian_entry(&u, row, col);
                worst = worst.max((exact - fd).abs() / exact.abs().max(1.0));
            }
        }
    }
    worst
}

pub fn preset_problem(preset: Preset, kind: OperatorKind, nodes: usize) -> Problem {
    preset.problem(kind, DEFAULT_HORIZON, nodes, DEFAULT_U0).unwrap()
}

/// `max |U_newton − U_march|` for each preset and operator.
pub fn newton_vs_march(nodes: usize) -> Vec<(Preset, OperatorKind, f64)> {
    let settings = NewtonSettings::with_eps(EPS);
    let mut out = Vec::new();
    for preset in ALL_PRESETS {
        for kind in OperatorKind::BOTH {
            let problem = preset_problem(preset, kind, nodes);
            let newton = solve(&problem, &settings).unwrap().solution;
            let march = sequential_march(&problem, 1e-12).unwrap();
            out.push((preset, kind, newton.max_abs_diff(&march).unwrap()));
        }
    }
    out
}

/// `max |U_gj − U_tri|` over all presets and operators.
pub fn backend_gap(nodes: usize) -> f64 {
    let tri = NewtonSettings::with_eps(EPS);
    let gj = tri.backend(LinearBackend::GaussJordan);
    let mut worst = 0.0f64;
    for preset in ALL_PRESETS {
        for kind in OperatorKind::BOTH {
            let problem = preset_problem(preset, kind, nodes);
            let a = solve(&problem, &tri).unwrap().solution;
            let b = solve(&problem, &gj).unwrap().solution;
            worst = worst.max(a.max_abs_diff(&b).unwrap());
        }
    }
    worst
}

pub fn random_lower_triangular(rng: &mut StdRng, n: usize) -> LowerTriangular {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|r| {
            (0..=r)
                .map(|c| {
                    if c == r {
                        let mag = rng.gen_range(0.5..4.0);
                        if rng.gen_bool(0.5) { mag } else { -mag }
                    } else {
                        rng.gen_range(-1.0..1.0)
                    }
                })
                .collect()
        })
        .collect();
    LowerTriangular::from_rows(&rows)
}

/// Worst `(backend gap, scaled residual)` over `count` random systems.
pub fn random_system_backend_errors(count: usize) -> (f64, f64) {
    let mut rng = rng();
    let (mut gap, mut residual) = (0.0f64, 0.0f64);
    for _ in 0..count {
        let n = rng.gen_range(1..40);
        let jac = random_lower_triangular(&mut rng, n);
        let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let norm = rhs.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
        let tri = solve_linear(&jac, &rhs, LinearBackend::TriangularSubstitution, 1e-14).unwrap();
        let gj = solve_linear(&jac, &rhs, LinearBackend::GaussJordan, 1e-14).unwrap();
        for (x, y) in tri.iter().zip(&gj) {
            gap = gap.max((x - y).abs() / x.abs().max(1.0));
        }
        for x in [&tri, &gj] {
            let jx = jac.mul_vec(x);
            let r = jx.iter().zip(&rhs).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            residual = residual.max(r / norm);
        }
    }
    (gap, residual)
}

pub fn study(preset: Preset, levels: usize) -> ConvergenceReport {
    let template = preset_problem(preset, OperatorKind::LagTime, SMALL_GRID);
    let schedule = RefinementSchedule::new(SMALL_GRID, levels).unwrap();
    run_study(
        &template,
        &schedule,
        &OperatorKind::BOTH,
        &NewtonSettings::with_eps(EPS),
        &StudyOptions::default(),
    )
    .unwrap()
}

/// Repeated solves and studies produce bitwise identical output.
pub fn deterministic() -> bool {
    let settings = NewtonSettings::with_eps(EPS);
    let solves_match = [Preset::Example3, Preset::Example4].iter().all(|&preset| {
        let p = preset_problem(preset, OperatorKind::LagTime, SMALL_GRID);
        let a = solve(&p, &settings).unwrap().solution.values;
        let b = solve(&p, &settings).unwrap().solution.values;
        a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits())
    });
    let bits = |r: &ConvergenceReport| -> Vec<u64> {
        OperatorKind::BOTH
            .iter()
            .flat_map(|&k| r.errors(k).into_iter().chain(r.orders(k)))
            .map(f64::to_bits)
            .collect()
    };
    solves_match && bits(&study(Preset::Example2, 3)) == bits(&study(Preset::Example2, 3))
}

pub fn periodic_example(kind: OperatorKind) -> OrderSpec {
    OrderSpec::periodic(kind, 0.5, 0.5, HALF_PI)
}
