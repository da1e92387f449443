use std::path::Path;
use std::process::{Command, Output};

use memriccati::cli::output::parse_solution_csv;
use memriccati::cli::{parse_config_with_env, run, CliError, PresetChoice};
use memriccati::order::OrderForm;
use memriccati::presets::Preset;

fn binary(args: &[&str], out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_memriccati"));
    cmd.args(args).env_remove("MEMRICCATI_OUT");
    if let Some(dir) = out {
        cmd.env("MEMRICCATI_OUT", dir);
    }
    cmd.output().unwrap()
}

fn parse(args: &[&str]) -> Result<memriccati::cli::RunConfig, CliError> {
    let argv = std::iter::once("memriccati").chain(args.iter().copied());
    parse_config_with_env(argv, None)
}

#[test]
fn no_arguments_is_a_usage_error() {
    let out = binary(&[], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_exits_cleanly() {
    let out = binary(&["--help"], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("study"));
}

#[test]
fn preset_parameters_are_resolved() {
    let config = parse(&["solve", "--preset", "example2"]).unwrap();
    assert_eq!(config.preset, PresetChoice::Named(Preset::Example2));
    match config.order.form {
        OrderForm::Periodic { delta, theta, mu } => {
            assert_eq!((delta, theta), (0.75, 0.5));
            assert!((mu - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        }
        other => panic!("unexpected order {other:?}"),
    }
    assert_eq!(config.horizon, 50.0);
    assert_eq!(config.nodes, 2000);
    assert_eq!(parse(&["study", "--preset", "example2"]).unwrap().nodes, 129);
}

#[test]
fn preset_model_cannot_be_overridden() {
    let err = parse(&["solve", "--preset", "example1", "--delta", "0.3"]).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("--delta"));
    let out = binary(&["solve", "--preset", "example1", "--delta", "0.3"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn order_violation_reports_argument() {
    let err = parse(&[
        "solve", "--preset", "custom", "--delta", "0.1", "--theta", "0.5", "--mu", "1", "--N", "200",
    ])
    .unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("at argument"), "{err}");
}

#[test]
fn zero_coefficients_keep_initial_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = binary(
        &[
            "solve", "--preset", "custom", "--variant", "gamma", "--a", "0", "--b", "0", "--c", "0",
            "--N", "10", "--u0", "2", "--order", "0.5", "--out-dir",
        ]
        .iter()
        .copied()
        .chain([dir.path().to_str().unwrap()])
        .collect::<Vec<_>>(),
        None,
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("solve_custom_gamma.csv")).unwrap();
    let rows = parse_solution_csv(&text).unwrap();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|&(_, u)| u == 2.0));
    assert_eq!(rows.last().unwrap().0, 50.0);
}

#[test]
fn output_directory_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = binary(&["solve", "--preset", "example3", "--N", "20"], Some(dir.path()));
    assert_eq!(out.status.code(), Some(0));
    for kind in ["alpha", "gamma"] {
        assert!(dir.path().join(format!("solve_example3_{kind}.csv")).exists());
    }
}

#[test]
fn config_file_fills_unset_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "preset = \"example4\"\nN = 33\nT = 20.0\neps = 1e-6\n").unwrap();
    let config = parse(&["solve", "--config", path.to_str().unwrap(), "--N", "40"]).unwrap();
    assert_eq!(config.preset, PresetChoice::Named(Preset::Example4));
    assert_eq!(config.nodes, 40);
    assert_eq!(config.horizon, 20.0);
    assert_eq!(config.settings.eps, 1e-6);
}

#[test]
fn config_file_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "preset = \"example1\"\nsteps = 12\n").unwrap();
    let err = parse(&["solve", "--config", path.to_str().unwrap()]).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn missing_config_file_is_an_io_error() {
    let err = parse(&["solve", "--config", "/nonexistent/run.toml"]).unwrap_err();
    assert_eq!(err.exit_code(), 4);
}

#[test]
fn solution_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = parse(&["solve", "--preset", "example2", "--N", "64", "--variant", "alpha"]).unwrap();
    config.out_dir = dir.path().to_path_buf();
    let summary = run(&config).unwrap();
    let first = std::fs::read_to_string(&summary.files[0]).unwrap();

    let problem = config.problem(memriccati::order::OperatorKind::CurrentTime, 64).unwrap();
    let solution = memriccati::newton::solve(&problem, &config.settings).unwrap().solution;
    let rows = parse_solution_csv(&first).unwrap();
    for ((t, u), (t0, u0)) in rows.iter().zip(solution.times.iter().zip(&solution.values)) {
        assert_eq!(t.to_bits(), t0.to_bits());
        assert_eq!(u.to_bits(), u0.to_bits());
    }

    run(&config).unwrap();
    let second = std::fs::read_to_string(&summary.files[0]).unwrap();
    assert_eq!(first, second);
}

#[test]
fn study_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = parse(&["study", "--preset", "example1", "--levels", "2", "--N", "33"]).unwrap();
    config.out_dir = dir.path().to_path_buf();
    let summary = run(&config).unwrap();
    let text = std::fs::read_to_string(dir.path().join("study_example1.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,h,eps_alpha,p_alpha,eps_gamma,p_gamma");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("33,"));
    assert!(lines[2].starts_with("67,"));
    assert_eq!(summary.lines.len(), 2);
}
