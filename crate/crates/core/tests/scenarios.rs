use usvsim::analysis::{compare_controllers, summarize, SteadyConfig};
use usvsim::control::ControllerKind;
use usvsim::model::ConditionLabel;
use usvsim::sim::{builtin, run_scenario, RunLog, ScenarioSpec, BUILTIN_SCENARIOS};
use usvsim::Error;

#[test]
fn every_builtin_runs_and_roundtrips_toml() {
    for name in BUILTIN_SCENARIOS {
        let spec = builtin(name, ControllerKind::AdaptiveBackstepping).unwrap();
        let back = ScenarioSpec::from_toml_str(&spec.to_toml()).unwrap();
        assert_eq!(back, spec, "{name}");
        let log = run_scenario(&spec).unwrap();
        assert_eq!(log.len(), spec.tick_count() + 1);
        assert!(log
            .records
            .iter()
            .all(|r| r.u.is_finite() && r.psi.is_finite()));
    }
}

#[test]
fn unknown_builtin_is_config_error() {
    assert!(matches!(
        builtin("nope", ControllerKind::Backstepping),
        Err(Error::Config(_))
    ));
}

#[test]
fn csv_roundtrip_preserves_log() {
    let mut spec = builtin("variable-mass", ControllerKind::AdaptiveBackstepping).unwrap();
    spec.duration = 90.0;
    let log = run_scenario(&spec).unwrap();
    let text = log.to_csv_string();
    let back = RunLog::read_csv(text.as_bytes()).unwrap();
    assert_eq!(back.meta, log.meta);
    assert_eq!(back.to_csv_string(), text);
    assert_eq!(back.events().len(), 1);
}

#[test]
fn truncated_csv_reports_line() {
    let mut spec = builtin("acceleration", ControllerKind::Backstepping).unwrap();
    spec.duration = 1.0;
    let text = run_scenario(&spec).unwrap().to_csv_string();
    let mut lines: Vec<&str> = text.lines().collect();
    let cut = lines.len() - 3;
    let broken = lines[cut].split(',').take(4).collect::<Vec<_>>().join(",");
    lines[cut] = &broken;
    let err = RunLog::read_csv(lines.join("\n").as_bytes()).unwrap_err();
    match err {
        Error::Parse { line, .. } => assert_eq!(line, cut + 1),
        other => panic!("{other:?}"),
    }
}

#[test]
fn abs_beats_bs_after_mass_drop() {
    let run = |k| run_scenario(&builtin("variable-mass", k).unwrap()).unwrap();
    let abs = run(ControllerKind::AdaptiveBackstepping);
    let bs = run(ControllerKind::Backstepping);
    let cmp = compare_controllers(&abs, &bs, &SteadyConfig::default()).unwrap();
    let after = cmp.row("speed error after").unwrap();
    assert!(after.value_a < after.value_b);
    assert!(after.lambda > 30.0);
    assert_eq!(cmp.rows.len(), 6);
}

#[test]
fn different_scenarios_are_incompatible() {
    let mut a = builtin("variable-drag", ControllerKind::Backstepping).unwrap();
    a.duration = 60.0;
    let mut b = a.clone();
    b.condition = ConditionLabel::Full;
    let (a, b) = (run_scenario(&a).unwrap(), run_scenario(&b).unwrap());
    assert!(matches!(
        compare_controllers(&a, &b, &SteadyConfig::default()),
        Err(Error::Incompatible(_))
    ));
}

#[test]
fn setpoint_summary_has_two_phases() {
    let log =
        run_scenario(&builtin("setpoint", ControllerKind::AdaptiveBackstepping).unwrap()).unwrap();
    let s = summarize(&log, &SteadyConfig::default()).unwrap();
    let names: Vec<_> = s.phases.iter().map(|p| p.name.as_str()).collect();
    assert_eq!(names, ["before", "after"]);
    assert!(s.phases[1].speed_error() < 0.2);
    assert_eq!(s.lyapunov.unwrap().violations, 0);
}

#[test]
fn invalid_scenario_lists_problems() {
    let mut spec = builtin("acceleration", ControllerKind::Backstepping).unwrap();
    spec.dt = -1.0;
    spec.duration = f64::NAN;
    let problems = spec.problems(&Default::default());
    assert!(problems.len() >= 2, "{problems:?}");
    assert!(run_scenario(&spec).is_err());
}
