use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use usvsim::analysis::{
    compare_controllers, fit_drag_quadratic, fit_thrust_curve, fit_tow_drag, summarize,
    tidy_channels, SteadyConfig,
};
use usvsim::config::VesselConfig;
use usvsim::control::ControllerKind;
use usvsim::model::{coefficient_table, ConditionLabel, LoadedVessel};
use usvsim::propulsion::{calibrate_thrust_decay, ThrusterKind};
use usvsim::sim::{
    builtin, run_scenario_with, ControlSpec, RunLog, ScenarioSpec, BUILTIN_SCENARIOS, TOOL_VERSION,
};

use crate::failure::Failure;
use crate::{
    CompareArgs, ControllerArg, DeriveArgs, FitArgs, FitModel, Format, PlotArgs, RunArgs,
    ScenarioArgs, SteadyArgs, TableFormat, ThrusterArg,
};

type Outcome = Result<(), Failure>;

impl From<ControllerArg> for ControllerKind {
    fn from(c: ControllerArg) -> Self {
        match c {
            ControllerArg::Bs => ControllerKind::Backstepping,
            ControllerArg::Abs => ControllerKind::AdaptiveBackstepping,
        }
    }
}

impl SteadyArgs {
    fn config(&self) -> Result<SteadyConfig, Failure> {
        let cfg = SteadyConfig {
            window: self.window,
            speed_tol: self.speed_tol,
            heading_tol_deg: self.heading_tol,
            exclusion: self.exclusion,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn load_vessel(path: Option<&Path>) -> Result<VesselConfig, Failure> {
    match path {
        Some(p) => VesselConfig::load(p).map_err(Failure::from),
        None => Ok(VesselConfig::default()),
    }
}

fn parse_condition(label: &str) -> Result<ConditionLabel, Failure> {
    label.parse::<ConditionLabel>().map_err(Failure::from)
}

fn write_file(path: &Path, contents: &str) -> Outcome {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::runtime(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, contents: &str) -> Outcome {
    match out {
        Some(p) => write_file(p, contents),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(contents.as_bytes()) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => Ok(other?),
            }
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

struct Job {
    label: String,
    spec: ScenarioSpec,
}

fn scenario_jobs(args: &RunArgs) -> Result<Vec<Job>, Failure> {
    let mut jobs = Vec::new();
    let mut problems = Vec::new();
    let mut controllers: Vec<ControllerKind> = Vec::new();
    for c in &args.controller {
        let kind = ControllerKind::from(*c);
        if !controllers.contains(&kind) {
            controllers.push(kind);
        }
    }
    for source in &args.scenarios {
        let (stem, base) = if BUILTIN_SCENARIOS.contains(&source.as_str()) {
            (
                source.clone(),
                builtin(source, ControllerKind::Backstepping)?,
            )
        } else {
            let path = Path::new(source);
            if !path.exists() {
                problems.push(format!(
                    "'{source}' is neither a builtin scenario ({}) nor a file",
                    BUILTIN_SCENARIOS.join(", ")
                ));
                continue;
            }
            let spec = ScenarioSpec::load(path).map_err(|e| Failure::from(e).context(source))?;
            let stem = path
                .file_stem()
                .map_or(spec.name.clone(), |s| s.to_string_lossy().into_owned());
            (stem, spec)
        };
        let kinds: Vec<Option<ControllerKind>> = match &base.control {
            ControlSpec::OpenLoop { .. } => vec![None],
            ControlSpec::Closed { .. } => controllers.iter().copied().map(Some).collect(),
        };
        for kind in kinds {
            let mut spec = base.clone();
            if let (Some(k), ControlSpec::Closed { controller, .. }) = (kind, &mut spec.control) {
                *controller = k;
            }
            if let Some(t) = args.thruster {
                spec.thruster.kind = match t {
                    ThrusterArg::Bollard => ThrusterKind::BollardLinear,
                    ThrusterArg::Pump => ThrusterKind::PumpAnalog,
                };
            }
            if let Some(dt) = args.dt {
                spec.dt = dt;
            }
            if let Some(seed) = args.seed {
                spec.seed = seed;
            }
            if let Some(d) = args.duration {
                spec.duration = d;
            }
            let suffix = spec
                .control
                .controller()
                .map_or("open_loop", |k| k.as_str());
            jobs.push(Job {
                label: format!("{stem}-{suffix}"),
                spec,
            });
        }
    }
    for (i, job) in jobs.iter().enumerate() {
        if jobs[..i].iter().any(|j| j.label == job.label) {
            problems.push(format!("run '{}' requested twice", job.label));
        }
    }
    if problems.is_empty() {
        Ok(jobs)
    } else {
        Err(Failure::validation("invalid run request", problems))
    }
}

pub fn run(args: RunArgs) -> Outcome {
    if args.jobs == 0 {
        return Err(Failure::validation("--jobs must be at least 1", Vec::new()));
    }
    let steady = args.steady.config()?;
    let vessel = load_vessel(args.config.as_deref())?;
    let jobs = scenario_jobs(&args)?;

    let mut problems = Vec::new();
    for job in &jobs {
        problems.extend(
            job.spec
                .problems(&vessel)
                .into_iter()
                .map(|p| format!("{}: {p}", job.label)),
        );
    }
    if !problems.is_empty() {
        return Err(Failure::validation("invalid scenario", problems));
    }
    for job in &jobs {
        for w in job.spec.warnings() {
            eprintln!("warning: {}: {w}", job.label);
        }
    }
    if args.out.exists() && !args.out.is_dir() {
        return Err(Failure::validation(
            format!("{} exists and is not a directory", args.out.display()),
            Vec::new(),
        ));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| Failure::runtime(e.to_string()))?;
    let results: Vec<Result<RunLog, Failure>> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                run_scenario_with(&job.spec, &vessel)
                    .map_err(|e| Failure::from(e).context(&job.label))
            })
            .collect()
    });
    let mut logs = Vec::with_capacity(results.len());
    for r in results {
        logs.push(r?);
    }

    for (job, log) in jobs.iter().zip(&logs) {
        let dir = args.out.join(&job.label);
        if args.format.contains(&Format::Csv) {
            write_file(&dir.join("log.csv"), &log.to_csv_string())?;
        }
        if args.format.contains(&Format::Json) {
            let summary = summarize(log, &steady)?;
            write_file(&dir.join("summary.json"), &to_json(&summary))?;
        }
        write_file(&dir.join("scenario.toml"), &job.spec.to_toml())?;
        println!("{}", dir.display());
    }
    Ok(())
}

#[derive(Serialize)]
struct CompareOutput<'a> {
    tool_version: &'a str,
    log_a: &'a usvsim::sim::RunMeta,
    log_b: &'a usvsim::sim::RunMeta,
    steady: SteadyConfig,
    comparison: &'a usvsim::analysis::Comparison,
}

fn load_log(path: &Path) -> Result<RunLog, Failure> {
    RunLog::load_csv(path).map_err(|e| Failure::from(e).context(&path.display().to_string()))
}

pub fn compare(args: CompareArgs) -> Outcome {
    let steady = args.steady.config()?;
    let a = load_log(&args.log_a)?;
    let b = load_log(&args.log_b)?;
    let cmp = compare_controllers(&a, &b, &steady)?;
    if let Some(dir) = &args.out {
        write_file(&dir.join("comparison.csv"), &cmp.to_csv()?)?;
        let out = CompareOutput {
            tool_version: TOOL_VERSION,
            log_a: &a.meta,
            log_b: &b.meta,
            steady,
            comparison: &cmp,
        };
        write_file(&dir.join("comparison.json"), &to_json(&out))?;
    }
    print!("{}", cmp.to_table());
    Ok(())
}

fn read_points(path: &Path, width: usize) -> Result<Vec<Vec<f64>>, Failure> {
    let bad = |line: usize, msg: String| {
        Failure::from(usvsim::Error::Parse { line, message: msg })
            .context(&path.display().to_string())
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Failure::validation(format!("{}: {e}", path.display()), Vec::new()))?;
    let mut rows = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(k + 1, e.to_string()))?;
        let line = record.position().map_or(k + 1, |p| p.line() as usize);
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) if v.len() == width => rows.push(v),
            Ok(v) => {
                return Err(bad(
                    line,
                    format!("expected {width} columns, got {}", v.len()),
                ));
            }
            Err(_) if rows.is_empty() && k == 0 => continue,
            Err(e) => return Err(bad(line, e.to_string())),
        }
    }
    Ok(rows)
}

#[derive(Serialize)]
struct FitReport {
    tool_version: &'static str,
    model: &'static str,
    #[serde(flatten)]
    values: serde_json::Value,
}

fn fit_guidance(e: usvsim::Error) -> Failure {
    let mut f = Failure::validation(e.to_string(), Vec::new());
    f.problems
        .push("collect samples at three or more distinct speeds".into());
    f
}

pub fn fit(args: FitArgs) -> Outcome {
    let vessel = load_vessel(args.config.as_deref())?;
    let label = parse_condition(&args.condition)?;
    let (model, values) = match args.model {
        FitModel::SurgeDrag => {
            let path = args.points.as_deref().ok_or_else(|| {
                Failure::validation("surge-drag needs a CSV of (u, force) points", Vec::new())
            })?;
            let pts: Vec<(f64, f64)> = read_points(path, 2)?.iter().map(|r| (r[0], r[1])).collect();
            let fit = fit_drag_quadratic(&pts).map_err(fit_guidance)?;
            if let Some(frag) = &args.fragment {
                let mut cond = vessel.condition(label);
                cond.surge_drag = usvsim::model::SurgeDrag::new(fit.linear, fit.quadratic);
                let cfg = VesselConfig {
                    conditions: vec![cond],
                    ..vessel.clone()
                };
                let text = format!(
                    "# usvsim {TOOL_VERSION} fitted surge drag, base config={}\n{}",
                    vessel.hash(),
                    toml::to_string(&cfg).expect("config serializes")
                );
                write_file(frag, &text)?;
            }
            (
                "surge_drag",
                serde_json::to_value(fit).expect("serializable"),
            )
        }
        FitModel::TowDrag => {
            let path = args.points.as_deref().ok_or_else(|| {
                Failure::validation("tow-drag needs a CSV of (u, force) points", Vec::new())
            })?;
            let pts: Vec<(f64, f64)> = read_points(path, 2)?.iter().map(|r| (r[0], r[1])).collect();
            let fit =
                fit_tow_drag(&pts).map_err(|e| Failure::validation(e.to_string(), Vec::new()))?;
            for k in &fit.out_of_range {
                eprintln!(
                    "warning: point {} at {} m/s lies outside the measured {}-{} m/s range",
                    k + 1,
                    pts[*k].0,
                    fit.valid_range.0,
                    fit.valid_range.1
                );
            }
            ("tow_drag", serde_json::to_value(fit).expect("serializable"))
        }
        FitModel::ThrustDecay => match args.points.as_deref() {
            Some(path) => {
                let pts: Vec<(f64, f64, f64)> = read_points(path, 3)?
                    .iter()
                    .map(|r| (r[0], r[1], r[2]))
                    .collect();
                let fit = fit_thrust_curve(&pts).map_err(fit_guidance)?;
                (
                    "thrust_curve",
                    serde_json::to_value(fit).expect("serializable"),
                )
            }
            None => {
                let cond = vessel.condition(label);
                let top = args.top_speed.or(cond.top_speed).ok_or_else(|| {
                    Failure::validation(
                        format!("no top speed for {label}; pass --top-speed"),
                        Vec::new(),
                    )
                })?;
                let per_jet = calibrate_thrust_decay(args.bollard, top, &cond)
                    .map_err(|e| Failure::validation(e.to_string(), Vec::new()))?;
                (
                    "thrust_decay",
                    serde_json::json!({
                        "condition": label.as_str(),
                        "bollard_total": args.bollard,
                        "top_speed": top,
                        "a1_total": 2.0 * per_jet,
                        "a1_per_jet": per_jet,
                        "drag_at_top_speed": cond.surge_drag.force(top),
                    }),
                )
            }
        },
    };
    let report = FitReport {
        tool_version: TOOL_VERSION,
        model,
        values,
    };
    if args.json {
        print!("{}", to_json(&report));
    } else {
        println!("model = {model}");
        if let serde_json::Value::Object(map) = &report.values {
            for (k, v) in map {
                println!("{k} = {v}");
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct CoeffOutput<'a> {
    tool_version: &'static str,
    config: String,
    condition: &'static str,
    nu: [f64; 3],
    mass: f64,
    yaw_inertia: f64,
    draft: f64,
    rows: &'a [usvsim::model::CoefficientRow],
}

pub fn derive_coeffs(args: DeriveArgs) -> Outcome {
    let vessel = load_vessel(args.config.as_deref())?;
    let label = parse_condition(&args.condition)?;
    let [u, v, r] = args.nu[..] else {
        return Err(Failure::validation(
            format!("--nu needs three values u,v,r, got {}", args.nu.len()),
            Vec::new(),
        ));
    };
    let nu = [u, v, r];
    if !nu.iter().all(|v| v.is_finite()) {
        return Err(Failure::validation(
            "reference velocity must be finite",
            Vec::new(),
        ));
    }
    let cond = vessel.condition(label);
    let loaded = LoadedVessel::new(vessel.geometry, cond, vessel.model)?;
    let rows = coefficient_table(&vessel.geometry, &cond, nu, &vessel.model)?;
    let at_rest = nu[0].hypot(nu[1]) == 0.0;
    let note = |velocity_dependent: bool| {
        if velocity_dependent && at_rest {
            "velocity-dependent"
        } else {
            ""
        }
    };
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    let text = match args.format {
        TableFormat::Json => to_json(&CoeffOutput {
            tool_version: TOOL_VERSION,
            config: vessel.hash(),
            condition: label.as_str(),
            nu,
            mass: cond.mass,
            yaw_inertia: loaded.yaw_inertia,
            draft: loaded.draft,
            rows: &rows,
        }),
        TableFormat::Csv => {
            let mut s = format!(
                "# usvsim {TOOL_VERSION} config={} condition={label} nu={},{},{}\n",
                vessel.hash(),
                nu[0],
                nu[1],
                nu[2]
            );
            s.push_str("name,factor,term,value,unit,note\n");
            s.push_str(&format!("mass,,,{},kg,\n", cond.mass));
            s.push_str(&format!("I_z,,,{},kg m^2,\n", loaded.yaw_inertia));
            s.push_str(&format!("draft,,,{},m,\n", loaded.draft));
            for r in &rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.name,
                    opt(r.factor),
                    opt(r.term),
                    r.value,
                    r.unit,
                    note(r.velocity_dependent)
                ));
            }
            s
        }
        TableFormat::Table => {
            let mut s = format!(
                "# usvsim {TOOL_VERSION} config={} condition={label} nu=({}, {}, {})\n",
                vessel.hash(),
                nu[0],
                nu[1],
                nu[2]
            );
            s.push_str(&format!(
                "{:<9} {:>10} {:>14} {:>14}  {}\n",
                "name", "factor", "term", "value", "unit"
            ));
            s.push_str(&format!(
                "{:<9} {:>10} {:>14} {:>14.4}  kg\n",
                "mass", "", "", cond.mass
            ));
            s.push_str(&format!(
                "{:<9} {:>10} {:>14} {:>14.4}  kg m^2\n",
                "I_z", "", "", loaded.yaw_inertia
            ));
            s.push_str(&format!(
                "{:<9} {:>10} {:>14} {:>14.4}  m\n",
                "draft", "", "", loaded.draft
            ));
            for r in &rows {
                let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4}"));
                s.push_str(
                    format!(
                        "{:<9} {:>10} {:>14} {:>14.4}  {:<10} {}",
                        r.name,
                        fmt(r.factor),
                        fmt(r.term),
                        r.value,
                        r.unit,
                        note(r.velocity_dependent)
                    )
                    .trim_end(),
                );
                s.push('\n');
            }
            s
        }
    };
    emit(args.out.as_deref(), &text)
}

pub fn plot_data(args: PlotArgs) -> Outcome {
    let log = load_log(&args.log)?;
    let names: Vec<&str> = args.channels.iter().map(String::as_str).collect();
    let rows =
        tidy_channels(&log, &names).map_err(|e| Failure::validation(e.to_string(), Vec::new()))?;
    let mut text = format!(
        "# usvsim {TOOL_VERSION} scenario={} scenario_hash={} config={} controller={}\nt,channel,value\n",
        log.meta.scenario, log.meta.scenario_hash, log.meta.config_hash, log.meta.controller
    );
    for r in rows {
        text.push_str(&format!("{},{},{}\n", r.t, r.channel, r.value));
    }
    emit(args.out.as_deref(), &text)
}

pub fn scenario(args: ScenarioArgs) -> Outcome {
    let spec = builtin(&args.name, args.controller.into())?;
    print!("{}", spec.to_toml());
    Ok(())
}
