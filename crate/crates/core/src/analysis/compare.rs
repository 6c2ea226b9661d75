use std::fmt::Write as _;

use serde::Serialize;

use super::steady::{
    detect_steady_state, intersect_windows, steady_errors, SteadyConfig, SteadyErrors, SteadyWindow,
};
use crate::sim::{EventRecord, LogRecord, RunLog, RunMeta, COLUMNS};
use crate::{Error, Result};

/// Relative improvement of error `a` over error `b`, percent:
/// (b - a) / max(a, b) * 100. Positive when `a` is smaller. Both zero gives 0.
pub fn lambda_compare(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == 0.0 {
        0.0
    } else {
        (b - a) / m * 100.0
    }
}

/// Steady-state metrics of one phase of a run. The vehicle counts as
/// steady where both speed and heading are.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseSummary {
    pub name: String,
    pub start: f64,
    pub end: f64,
    /// Errors over the steady windows, when there are any
    pub errors: Option<SteadyErrors>,
    pub windows: Vec<SteadyWindow>,
}

impl PhaseSummary {
    pub fn speed_error(&self) -> f64 {
        self.errors.map_or(f64::NAN, |e| e.speed_error)
    }

    pub fn percent_error(&self) -> f64 {
        self.errors.map_or(f64::NAN, |e| e.percent_error)
    }

    pub fn heading_error(&self) -> f64 {
        self.errors.map_or(f64::NAN, |e| e.heading_error)
    }

    pub fn steady_time(&self) -> f64 {
        self.windows.iter().map(SteadyWindow::duration).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FinalState {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub u: f64,
    pub v: f64,
    pub r: f64,
}

/// Ticks where the Lyapunov diagnostic rose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovCheck {
    /// Tick pairs examined (adapting, no event at the later tick)
    pub checked: usize,
    /// Rises larger than the tolerance
    pub violations: usize,
    /// Rises of any size while adaptation was paused
    pub paused_rises: usize,
    /// Largest rise relative to the earlier value
    pub worst_relative: f64,
    pub relative_tolerance: f64,
}

/// Compact description of a run, written next to its log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub meta: RunMeta,
    pub steady: SteadyConfig,
    pub events: Vec<EventRecord>,
    pub phases: Vec<PhaseSummary>,
    pub final_state: FinalState,
    pub max_speed: f64,
    pub saturated_ticks: usize,
    pub lyapunov: Option<LyapunovCheck>,
}

/// Phases split at the first event: "before" and "after", or a single
/// "run" phase when nothing happens.
fn phases(log: &RunLog, cfg: &SteadyConfig) -> Result<Vec<PhaseSummary>> {
    let t_end = log.records.last().map_or(0.0, |r| r.t);
    let closed_loop = log.records.iter().any(|r| r.u_d.is_finite());
    let (speed_w, heading_w) = if closed_loop {
        (
            detect_steady_state(log, "u", cfg.window, cfg.tolerance("u"), cfg.exclusion)?,
            detect_steady_state(log, "psi", cfg.window, cfg.tolerance("psi"), cfg.exclusion)?,
        )
    } else {
        (Vec::new(), Vec::new())
    };
    let bounds: Vec<(&str, f64, f64)> = match log.events().first() {
        Some(e) => vec![("before", 0.0, e.time), ("after", e.time, t_end + 1.0)],
        None => vec![("run", 0.0, t_end + 1.0)],
    };
    Ok(bounds
        .into_iter()
        .map(|(name, start, end)| {
            let windows = intersect_windows(log, &speed_w, &heading_w, start, end);
            PhaseSummary {
                name: name.to_string(),
                start,
                end: end.min(t_end),
                errors: steady_errors(log, &windows, None).ok(),
                windows,
            }
        })
        .collect())
}

/// Check that the Lyapunov diagnostic never rises by more than
/// `relative_tolerance` of its value between adapting ticks.
pub fn lyapunov_check(log: &RunLog, relative_tolerance: f64) -> Option<LyapunovCheck> {
    if !log.records.iter().any(|r| r.lyapunov.is_finite()) {
        return None;
    }
    let mut check = LyapunovCheck {
        checked: 0,
        violations: 0,
        paused_rises: 0,
        worst_relative: 0.0,
        relative_tolerance,
    };
    for w in log.records.windows(2) {
        let (a, b): (&LogRecord, &LogRecord) = (&w[0], &w[1]);
        if b.has_event() || !a.lyapunov.is_finite() || !b.lyapunov.is_finite() {
            continue;
        }
        let rise = b.lyapunov - a.lyapunov;
        if !a.adapting {
            if rise > 0.0 {
                check.paused_rises += 1;
            }
            continue;
        }
        check.checked += 1;
        let rel = rise / a.lyapunov.abs().max(f64::MIN_POSITIVE);
        check.worst_relative = check.worst_relative.max(rel);
        if rel > relative_tolerance {
            check.violations += 1;
        }
    }
    Some(check)
}

/// Summary of a run. The Lyapunov tolerance is the squared tick.
pub fn summarize(log: &RunLog, cfg: &SteadyConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let last = log
        .records
        .last()
        .ok_or_else(|| Error::Analysis("empty log".into()))?;
    let tick = match log.records.as_slice() {
        [a, b, ..] => b.t - a.t,
        _ => 0.0,
    };
    Ok(RunSummary {
        meta: log.meta.clone(),
        steady: *cfg,
        events: log.events(),
        phases: phases(log, cfg)?,
        final_state: FinalState {
            t: last.t,
            x: last.x,
            y: last.y,
            psi: last.psi,
            u: last.u,
            v: last.v,
            r: last.r,
        },
        max_speed: log
            .records
            .iter()
            .map(|r| r.u)
            .fold(f64::NEG_INFINITY, f64::max),
        saturated_ticks: log.records.iter().filter(|r| r.saturated).count(),
        lyapunov: lyapunov_check(log, tick * tick),
    })
}

/// One row of a controller comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub metric: String,
    pub unit: String,
    pub value_a: f64,
    pub value_b: f64,
    /// Percent by which A beats B (negative when B is better)
    pub lambda: f64,
    pub winner: String,
}

/// Side-by-side steady-state metrics of two runs of the same scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub scenario: String,
    pub label_a: String,
    pub label_b: String,
    pub event_time: Option<f64>,
    pub rows: Vec<ComparisonReport>,
}

impl Comparison {
    /// Row by metric name.
    pub fn row(&self, metric: &str) -> Option<&ComparisonReport> {
        self.rows.iter().find(|r| r.metric == metric)
    }

    /// Plain-text table, one metric per line.
    pub fn to_table(&self) -> String {
        let width = self
            .rows
            .iter()
            .map(|r| r.metric.len() + r.unit.len() + 4)
            .max()
            .unwrap_or(10)
            .max(11);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<width$} {:>10} {:>10} {:>9}  winner",
            "Controller:", self.label_a, self.label_b, "lambda"
        );
        for r in &self.rows {
            let name = format!("{} ({}):", r.metric, r.unit);
            let _ = writeln!(
                out,
                "{:<width$} {:>10.4} {:>10.4} {:>8.1}%  {}",
                name, r.value_a, r.value_b, r.lambda, r.winner
            );
        }
        out
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Compare two logs of the same scenario, rows in the order: speed error
/// and percent error per phase, then heading error per phase.
pub fn compare_controllers(a: &RunLog, b: &RunLog, cfg: &SteadyConfig) -> Result<Comparison> {
    if a.meta.scenario_hash != b.meta.scenario_hash {
        return Err(Error::Incompatible(format!(
            "scenario hashes differ ({} vs {})",
            a.meta.scenario_hash, b.meta.scenario_hash
        )));
    }
    if a.meta.config_hash != b.meta.config_hash {
        return Err(Error::Incompatible("vessel configurations differ".into()));
    }
    let ea = a.events();
    let eb = b.events();
    if ea.len() != eb.len()
        || ea
            .iter()
            .zip(&eb)
            .any(|(x, y)| (x.time - y.time).abs() > 1e-9 || x.label != y.label)
    {
        return Err(Error::Incompatible("event timelines differ".into()));
    }
    let sa = summarize(a, cfg)?;
    let sb = summarize(b, cfg)?;
    let label = |s: &RunSummary, fallback: &str| {
        if s.meta.controller.is_empty() {
            fallback.to_string()
        } else {
            s.meta.controller.clone()
        }
    };
    let label_a = label(&sa, "A");
    let label_b = label(&sb, "B");

    let mut rows = Vec::new();
    let mut push = |metric: String, unit: &str, va: f64, vb: f64| {
        let lambda = lambda_compare(va, vb);
        let winner = if lambda.is_nan() {
            "n/a".to_string()
        } else if lambda > 0.0 {
            label_a.clone()
        } else if lambda < 0.0 {
            label_b.clone()
        } else {
            "tie".to_string()
        };
        rows.push(ComparisonReport {
            metric,
            unit: unit.to_string(),
            value_a: va,
            value_b: vb,
            lambda,
            winner,
        });
    };
    let pairs: Vec<_> = sa.phases.iter().zip(&sb.phases).collect();
    let suffix = |name: &str| {
        if name == "run" {
            String::new()
        } else {
            format!(" {name}")
        }
    };
    for (pa, pb) in &pairs {
        let s = suffix(&pa.name);
        push(
            format!("speed error{s}"),
            "m/s",
            pa.speed_error(),
            pb.speed_error(),
        );
        push(
            format!("percent error{s}"),
            "%",
            pa.percent_error(),
            pb.percent_error(),
        );
    }
    for (pa, pb) in &pairs {
        let s = suffix(&pa.name);
        push(
            format!("heading error{s}"),
            "deg",
            pa.heading_error(),
            pb.heading_error(),
        );
    }
    Ok(Comparison {
        scenario: a.meta.scenario.clone(),
        label_a,
        label_b,
        event_time: ea.first().map(|e| e.time),
        rows,
    })
}

/// One sample of one channel, for external plotting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TidyRow {
    pub t: f64,
    pub channel: String,
    pub value: f64,
}

/// Long-format samples of the named numeric channels (all when empty).
pub fn tidy_channels(log: &RunLog, channels: &[&str]) -> Result<Vec<TidyRow>> {
    let names: Vec<&str> = if channels.is_empty() {
        COLUMNS
            .iter()
            .copied()
            .filter(|c| *c != "t" && log.channel(c).is_some())
            .collect()
    } else {
        channels.to_vec()
    };
    let mut series = Vec::with_capacity(names.len());
    for name in &names {
        let values = log
            .channel(name)
            .ok_or_else(|| Error::Analysis(format!("unknown channel '{name}'")))?;
        series.push((*name, values));
    }
    let mut rows = Vec::with_capacity(series.len() * log.len());
    for (k, rec) in log.records.iter().enumerate() {
        for (name, values) in &series {
            rows.push(TidyRow {
                t: rec.t,
                channel: name.to_string(),
                value: values[k],
            });
        }
    }
    Ok(rows)
}
