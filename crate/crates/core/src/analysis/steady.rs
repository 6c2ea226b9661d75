use serde::{Deserialize, Serialize};

use crate::sim::RunLog;
use crate::{wrap_angle, Error, Result};

const TIME_EPS: f64 = 1e-9;

/// Rules for what counts as steady state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SteadyConfig {
    /// Rolling window length, s
    pub window: f64,
    /// Largest speed standard deviation inside a steady window, m/s
    pub speed_tol: f64,
    /// Largest heading standard deviation inside a steady window, deg
    pub heading_tol_deg: f64,
    /// Time after each event that is never steady, s
    pub exclusion: f64,
}

impl Default for SteadyConfig {
    fn default() -> Self {
        Self {
            window: 10.0,
            speed_tol: 0.02,
            heading_tol_deg: 0.5,
            exclusion: 5.0,
        }
    }
}

impl SteadyConfig {
    /// Tolerance for a channel in its own units (radians for angles).
    pub fn tolerance(&self, channel: &str) -> f64 {
        if is_angle(channel) {
            self.heading_tol_deg.to_radians()
        } else {
            self.speed_tol
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.window > 0.0
            && self.speed_tol > 0.0
            && self.heading_tol_deg > 0.0
            && self.exclusion >= 0.0
            && [
                self.window,
                self.speed_tol,
                self.heading_tol_deg,
                self.exclusion,
            ]
            .iter()
            .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "invalid steady-state rules {self:?}"
            )))
        }
    }
}

/// A maximal steady interval of one channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteadyWindow {
    pub start: f64,
    pub end: f64,
    /// Mean |u - u_d| over the window, m/s
    pub mean_u_error: f64,
    /// Mean |psi - psi_d| over the window, deg
    pub mean_psi_error: f64,
    /// Standard deviation of u over the window, m/s
    pub std_u: f64,
    /// Event exclusion zones that were cut out of the log
    pub excluded: Vec<(f64, f64)>,
}

impl SteadyWindow {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

fn is_angle(channel: &str) -> bool {
    matches!(channel, "psi" | "psi_d" | "e_psi")
}

/// Angle samples made continuous so their spread is meaningful.
fn unwrapped(values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut prev: Option<f64> = None;
    for &v in values {
        let next = match prev {
            Some(p) => p + wrap_angle(v - wrap_angle(p)),
            None => v,
        };
        out.push(next);
        prev = Some(next);
    }
    out
}

/// Maximal intervals over which every trailing window of length `window`
/// has a standard deviation of `channel` below `tol`, minus `exclusion`
/// seconds after each event. An unknown channel is an error; finding
/// nothing is not.
pub fn detect_steady_state(
    log: &RunLog,
    channel: &str,
    window: f64,
    tol: f64,
    exclusion: f64,
) -> Result<Vec<SteadyWindow>> {
    if !(window > 0.0) {
        return Err(Error::Analysis(format!(
            "window must be positive, got {window}"
        )));
    }
    let raw = log
        .channel(channel)
        .ok_or_else(|| Error::Analysis(format!("unknown channel '{channel}'")))?;
    let values = if is_angle(channel) {
        unwrapped(&raw)
    } else {
        raw
    };
    let t = log.times();
    if t.is_empty() {
        return Ok(Vec::new());
    }

    // offset keeps the running sums well conditioned
    let offset = values[0];
    let mut s1 = vec![0.0; values.len() + 1];
    let mut s2 = vec![0.0; values.len() + 1];
    for (k, v) in values.iter().enumerate() {
        let d = v - offset;
        s1[k + 1] = s1[k] + d;
        s2[k + 1] = s2[k] + d * d;
    }

    let mut spans: Vec<(f64, f64)> = Vec::new();
    let mut i = 0;
    for j in 0..t.len() {
        if t[j] - t[0] < window - TIME_EPS {
            continue;
        }
        while t[j] - t[i] > window + TIME_EPS {
            i += 1;
        }
        let n = (j - i + 1) as f64;
        let sum = s1[j + 1] - s1[i];
        let var = ((s2[j + 1] - s2[i]) - sum * sum / n).max(0.0) / n;
        if !(var.sqrt() < tol) {
            continue;
        }
        match spans.last_mut() {
            Some(last) if t[i] <= last.1 + TIME_EPS => last.1 = last.1.max(t[j]),
            _ => spans.push((t[i], t[j])),
        }
    }

    let excluded: Vec<(f64, f64)> = log
        .events()
        .iter()
        .map(|e| (e.time, e.time + exclusion))
        .collect();
    for &(a, b) in &excluded {
        spans = spans
            .into_iter()
            .flat_map(|(s, e)| {
                let mut parts = Vec::new();
                if e <= a || s >= b {
                    parts.push((s, e));
                } else {
                    if s < a {
                        parts.push((s, a));
                    }
                    if e > b {
                        parts.push((b, e));
                    }
                }
                parts
            })
            .filter(|(s, e)| e - s > TIME_EPS)
            .collect();
    }

    Ok(spans
        .into_iter()
        .map(|(start, end)| make_window(log, start, end, excluded.clone()))
        .collect())
}

fn make_window(log: &RunLog, start: f64, end: f64, excluded: Vec<(f64, f64)>) -> SteadyWindow {
    let stats = window_stats(log, start, end);
    SteadyWindow {
        start,
        end,
        mean_u_error: stats.speed_error,
        mean_psi_error: stats.heading_error_deg,
        std_u: stats.std_u,
        excluded,
    }
}

/// Intervals covered by both window lists, optionally clipped to `[lo, hi)`.
pub fn intersect_windows(
    log: &RunLog,
    a: &[SteadyWindow],
    b: &[SteadyWindow],
    lo: f64,
    hi: f64,
) -> Vec<SteadyWindow> {
    let mut out = Vec::new();
    for x in a {
        for y in b {
            let start = x.start.max(y.start).max(lo);
            let end = x.end.min(y.end).min(hi);
            if end - start > TIME_EPS {
                out.push(make_window(log, start, end, x.excluded.clone()));
            }
        }
    }
    out.sort_by(|p, q| p.start.total_cmp(&q.start));
    out
}

struct Stats {
    speed_error: f64,
    heading_error_deg: f64,
    std_u: f64,
}

fn in_window(t: f64, start: f64, end: f64) -> bool {
    t >= start - TIME_EPS && t < end - TIME_EPS
}

fn window_stats(log: &RunLog, start: f64, end: f64) -> Stats {
    let rows: Vec<_> = log
        .records
        .iter()
        .filter(|r| in_window(r.t, start, end))
        .collect();
    let n = rows.len() as f64;
    let mean =
        |f: &dyn Fn(&crate::sim::LogRecord) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
    let mean_u = mean(&|r| r.u);
    Stats {
        speed_error: mean(&|r| (r.u - r.u_d).abs()),
        heading_error_deg: mean(&|r| wrap_angle(r.psi - r.psi_d).abs().to_degrees()),
        std_u: mean(&|r| (r.u - mean_u).powi(2)).sqrt(),
    }
}

/// Mean absolute errors over a set of steady windows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyErrors {
    /// m/s
    pub speed_error: f64,
    /// Speed error as a percentage of the desired speed
    pub percent_error: f64,
    /// deg
    pub heading_error: f64,
    /// Samples averaged
    pub samples: usize,
}

/// Mean absolute speed and heading errors over the samples inside
/// `windows`, against the logged desired values or a fixed `setpoint`
/// `(u_d, psi_d)`. Windows are half-open, so splitting one changes nothing.
pub fn steady_errors(
    log: &RunLog,
    windows: &[SteadyWindow],
    setpoint: Option<(f64, f64)>,
) -> Result<SteadyErrors> {
    let rows: Vec<_> = log
        .records
        .iter()
        .filter(|r| windows.iter().any(|w| in_window(r.t, w.start, w.end)))
        .collect();
    if rows.is_empty() {
        return Err(Error::Analysis(
            "no samples inside the steady windows".into(),
        ));
    }
    let n = rows.len() as f64;
    let (mut speed, mut heading, mut u_d_sum) = (0.0, 0.0, 0.0);
    for r in &rows {
        let (u_d, psi_d) = setpoint.unwrap_or((r.u_d, r.psi_d));
        speed += (r.u - u_d).abs();
        heading += wrap_angle(r.psi - psi_d).abs().to_degrees();
        u_d_sum += u_d;
    }
    let speed_error = speed / n;
    Ok(SteadyErrors {
        speed_error,
        percent_error: 100.0 * speed_error / (u_d_sum / n),
        heading_error: heading / n,
        samples: rows.len(),
    })
}
