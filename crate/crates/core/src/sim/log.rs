use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::{Error, Result};

/// Channel names, in CSV column order.
pub const COLUMNS: [&str; 28] = [
    "t",
    "x",
    "y",
    "psi",
    "u",
    "v",
    "r",
    "cmd_port",
    "cmd_stbd",
    "thrust_port",
    "thrust_stbd",
    "tau_x",
    "tau_z",
    "u_d",
    "psi_d",
    "e_u",
    "e_psi",
    "u_m",
    "x_u_hat",
    "x_uu_hat",
    "a_d_hat",
    "lyapunov",
    "lyapunov_rate",
    "condition_pre",
    "condition",
    "event",
    "saturated",
    "adapting",
];

/// One controller tick. Channels that do not apply to a run hold NaN.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct LogRecord {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub u: f64,
    pub v: f64,
    pub r: f64,
    pub cmd_port: f64,
    pub cmd_stbd: f64,
    pub thrust_port: f64,
    pub thrust_stbd: f64,
    pub tau_x: f64,
    pub tau_z: f64,
    pub u_d: f64,
    pub psi_d: f64,
    pub e_u: f64,
    pub e_psi: f64,
    pub u_m: f64,
    pub x_u_hat: f64,
    pub x_uu_hat: f64,
    pub a_d_hat: f64,
    pub lyapunov: f64,
    pub lyapunov_rate: f64,
    /// Condition before any event on this tick
    pub condition_pre: String,
    pub condition: String,
    /// Event labels applied on this tick joined by '+', empty when none
    pub event: String,
    pub saturated: bool,
    pub adapting: bool,
}

impl LogRecord {
    fn fields(&self) -> Vec<String> {
        let f = |x: f64| format!("{x}");
        vec![
            f(self.t),
            f(self.x),
            f(self.y),
            f(self.psi),
            f(self.u),
            f(self.v),
            f(self.r),
            f(self.cmd_port),
            f(self.cmd_stbd),
            f(self.thrust_port),
            f(self.thrust_stbd),
            f(self.tau_x),
            f(self.tau_z),
            f(self.u_d),
            f(self.psi_d),
            f(self.e_u),
            f(self.e_psi),
            f(self.u_m),
            f(self.x_u_hat),
            f(self.x_uu_hat),
            f(self.a_d_hat),
            f(self.lyapunov),
            f(self.lyapunov_rate),
            self.condition_pre.clone(),
            self.condition.clone(),
            self.event.clone(),
            (self.saturated as u8).to_string(),
            (self.adapting as u8).to_string(),
        ]
    }

    pub fn has_event(&self) -> bool {
        !self.event.is_empty()
    }
}

/// Identification of the run that produced a log.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct RunMeta {
    pub tool_version: String,
    pub scenario: String,
    pub scenario_hash: String,
    pub config_hash: String,
    /// "bs", "abs" or "open_loop"
    pub controller: String,
}

impl RunMeta {
    fn header_line(&self) -> String {
        format!(
            "# usvsim {} scenario={} scenario_hash={} config={} controller={}",
            self.tool_version, self.scenario, self.scenario_hash, self.config_hash, self.controller
        )
    }

    fn parse_header(line: &str) -> Self {
        let mut meta = Self::default();
        let body = line.trim_start_matches('#').trim();
        let mut parts = body.split_whitespace();
        if parts.next() == Some("usvsim") {
            meta.tool_version = parts.next().unwrap_or_default().to_string();
        }
        for kv in body.split_whitespace() {
            if let Some((k, v)) = kv.split_once('=') {
                let v = v.to_string();
                match k {
                    "scenario" => meta.scenario = v,
                    "scenario_hash" => meta.scenario_hash = v,
                    "config" => meta.config_hash = v,
                    "controller" => meta.controller = v,
                    _ => {}
                }
            }
        }
        meta
    }
}

/// An event as it appears in a log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventRecord {
    pub time: f64,
    pub label: String,
}

/// Per-tick telemetry of one run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunLog {
    pub meta: RunMeta,
    pub records: Vec<LogRecord>,
}

impl RunLog {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    /// Values of a numeric channel by column name.
    pub fn channel(&self, name: &str) -> Option<Vec<f64>> {
        let get: fn(&LogRecord) -> f64 = match name {
            "t" => |r| r.t,
            "x" => |r| r.x,
            "y" => |r| r.y,
            "psi" => |r| r.psi,
            "u" => |r| r.u,
            "v" => |r| r.v,
            "r" => |r| r.r,
            "cmd_port" => |r| r.cmd_port,
            "cmd_stbd" => |r| r.cmd_stbd,
            "thrust_port" => |r| r.thrust_port,
            "thrust_stbd" => |r| r.thrust_stbd,
            "tau_x" => |r| r.tau_x,
            "tau_z" => |r| r.tau_z,
            "u_d" => |r| r.u_d,
            "psi_d" => |r| r.psi_d,
            "e_u" => |r| r.e_u,
            "e_psi" => |r| r.e_psi,
            "u_m" => |r| r.u_m,
            "x_u_hat" => |r| r.x_u_hat,
            "x_uu_hat" => |r| r.x_uu_hat,
            "a_d_hat" => |r| r.a_d_hat,
            "lyapunov" => |r| r.lyapunov,
            "lyapunov_rate" => |r| r.lyapunov_rate,
            "saturated" => |r| r.saturated as u8 as f64,
            "adapting" => |r| r.adapting as u8 as f64,
            _ => return None,
        };
        Some(self.records.iter().map(get).collect())
    }

    /// Events in time order.
    pub fn events(&self) -> Vec<EventRecord> {
        self.records
            .iter()
            .filter(|r| r.has_event())
            .map(|r| EventRecord {
                time: r.t,
                label: r.event.clone(),
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut out = out;
        writeln!(out, "{}", self.meta.header_line())?;
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(COLUMNS)?;
        for r in &self.records {
            w.write_record(r.fields())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = BufReader::new(input);
        let mut first = String::new();
        reader.read_line(&mut first)?;
        let (meta, offset, rest): (RunMeta, usize, Box<dyn Read>) = if first.starts_with('#') {
            (RunMeta::parse_header(&first), 1, Box::new(reader))
        } else {
            let replay = std::io::Cursor::new(first.into_bytes());
            (RunMeta::default(), 0, Box::new(replay.chain(reader)))
        };
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(rest);
        let headers = rdr.headers()?.clone();
        if headers.iter().ne(COLUMNS.iter().copied()) {
            return Err(Error::Parse {
                line: offset + 1,
                message: format!(
                    "unexpected header; expected {} columns starting with {}",
                    COLUMNS.len(),
                    COLUMNS[0]
                ),
            });
        }
        let mut records = Vec::new();
        for (i, row) in rdr.records().enumerate() {
            let line = offset + i + 2;
            let row = row.map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
            if row.len() != COLUMNS.len() {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {} fields, found {}", COLUMNS.len(), row.len()),
                });
            }
            let num = |k: usize| -> Result<f64> {
                row[k].parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    message: format!("column {}: '{}' is not a number", COLUMNS[k], &row[k]),
                })
            };
            let flag = |k: usize| -> Result<bool> {
                match &row[k] {
                    "1" | "true" => Ok(true),
                    "0" | "false" => Ok(false),
                    other => Err(Error::Parse {
                        line,
                        message: format!("column {}: '{other}' is not a flag", COLUMNS[k]),
                    }),
                }
            };
            records.push(LogRecord {
                t: num(0)?,
                x: num(1)?,
                y: num(2)?,
                psi: num(3)?,
                u: num(4)?,
                v: num(5)?,
                r: num(6)?,
                cmd_port: num(7)?,
                cmd_stbd: num(8)?,
                thrust_port: num(9)?,
                thrust_stbd: num(10)?,
                tau_x: num(11)?,
                tau_z: num(12)?,
                u_d: num(13)?,
                psi_d: num(14)?,
                e_u: num(15)?,
                e_psi: num(16)?,
                u_m: num(17)?,
                x_u_hat: num(18)?,
                x_uu_hat: num(19)?,
                a_d_hat: num(20)?,
                lyapunov: num(21)?,
                lyapunov_rate: num(22)?,
                condition_pre: row[23].to_string(),
                condition: row[24].to_string(),
                event: row[25].to_string(),
                saturated: flag(26)?,
                adapting: flag(27)?,
            });
        }
        Ok(Self { meta, records })
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::read_csv(file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunLog {
        let mut records = Vec::new();
        for k in 0..4 {
            records.push(LogRecord {
                t: k as f64 * 0.01,
                u: 0.1 * k as f64 + 1.0 / 3.0,
                psi: -2.5,
                lyapunov: f64::NAN,
                condition_pre: "full".into(),
                condition: if k >= 2 { "lightship" } else { "full" }.into(),
                event: if k == 2 { "mass_drop+tow_attach" } else { "" }.into(),
                saturated: k == 1,
                ..LogRecord::default()
            });
        }
        RunLog {
            meta: RunMeta {
                tool_version: "0.1.0".into(),
                scenario: "variable-mass".into(),
                scenario_hash: "abc".into(),
                config_hash: "def".into(),
                controller: "abs".into(),
            },
            records,
        }
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let log = sample();
        let text = log.to_csv_string();
        assert!(text.starts_with("# usvsim 0.1.0 scenario=variable-mass"));
        assert!(!text.contains('\r'));
        let back = RunLog::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back.meta, log.meta);
        assert_eq!(back.records.len(), 4);
        for (a, b) in back.records.iter().zip(&log.records) {
            assert_eq!(a.u.to_bits(), b.u.to_bits());
            assert!(a.lyapunov.is_nan());
            assert_eq!(a.event, b.event);
            assert_eq!(a.saturated, b.saturated);
        }
        assert_eq!(back.to_csv_string(), text);
    }

    #[test]
    fn events_listed() {
        let ev = sample().events();
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].label, "mass_drop+tow_attach");
        assert_eq!(ev[0].time, 0.02);
    }

    #[test]
    fn truncated_row_reports_line() {
        let text = sample().to_csv_string();
        let mut lines: Vec<&str> = text.lines().collect();
        let cut = &lines[4][..10].to_string();
        lines[4] = cut;
        let broken = lines.join("\n");
        match RunLog::read_csv(broken.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn channels_by_name() {
        let log = sample();
        assert_eq!(log.channel("psi").unwrap(), vec![-2.5; 4]);
        assert_eq!(log.channel("saturated").unwrap(), vec![0.0, 1.0, 0.0, 0.0]);
        assert!(log.channel("bogus").is_none());
    }
}
