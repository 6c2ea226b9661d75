use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{duration, sha256_hex, toml_error, VesselConfig};
use crate::control::{ControlGains, ControllerKind, Setpoint};
use crate::model::{ConditionLabel, DisplacementCondition, PlantKind, SimState};
use crate::propulsion::{calibrate_thrust_decay, MotorCommand, ThrusterKind, ThrusterModel};
use crate::{Error, Result};

const TIME_EPS: f64 = 1e-9;

/// Initial pose and velocity in configuration units.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialState {
    pub x: f64,
    pub y: f64,
    pub heading_deg: f64,
    pub u: f64,
    pub v: f64,
    /// rad/s
    pub r: f64,
}

impl InitialState {
    pub fn to_state(&self) -> SimState {
        SimState {
            t: 0.0,
            x: self.x,
            y: self.y,
            psi: crate::wrap_angle(self.heading_deg.to_radians()),
            u: self.u,
            v: self.v,
            r: self.r,
        }
    }
}

/// Desired speed and heading in configuration units.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetpointSpec {
    /// m/s
    pub speed: f64,
    pub heading_deg: f64,
}

impl SetpointSpec {
    pub fn to_setpoint(&self) -> Setpoint {
        Setpoint::new(self.speed, self.heading_deg.to_radians())
    }
}

/// Open-loop motor commands or closed-loop speed/heading control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum ControlSpec {
    OpenLoop {
        command: MotorCommand,
    },
    Closed {
        controller: ControllerKind,
        /// Condition whose model the controller is designed on.
        tuned_for: ConditionLabel,
        setpoint: SetpointSpec,
        #[serde(default)]
        gains: ControlGains,
    },
}

impl ControlSpec {
    pub fn controller(&self) -> Option<ControllerKind> {
        match self {
            Self::OpenLoop { .. } => None,
            Self::Closed { controller, .. } => Some(*controller),
        }
    }
}

/// How the jets are modelled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThrusterSpec {
    pub kind: ThrusterKind,
    /// Bollard pull of both jets together, N
    pub bollard_total: f64,
    /// Per-jet a1 of the pump-analog model; calibrated to the starting
    /// condition's top speed when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay: Option<f64>,
}

impl Default for ThrusterSpec {
    fn default() -> Self {
        Self {
            kind: ThrusterKind::PumpAnalog,
            bollard_total: 204.0,
            decay: None,
        }
    }
}

impl ThrusterSpec {
    pub fn bollard() -> Self {
        Self {
            kind: ThrusterKind::BollardLinear,
            ..Self::default()
        }
    }

    /// Per-jet thruster model for a vehicle in `condition`. A condition
    /// without an observed top speed borrows the lightship calibration.
    pub fn resolve(&self, condition: &DisplacementCondition) -> Result<ThrusterModel> {
        let per_jet = self.bollard_total / 2.0;
        match self.kind {
            ThrusterKind::BollardLinear => Ok(ThrusterModel::bollard(per_jet)),
            ThrusterKind::PumpAnalog => {
                let decay = match self.decay {
                    Some(a1) => a1,
                    None => {
                        let anchor = match condition.top_speed {
                            Some(_) => *condition,
                            None => DisplacementCondition::lightship(),
                        };
                        let top = anchor.top_speed.expect("lightship has a top speed");
                        calibrate_thrust_decay(self.bollard_total, top, &anchor)?
                    }
                };
                ThrusterModel::pump(per_jet, decay)
            }
        }
    }
}

/// Whether the controller output passes through the jets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActuatorMode {
    /// Allocation to two forward-only jets with saturation.
    #[default]
    Jets,
    /// The commanded surge force and yaw moment act directly.
    Direct,
}

/// Optional Gaussian measurement noise on the controller inputs.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSpec {
    /// m/s
    pub speed_std: f64,
    pub heading_std_deg: f64,
}

impl NoiseSpec {
    pub fn is_active(&self) -> bool {
        self.speed_std > 0.0 || self.heading_std_deg > 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EventKind {
    /// Release `delta_mass` kg; the vehicle continues in `new_condition`.
    MassDrop {
        delta_mass: f64,
        new_condition: ConditionLabel,
    },
    /// Start towing a body with drag c_t u^2.
    TowAttach { coefficient: f64 },
    /// Forward surge force held for `duration` seconds.
    Impulse {
        #[serde(default = "default_impulse_force")]
        force: f64,
        #[serde(default = "default_impulse_duration", with = "duration")]
        duration: f64,
    },
    /// New open-loop motor command or new setpoint (either field may be omitted).
    CommandChange {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        command: Option<MotorCommand>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        speed: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        heading_deg: Option<f64>,
    },
}

fn default_impulse_force() -> f64 {
    100.0
}

fn default_impulse_duration() -> f64 {
    0.5
}

impl EventKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::MassDrop { .. } => "mass_drop",
            Self::TowAttach { .. } => "tow_attach",
            Self::Impulse { .. } => "impulse",
            Self::CommandChange { .. } => "command_change",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    #[serde(with = "duration")]
    pub time: f64,
    #[serde(flatten)]
    pub kind: EventKind,
}

impl Event {
    pub fn new(time: f64, kind: EventKind) -> Self {
        Self { time, kind }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {} s", self.kind.label(), self.time)
    }
}

/// A complete, declarative description of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    #[serde(default)]
    pub initial: InitialState,
    /// Condition at t = 0
    pub condition: ConditionLabel,
    #[serde(default)]
    pub plant: PlantKind,
    pub control: ControlSpec,
    #[serde(default)]
    pub thruster: ThrusterSpec,
    #[serde(default)]
    pub actuator: ActuatorMode,
    #[serde(default)]
    pub events: Vec<Event>,
    #[serde(with = "duration")]
    pub duration: f64,
    /// Integration step, s
    #[serde(default = "default_dt", with = "duration")]
    pub dt: f64,
    /// Controller and logging period, s
    #[serde(default = "default_dt", with = "duration")]
    pub tick: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub noise: NoiseSpec,
}

fn default_dt() -> f64 {
    0.01
}

impl ScenarioSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| toml_error(&e, text))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    /// Integration steps per controller tick.
    pub fn steps_per_tick(&self) -> usize {
        (self.tick / self.dt).round().max(1.0) as usize
    }

    /// Number of controller ticks after t = 0.
    pub fn tick_count(&self) -> usize {
        (self.duration / self.tick + TIME_EPS).floor() as usize
    }

    /// Hash identifying the scenario regardless of which controller ran it.
    pub fn fingerprint(&self) -> String {
        let mut copy = self.clone();
        if let ControlSpec::Closed { controller, .. } = &mut copy.control {
            *controller = ControllerKind::Backstepping;
        }
        sha256_hex(
            serde_json::to_string(&copy)
                .expect("scenario serializes")
                .as_bytes(),
        )
    }

    /// Every validation problem, in the order found.
    pub fn problems(&self, vessel: &VesselConfig) -> Vec<String> {
        let mut out = Vec::new();
        let finite_pos = |x: f64| x > 0.0 && x.is_finite();
        if !finite_pos(self.dt) {
            out.push(format!("dt must be positive, got {}", self.dt));
        }
        if !finite_pos(self.tick) {
            out.push(format!("tick must be positive, got {}", self.tick));
        }
        if finite_pos(self.dt) && finite_pos(self.tick) {
            let ratio = self.tick / self.dt;
            if ratio < 1.0 - 1e-9 || (ratio - ratio.round()).abs() > 1e-6 {
                out.push(format!(
                    "tick {} s is not an integer multiple of dt {} s",
                    self.tick, self.dt
                ));
            }
        }
        if !finite_pos(self.duration) {
            out.push(format!("duration must be positive, got {}", self.duration));
        }
        let init = self.initial;
        if ![init.x, init.y, init.heading_deg, init.u, init.v, init.r]
            .iter()
            .all(|x| x.is_finite())
        {
            out.push("initial state must be finite".into());
        }
        if self.noise.speed_std < 0.0 || self.noise.heading_std_deg < 0.0 {
            out.push("noise standard deviations must be non-negative".into());
        }
        if !(self.thruster.bollard_total > 0.0) {
            out.push(format!(
                "bollard_total must be positive, got {}",
                self.thruster.bollard_total
            ));
        } else if let Err(e) = self.thruster.resolve(&vessel.condition(self.condition)) {
            out.push(e.to_string());
        }
        let closed = match &self.control {
            ControlSpec::OpenLoop { command } => {
                check_command(command, &mut out);
                false
            }
            ControlSpec::Closed {
                gains, setpoint, ..
            } => {
                out.extend(gains.problems().into_iter().filter(|p| !p.contains("tick")));
                if !(setpoint.speed >= 0.0 && setpoint.speed.is_finite()) {
                    out.push(format!(
                        "setpoint speed must be >= 0, got {}",
                        setpoint.speed
                    ));
                }
                if !setpoint.heading_deg.is_finite() {
                    out.push("setpoint heading must be finite".into());
                }
                true
            }
        };
        let mut mass = vessel.condition(self.condition).mass;
        let mut last = f64::NEG_INFINITY;
        for (i, ev) in self.events.iter().enumerate() {
            let tag = format!("event {} ({})", i + 1, ev.kind.label());
            if !(ev.time >= 0.0) {
                out.push(format!("{tag}: time {} s is before the start", ev.time));
            } else if ev.time > self.duration + TIME_EPS {
                out.push(format!(
                    "{tag}: time {} s is after the end ({} s)",
                    ev.time, self.duration
                ));
            }
            if ev.time < last {
                out.push(format!("{tag}: events are not sorted by time"));
            }
            last = last.max(ev.time);
            match &ev.kind {
                EventKind::MassDrop {
                    delta_mass,
                    new_condition,
                } => {
                    let next = vessel.condition(*new_condition).mass;
                    if !(*delta_mass > 0.0) {
                        out.push(format!("{tag}: dropped mass must be positive"));
                    } else if ((mass - delta_mass) - next).abs() > 1e-6 {
                        out.push(format!(
                            "{tag}: {mass} kg - {delta_mass} kg does not match the {new_condition} mass {next} kg"
                        ));
                    }
                    mass = next;
                }
                EventKind::TowAttach { coefficient } => {
                    if !(*coefficient >= 0.0 && coefficient.is_finite()) {
                        out.push(format!("{tag}: tow coefficient must be >= 0"));
                    }
                }
                EventKind::Impulse { force, duration } => {
                    if !force.is_finite() {
                        out.push(format!("{tag}: impulse force must be finite"));
                    }
                    if !(*duration > 0.0) {
                        out.push(format!("{tag}: impulse duration must be positive"));
                    }
                }
                EventKind::CommandChange {
                    command,
                    speed,
                    heading_deg,
                } => {
                    if closed {
                        if command.is_some() {
                            out.push(format!("{tag}: motor command given to a closed-loop run"));
                        }
                        if speed.is_some_and(|s| !(s >= 0.0)) {
                            out.push(format!("{tag}: setpoint speed must be >= 0"));
                        }
                        if heading_deg.is_some_and(|h| !h.is_finite()) {
                            out.push(format!("{tag}: setpoint heading must be finite"));
                        }
                    } else {
                        if speed.is_some() || heading_deg.is_some() {
                            out.push(format!("{tag}: setpoint given to an open-loop run"));
                        }
                        if let Some(c) = command {
                            check_command(c, &mut out);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self, vessel: &VesselConfig) -> Result<()> {
        let p = self.problems(vessel);
        if p.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidScenario(p))
        }
    }

    /// Non-fatal remarks, e.g. throttles outside the tested range.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let check = |c: &MotorCommand, out: &mut Vec<String>| {
            for v in [c.port, c.stbd] {
                if v > 0.0 && !(0.6..=1.0).contains(&v) {
                    out.push(format!(
                        "throttle {v} lies outside the tested 0.6-1.0 range"
                    ));
                }
            }
        };
        if let ControlSpec::OpenLoop { command } = &self.control {
            if command.port == 0.0 && command.stbd == 0.0 {
                out.push("zero throttle: the vehicle stays at rest".into());
            }
            check(command, &mut out);
        }
        for ev in &self.events {
            if let EventKind::CommandChange {
                command: Some(c), ..
            } = &ev.kind
            {
                check(c, &mut out);
            }
        }
        out.dedup();
        out
    }
}

fn check_command(c: &MotorCommand, out: &mut Vec<String>) {
    for v in [c.port, c.stbd] {
        if !(0.0..=1.0).contains(&v) {
            out.push(format!("motor command {v} outside [0, 1]"));
        }
    }
}

/// Scenario names accepted by [`builtin`].
pub const BUILTIN_SCENARIOS: [&str; 6] = [
    "acceleration",
    "zigzag",
    "setpoint",
    "variable-mass",
    "variable-drag",
    "variable-mass-drag",
];

/// Default version of a named scenario.
pub fn builtin(name: &str, controller: ControllerKind) -> Result<ScenarioSpec> {
    Ok(match name {
        "acceleration" => scenario_acceleration(1.0, ConditionLabel::Lightship, 60.0),
        "zigzag" => scenario_zigzag(ConditionLabel::Lightship, 7.0, 70.0),
        "setpoint" => scenario_setpoint(controller, 1.5, 0.0, 15.0, 90.0),
        "variable-mass" => scenario_variable_mass(controller, 78.0, 26.0, false),
        "variable-drag" => scenario_variable_drag(controller, 42.0, 84.0),
        "variable-mass-drag" => scenario_variable_mass_drag(controller, 87.0, 26.0, 84.0),
        other => {
            return Err(Error::Config(format!(
                "unknown scenario '{other}' (expected one of {})",
                BUILTIN_SCENARIOS.join(", ")
            )))
        }
    })
}

fn base(
    name: &str,
    condition: ConditionLabel,
    control: ControlSpec,
    duration: f64,
) -> ScenarioSpec {
    ScenarioSpec {
        name: name.to_string(),
        initial: InitialState::default(),
        condition,
        plant: PlantKind::Full,
        control,
        thruster: ThrusterSpec::default(),
        actuator: ActuatorMode::Jets,
        events: Vec::new(),
        duration,
        dt: default_dt(),
        tick: default_dt(),
        seed: 0,
        noise: NoiseSpec::default(),
    }
}

/// Equal throttle on both jets from rest.
pub fn scenario_acceleration(
    throttle: f64,
    condition: ConditionLabel,
    duration: f64,
) -> ScenarioSpec {
    base(
        "acceleration",
        condition,
        ControlSpec::OpenLoop {
            command: MotorCommand {
                port: throttle,
                stbd: throttle,
            },
        },
        duration,
    )
}

/// Full differential thrust alternating between the jets every `period` seconds.
pub fn scenario_zigzag(condition: ConditionLabel, period: f64, duration: f64) -> ScenarioSpec {
    let mut spec = base(
        "zigzag",
        condition,
        ControlSpec::OpenLoop {
            command: MotorCommand {
                port: 1.0,
                stbd: 0.0,
            },
        },
        duration,
    );
    spec.thruster = ThrusterSpec::bollard();
    let mut k = 1;
    while period.is_finite() && k as f64 * period < duration - TIME_EPS {
        let command = if k % 2 == 0 {
            MotorCommand {
                port: 1.0,
                stbd: 0.0,
            }
        } else {
            MotorCommand {
                port: 0.0,
                stbd: 1.0,
            }
        };
        spec.events.push(Event::new(
            k as f64 * period,
            EventKind::CommandChange {
                command: Some(command),
                speed: None,
                heading_deg: None,
            },
        ));
        k += 1;
    }
    spec
}

fn closed(
    name: &str,
    controller: ControllerKind,
    condition: ConditionLabel,
    speed: f64,
    heading_deg: f64,
    duration: f64,
) -> ScenarioSpec {
    let mut spec = base(
        name,
        condition,
        ControlSpec::Closed {
            controller,
            tuned_for: ConditionLabel::Lightship,
            setpoint: SetpointSpec { speed, heading_deg },
            gains: ControlGains::default(),
        },
        duration,
    );
    spec.initial.heading_deg = heading_deg;
    spec
}

/// Hold `u_d` on heading `psi0_deg`, then step the heading by `jump_deg`.
pub fn scenario_setpoint(
    controller: ControllerKind,
    u_d: f64,
    psi0_deg: f64,
    jump_time: f64,
    jump_deg: f64,
) -> ScenarioSpec {
    let mut spec = closed(
        "setpoint",
        controller,
        ConditionLabel::Lightship,
        u_d,
        psi0_deg,
        135.0,
    );
    if jump_deg != 0.0 {
        spec.events.push(Event::new(
            jump_time,
            EventKind::CommandChange {
                command: None,
                speed: None,
                heading_deg: Some(psi0_deg + jump_deg),
            },
        ));
    }
    spec
}

/// Start full, drop `delta_mass` to lightship at `t_drop`.
pub fn scenario_variable_mass(
    controller: ControllerKind,
    t_drop: f64,
    delta_mass: f64,
    impulse: bool,
) -> ScenarioSpec {
    let mut spec = closed(
        "variable-mass",
        controller,
        ConditionLabel::Full,
        1.0,
        150.0,
        t_drop + 100.0,
    );
    if delta_mass != 0.0 {
        spec.events.push(Event::new(
            t_drop,
            EventKind::MassDrop {
                delta_mass,
                new_condition: ConditionLabel::Lightship,
            },
        ));
    }
    if impulse {
        spec.events.push(Event::new(
            t_drop,
            EventKind::Impulse {
                force: default_impulse_force(),
                duration: default_impulse_duration(),
            },
        ));
    }
    spec
}

/// Start lightship, attach a towed body with drag c_t u^2 at `t_drop`.
pub fn scenario_variable_drag(controller: ControllerKind, t_drop: f64, tow: f64) -> ScenarioSpec {
    let mut spec = closed(
        "variable-drag",
        controller,
        ConditionLabel::Lightship,
        1.0,
        150.0,
        t_drop + 100.0,
    );
    spec.events.push(Event::new(
        t_drop,
        EventKind::TowAttach { coefficient: tow },
    ));
    spec
}

/// Start full; drop the payload to lightship and begin towing it at once.
pub fn scenario_variable_mass_drag(
    controller: ControllerKind,
    t_drop: f64,
    delta_mass: f64,
    tow: f64,
) -> ScenarioSpec {
    let mut spec = closed(
        "variable-mass-drag",
        controller,
        ConditionLabel::Full,
        1.0,
        150.0,
        t_drop + 100.0,
    );
    spec.events.push(Event::new(
        t_drop,
        EventKind::MassDrop {
            delta_mass,
            new_condition: ConditionLabel::Lightship,
        },
    ));
    spec.events.push(Event::new(
        t_drop,
        EventKind::TowAttach { coefficient: tow },
    ));
    spec
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vessel() -> VesselConfig {
        VesselConfig::default()
    }

    #[test]
    fn builtins_are_valid() {
        for name in BUILTIN_SCENARIOS {
            for c in [
                ControllerKind::Backstepping,
                ControllerKind::AdaptiveBackstepping,
            ] {
                let s = builtin(name, c).unwrap();
                assert_eq!(s.problems(&vessel()), Vec::<String>::new(), "{name}");
            }
        }
        assert!(builtin("nope", ControllerKind::Backstepping).is_err());
    }

    #[test]
    fn zigzag_alternates() {
        let s = scenario_zigzag(ConditionLabel::Lightship, 7.0, 70.0);
        assert_eq!(s.events.len(), 9);
        assert_eq!(s.events[0].time, 7.0);
        match &s.events[0].kind {
            EventKind::CommandChange {
                command: Some(c), ..
            } => assert_eq!((c.port, c.stbd), (0.0, 1.0)),
            other => panic!("{other:?}"),
        }
        let constant = scenario_zigzag(ConditionLabel::Lightship, f64::INFINITY, 70.0);
        assert!(constant.events.is_empty());
    }

    #[test]
    fn acceleration_warnings() {
        assert!(scenario_acceleration(1.0, ConditionLabel::Full, 60.0)
            .warnings()
            .is_empty());
        assert!(!scenario_acceleration(0.0, ConditionLabel::Full, 60.0)
            .warnings()
            .is_empty());
        assert!(!scenario_acceleration(0.3, ConditionLabel::Full, 60.0)
            .warnings()
            .is_empty());
    }

    #[test]
    fn null_mass_drop_has_no_event() {
        let s = scenario_variable_mass(ControllerKind::Backstepping, 78.0, 0.0, false);
        assert!(s.events.is_empty());
    }

    #[test]
    fn validation_lists_every_problem() {
        let mut s = scenario_variable_mass(ControllerKind::Backstepping, 78.0, 26.0, false);
        s.dt = 0.003;
        s.events
            .push(Event::new(-1.0, EventKind::TowAttach { coefficient: -2.0 }));
        s.events
            .push(Event::new(1e4, EventKind::TowAttach { coefficient: 1.0 }));
        let p = s.problems(&vessel());
        assert!(p.iter().any(|m| m.contains("integer multiple")), "{p:?}");
        assert!(p.iter().any(|m| m.contains("before the start")), "{p:?}");
        assert!(p.iter().any(|m| m.contains("not sorted")), "{p:?}");
        assert!(p.iter().any(|m| m.contains("tow coefficient")), "{p:?}");
        assert!(p.iter().any(|m| m.contains("after the end")), "{p:?}");
    }

    #[test]
    fn mass_drop_must_match_condition() {
        let mut s = scenario_variable_mass(ControllerKind::Backstepping, 78.0, 26.0, false);
        s.events[0].kind = EventKind::MassDrop {
            delta_mass: 20.0,
            new_condition: ConditionLabel::Lightship,
        };
        assert!(s.validate(&vessel()).is_err());
    }

    #[test]
    fn toml_roundtrip_and_iso_durations() {
        let s = scenario_variable_mass_drag(ControllerKind::AdaptiveBackstepping, 87.0, 26.0, 84.0);
        let back = ScenarioSpec::from_toml_str(&s.to_toml()).unwrap();
        assert_eq!(back, s);

        let text = r#"
name = "custom"
condition = "lightship"
duration = "PT1M"
dt = "PT0.01S"

[control]
mode = "closed"
controller = "abs"
tuned_for = "lightship"
setpoint = { speed = 1.2, heading_deg = 30.0 }

[[events]]
time = "PT20S"
kind = "tow_attach"
coefficient = 23.0

[[events]]
time = 30
kind = "impulse"
"#;
        let s = ScenarioSpec::from_toml_str(text).unwrap();
        assert_eq!(s.duration, 60.0);
        assert_eq!(s.events[0].time, 20.0);
        assert_eq!(
            s.events[1].kind,
            EventKind::Impulse {
                force: 100.0,
                duration: 0.5
            }
        );
        assert!(s.validate(&vessel()).is_ok());
    }

    #[test]
    fn fingerprint_ignores_controller_only() {
        let a = scenario_variable_drag(ControllerKind::Backstepping, 42.0, 84.0);
        let b = scenario_variable_drag(ControllerKind::AdaptiveBackstepping, 42.0, 84.0);
        assert_eq!(a.fingerprint(), b.fingerprint());
        let c = scenario_variable_drag(ControllerKind::Backstepping, 42.0, 23.0);
        assert_ne!(a.fingerprint(), c.fingerprint());
    }

    #[test]
    fn slick_thruster_borrows_lightship_calibration() {
        let spec = ThrusterSpec::default();
        let slick = spec.resolve(&DisplacementCondition::slick()).unwrap();
        let light = spec.resolve(&DisplacementCondition::lightship()).unwrap();
        assert_eq!(slick, light);
    }
}
