//! Backstepping speed and heading control, with an optional model-reference
//! adaptive surge law.

mod adaptive;
mod backstepping;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use adaptive::{
    abs_surge, lyapunov_diagnostics, reference_model_step, AdaptiveState, SurgeTruth,
};
pub use backstepping::{bs_heading, bs_surge};

use crate::model::{GeneralizedForce, LoadedVessel, SimState};
use crate::{wrap_angle, Error, Result};

/// Controller tuning. Defaults are the field-tested gains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControlGains {
    /// Surge error gain, 1/s
    pub k_u: f64,
    /// Heading error gain, 1/s^2
    pub k1: f64,
    /// Heading rate gain, 1/s
    pub k2: f64,
    /// Slope of the desired-acceleration shaping at zero error, 1/s
    pub k_a_max: f64,
    /// Bound on the desired acceleration, m/s^2
    pub u_dot_a_max: f64,
    /// Desired speed while turning, as a fraction of u_d
    pub turn_speed_ratio: f64,
    /// Rate at which the desired speed falls with heading error, 1/rad
    pub turn_slowdown: f64,
    /// Multiplier on the commanded surge force
    pub surge_scale: f64,
    /// Multiplier on the commanded yaw moment
    pub yaw_scale: f64,
    /// Adaptation gain
    pub gamma: f64,
    /// When true `gamma` acts on the surge equation divided by the assumed
    /// (scaled) surge inertia; otherwise it is used in N units as is.
    pub normalize_gamma: bool,
    /// Hold the quadratic drag and feed-forward estimates at their initial values.
    pub freeze_secondary_estimates: bool,
    /// Stop adapting while both jets are saturated.
    pub pause_when_saturated: bool,
    /// What the backstepping surge error is measured against.
    pub speed_reference: SpeedReference,
    /// Controller period, s; set from the scenario tick
    #[serde(skip)]
    pub tick: f64,
}

impl Default for ControlGains {
    fn default() -> Self {
        Self {
            k_u: 8.0,
            k1: 0.1,
            k2: 1.0,
            k_a_max: 1.2,
            u_dot_a_max: 1.0,
            turn_speed_ratio: 0.5,
            turn_slowdown: 5.73,
            surge_scale: 0.5,
            yaw_scale: 0.05,
            gamma: 0.05,
            normalize_gamma: true,
            freeze_secondary_estimates: false,
            pause_when_saturated: true,
            speed_reference: SpeedReference::Setpoint,
            tick: 0.01,
        }
    }
}

impl ControlGains {
    /// Gains with both output scale factors set to one.
    pub fn unscaled() -> Self {
        Self {
            surge_scale: 1.0,
            yaw_scale: 1.0,
            ..Self::default()
        }
    }

    /// Every problem with the gains, empty when they are usable.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let positive = [
            ("k_u", self.k_u),
            ("k1", self.k1),
            ("k2", self.k2),
            ("k_a_max", self.k_a_max),
            ("u_dot_a_max", self.u_dot_a_max),
            ("gamma", self.gamma),
            ("tick", self.tick),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                out.push(format!("gain {name} must be positive, got {value}"));
            }
        }
        for (name, value) in [
            ("surge_scale", self.surge_scale),
            ("yaw_scale", self.yaw_scale),
        ] {
            if !(value > 0.0 && value <= 1.0) {
                out.push(format!("{name} must lie in (0, 1], got {value}"));
            }
        }
        if !(0.0..=1.0).contains(&self.turn_speed_ratio) {
            out.push(format!(
                "turn_speed_ratio must lie in [0, 1], got {}",
                self.turn_speed_ratio
            ));
        }
        if !(self.turn_slowdown >= 0.0 && self.turn_slowdown.is_finite()) {
            out.push(format!(
                "turn_slowdown must be non-negative, got {}",
                self.turn_slowdown
            ));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.problems();
        if p.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(p.join("; ")))
        }
    }

    /// Reference-model pole a_m (and DC-matched input gain b_m).
    pub fn reference_pole(&self) -> f64 {
        self.k_a_max
    }
}

/// Target of the backstepping surge error e_u = u - target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeedReference {
    /// The shaped desired speed u_d_ref; u_dot_d enters as feed-forward.
    #[default]
    Setpoint,
    /// A desired-speed trajectory integrated from u_dot_d.
    Trajectory,
}

/// Desired surge speed and heading.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Setpoint {
    /// m/s
    pub u_d: f64,
    /// rad
    pub psi_d: f64,
}

impl Setpoint {
    pub fn new(u_d: f64, psi_d: f64) -> Self {
        Self {
            u_d,
            psi_d: wrap_angle(psi_d),
        }
    }
}

/// psi - psi_d wrapped to (-pi, pi].
pub fn heading_error(psi: f64, psi_d: f64) -> f64 {
    wrap_angle(psi - psi_d)
}

/// Desired speed, lowered while the heading error is large, and the bounded
/// desired acceleration toward it. Returns `(u_d_ref, u_dot_d)`.
pub fn shape_desired_accel(
    u: f64,
    setpoint: &Setpoint,
    e_psi: f64,
    gains: &ControlGains,
) -> (f64, f64) {
    let u_d = setpoint.u_d;
    let u_yaw = gains.turn_speed_ratio * u_d;
    let u_d_ref = (u_yaw + (u_d - u_yaw) * (-gains.turn_slowdown * e_psi.abs()).exp()).min(u_d);
    let a = gains.u_dot_a_max;
    let u_dot_d = a * (gains.k_a_max * (u_d_ref - u) / a).tanh();
    (u_d_ref, u_dot_d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ControllerKind {
    /// Backstepping speed and heading control.
    #[default]
    #[serde(rename = "bs")]
    Backstepping,
    /// Backstepping heading control with adaptive surge control.
    #[serde(rename = "abs")]
    AdaptiveBackstepping,
}

impl ControllerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Backstepping => "bs",
            Self::AdaptiveBackstepping => "abs",
        }
    }
}

impl fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ControllerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bs" | "backstepping" => Ok(Self::Backstepping),
            "abs" | "adaptive" => Ok(Self::AdaptiveBackstepping),
            other => Err(Error::Config(format!(
                "unknown controller '{other}' (expected bs or abs)"
            ))),
        }
    }
}

/// Everything the controller computed on one tick.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlOutput {
    pub tau: GeneralizedForce,
    /// Speed target after the turn slowdown, m/s
    pub u_d_ref: f64,
    /// Desired acceleration, m/s^2
    pub u_dot_d: f64,
    /// Surge tracking error, m/s
    pub e_u: f64,
    /// Heading error, rad
    pub e_psi: f64,
}

/// Stateful speed/heading controller designed on an assumed vessel.
#[derive(Debug, Clone)]
pub struct Controller {
    kind: ControllerKind,
    gains: ControlGains,
    assumed: LoadedVessel,
    /// Desired-speed trajectory integrated from u_dot_d
    u_ref: f64,
    adaptive: Option<AdaptiveState>,
}

impl Controller {
    /// `initial_speed` seeds the desired-speed trajectory and the reference model.
    pub fn new(
        kind: ControllerKind,
        gains: ControlGains,
        assumed: LoadedVessel,
        initial_speed: f64,
    ) -> Result<Self> {
        gains.validate()?;
        let adaptive = match kind {
            ControllerKind::Backstepping => None,
            ControllerKind::AdaptiveBackstepping => {
                Some(AdaptiveState::initial(&assumed, &gains, initial_speed))
            }
        };
        Ok(Self {
            kind,
            gains,
            assumed,
            u_ref: initial_speed,
            adaptive,
        })
    }

    pub fn kind(&self) -> ControllerKind {
        self.kind
    }

    pub fn gains(&self) -> &ControlGains {
        &self.gains
    }

    pub fn assumed(&self) -> &LoadedVessel {
        &self.assumed
    }

    pub fn adaptive(&self) -> Option<&AdaptiveState> {
        self.adaptive.as_ref()
    }

    /// Override the desired-speed trajectory state.
    pub fn set_reference_speed(&mut self, u_ref: f64) {
        self.u_ref = u_ref;
    }

    pub fn reference_speed(&self) -> f64 {
        self.u_ref
    }

    /// Control force for the measured state. Does not advance internal state.
    pub fn command(&self, state: &SimState, setpoint: &Setpoint) -> ControlOutput {
        let nu = state.nu();
        let e_psi = heading_error(state.psi, setpoint.psi_d);
        let (u_d_ref, u_dot_d) = shape_desired_accel(state.u, setpoint, e_psi, &self.gains);
        let coeffs = self.assumed.coefficients(&nu);
        let mass = self.assumed.mass();
        let tau_z = bs_heading(
            &nu,
            e_psi,
            state.r,
            &coeffs,
            self.assumed.yaw_inertia,
            &self.gains,
        );
        let (tau_x, e_u) = match &self.adaptive {
            None => {
                let e_u = match self.gains.speed_reference {
                    SpeedReference::Setpoint => state.u - u_d_ref,
                    SpeedReference::Trajectory => state.u - self.u_ref,
                };
                let tau_x = bs_surge(
                    &nu,
                    u_dot_d,
                    e_u,
                    &coeffs,
                    mass,
                    &self.assumed.condition.surge_drag,
                    &self.gains,
                );
                (tau_x, e_u)
            }
            Some(est) => {
                let tau_x = abs_surge(&nu, est, u_d_ref, &coeffs, mass, &self.gains);
                (tau_x, state.u - u_d_ref)
            }
        };
        ControlOutput {
            tau: GeneralizedForce::new(tau_x, tau_z),
            u_d_ref,
            u_dot_d,
            e_u,
            e_psi,
        }
    }

    /// Advance the controller's internal states by one tick.
    ///
    /// `saturated` reports that both jets clipped the command issued with `out`.
    /// Returns whether the adaptive estimates were updated.
    pub fn advance(&mut self, state: &SimState, out: &ControlOutput, saturated: bool) -> bool {
        let dt = self.gains.tick;
        self.u_ref += out.u_dot_d * dt;
        match self.adaptive.as_mut() {
            None => false,
            Some(est) => {
                let adapt = !(saturated && self.gains.pause_when_saturated);
                est.step(state.u, out.u_d_ref, &self.gains, adapt);
                adapt
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ConditionLabel;
    use std::f64::consts::PI;

    #[test]
    fn heading_error_examples() {
        assert_eq!(heading_error(0.7, 0.7), 0.0);
        let e = heading_error(179f64.to_radians(), (-179f64).to_radians());
        assert!((e - (-2f64).to_radians()).abs() < 1e-12);
        let e = heading_error(151.4f64.to_radians(), 150f64.to_radians());
        assert!((e.to_degrees() - 1.4).abs() < 1e-9);
        assert_eq!(heading_error(PI, -PI), 0.0);
    }

    #[test]
    fn shaping_examples() {
        let g = ControlGains::default();
        let sp = Setpoint::new(1.5, 0.0);
        let (u_ref, a) = shape_desired_accel(0.3, &sp, 0.0, &g);
        assert_eq!(u_ref, 1.5);
        assert!((a - (1.2 * 1.2f64).tanh()).abs() < 1e-15);

        let (u_ref, _) = shape_desired_accel(0.3, &sp, 3.0, &g);
        assert!((u_ref - 0.75).abs() < 1e-6);

        let (u_ref, a) = shape_desired_accel(1.5, &sp, 0.0, &g);
        assert_eq!(u_ref, 1.5);
        assert_eq!(a, 0.0);
    }

    #[test]
    fn controller_kind_parse() {
        assert_eq!(
            "ABS".parse::<ControllerKind>().unwrap(),
            ControllerKind::AdaptiveBackstepping
        );
        assert_eq!(
            "bs".parse::<ControllerKind>().unwrap(),
            ControllerKind::Backstepping
        );
        assert!("pid".parse::<ControllerKind>().is_err());
    }

    #[test]
    fn gain_validation() {
        assert!(ControlGains::default().validate().is_ok());
        let g = ControlGains {
            surge_scale: 1.5,
            k_u: -1.0,
            ..ControlGains::default()
        };
        assert_eq!(g.problems().len(), 2);
    }

    #[test]
    fn at_rest_on_setpoint_needs_no_force() {
        let vessel = LoadedVessel::preset(ConditionLabel::Lightship);
        for kind in [
            ControllerKind::Backstepping,
            ControllerKind::AdaptiveBackstepping,
        ] {
            let c = Controller::new(kind, ControlGains::default(), vessel.clone(), 0.0).unwrap();
            let out = c.command(&SimState::at_rest(0.2), &Setpoint::new(0.0, 0.2));
            assert_eq!(out.tau.tau_x, 0.0, "{kind}");
            assert_eq!(out.tau.tau_z, 0.0, "{kind}");
        }
    }

    #[test]
    fn reference_trajectory_integrates_desired_accel() {
        let vessel = LoadedVessel::preset(ConditionLabel::Lightship);
        let gains = ControlGains {
            speed_reference: SpeedReference::Trajectory,
            ..ControlGains::default()
        };
        let mut c = Controller::new(ControllerKind::Backstepping, gains, vessel, 0.0).unwrap();
        let s = SimState::at_rest(0.0);
        let out = c.command(&s, &Setpoint::new(1.0, 0.0));
        assert_eq!(out.e_u, 0.0);
        c.advance(&s, &out, false);
        assert!((c.reference_speed() - out.u_dot_d * 0.01).abs() < 1e-15);
        let out = c.command(&s, &Setpoint::new(1.0, 0.0));
        assert!((out.e_u + out.u_dot_d * 0.01).abs() < 1e-3);
    }

    #[test]
    fn setpoint_error_is_against_shaped_speed() {
        let vessel = LoadedVessel::preset(ConditionLabel::Lightship);
        let c = Controller::new(
            ControllerKind::Backstepping,
            ControlGains::default(),
            vessel,
            0.0,
        )
        .unwrap();
        let out = c.command(&SimState::at_rest(0.0), &Setpoint::new(1.0, 0.0));
        assert_eq!(out.e_u, -1.0);
        assert_eq!(out.u_d_ref, 1.0);
    }
}
