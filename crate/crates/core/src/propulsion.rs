//! Waterjet thrust models, thrust allocation between the two jets and the
//! forward-only saturation of each jet.

use serde::{Deserialize, Serialize};

use crate::model::{DisplacementCondition, GeneralizedForce};
use crate::{Error, Result};

/// Normalized motor commands n/n_max for the two jets.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MotorCommand {
    pub port: f64,
    pub stbd: f64,
}

impl MotorCommand {
    /// Commands clamped to [0, 1]; the jets cannot reverse.
    pub fn new(port: f64, stbd: f64) -> Self {
        Self {
            port: clamp_unit(port),
            stbd: clamp_unit(stbd),
        }
    }

    pub fn both(cmd: f64) -> Self {
        Self::new(cmd, cmd)
    }
}

fn clamp_unit(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThrusterKind {
    /// Static thrust proportional to command, independent of speed.
    #[default]
    BollardLinear,
    /// Propeller-like T = a2 n^2 + a1 u n with lumped coefficients.
    PumpAnalog,
}

/// Per-jet thrust model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThrusterModel {
    pub kind: ThrusterKind,
    /// Bollard (zero-speed, full-command) thrust of one jet, N.
    pub max_thrust: f64,
    /// a1, N/(m/s) per unit command; pump-analog only, <= 0.
    pub decay: f64,
}

impl ThrusterModel {
    pub fn bollard(max_thrust: f64) -> Self {
        Self {
            kind: ThrusterKind::BollardLinear,
            max_thrust,
            decay: 0.0,
        }
    }

    /// Pump-analog jet with a2 = `max_thrust` and a1 = `decay`.
    pub fn pump(max_thrust: f64, decay: f64) -> Result<Self> {
        if !(decay <= 0.0) {
            return Err(Error::Config(format!(
                "pump thrust decay must be <= 0, got {decay}"
            )));
        }
        Ok(Self {
            kind: ThrusterKind::PumpAnalog,
            max_thrust,
            decay,
        })
    }

    /// Thrust of one jet at command `cmd` and surge speed `u`, N.
    pub fn thrust(&self, cmd: f64, u: f64) -> f64 {
        match self.kind {
            ThrusterKind::BollardLinear => bollard_thrust(cmd, self.max_thrust),
            ThrusterKind::PumpAnalog => pump_analog_thrust(cmd, u, self),
        }
    }

    /// Largest thrust one jet can deliver at speed `u`.
    pub fn available(&self, u: f64) -> f64 {
        self.thrust(1.0, u)
    }

    /// Smallest command in [0, 1] whose thrust reaches `thrust`.
    pub fn command_for(&self, thrust: f64, u: f64) -> f64 {
        thrust_to_command(thrust, u, self)
    }

    /// Thrust delivered by both jets.
    pub fn apply(&self, cmd: MotorCommand, u: f64) -> (f64, f64) {
        (self.thrust(cmd.port, u), self.thrust(cmd.stbd, u))
    }
}

/// Linear static thrust: `cmd` x `max_thrust`.
pub fn bollard_thrust(cmd: f64, max_thrust: f64) -> f64 {
    clamp_unit(cmd) * max_thrust
}

/// Pump-analog thrust a2 cmd^2 + a1 u cmd, never negative.
pub fn pump_analog_thrust(cmd: f64, u: f64, model: &ThrusterModel) -> f64 {
    let n = clamp_unit(cmd);
    (model.max_thrust * n * n + model.decay * u * n).max(0.0)
}

/// Per-jet decay a1 that makes full-command thrust of both jets equal the
/// drag of `condition` at `target_speed`.
pub fn calibrate_thrust_decay(
    bollard_total: f64,
    target_speed: f64,
    condition: &DisplacementCondition,
) -> Result<f64> {
    if !(target_speed > 0.0 && target_speed.is_finite()) {
        return Err(Error::InfeasibleCalibration(format!(
            "target speed must be positive, got {target_speed}"
        )));
    }
    if target_speed > condition.surge_drag.cap_speed {
        return Err(Error::InfeasibleCalibration(format!(
            "target speed {target_speed} m/s lies past the drag-fit cap of {} m/s",
            condition.surge_drag.cap_speed
        )));
    }
    let drag = condition.surge_drag.force(target_speed);
    if drag > bollard_total {
        return Err(Error::InfeasibleCalibration(format!(
            "drag {drag:.3} N at {target_speed} m/s exceeds bollard thrust {bollard_total} N"
        )));
    }
    Ok((drag - bollard_total) / (2.0 * target_speed))
}

/// Jet thrusts before and after the forward-only clamp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Allocation {
    pub port: f64,
    pub stbd: f64,
    pub port_raw: f64,
    pub stbd_raw: f64,
}

impl Allocation {
    pub fn port_saturated(&self) -> bool {
        self.port != self.port_raw
    }

    pub fn stbd_saturated(&self) -> bool {
        self.stbd != self.stbd_raw
    }

    pub fn both_saturated(&self) -> bool {
        self.port_saturated() && self.stbd_saturated()
    }
}

/// Split a commanded surge force and yaw moment between the jets and clamp
/// each to [0, `max_thrust`]. A clipped jet is not compensated by the other.
pub fn allocate(tau_x: f64, tau_z: f64, hull_separation: f64, max_thrust: f64) -> Allocation {
    let port_raw = tau_x / 2.0 + tau_z / hull_separation;
    let stbd_raw = tau_x / 2.0 - tau_z / hull_separation;
    Allocation {
        port: port_raw.clamp(0.0, max_thrust),
        stbd: stbd_raw.clamp(0.0, max_thrust),
        port_raw,
        stbd_raw,
    }
}

/// Generalized force produced by the two jet thrusts.
pub fn combine(port: f64, stbd: f64, hull_separation: f64) -> GeneralizedForce {
    GeneralizedForce::new(port + stbd, (port - stbd) * hull_separation / 2.0)
}

/// Inverse thrust model; 0 for non-positive thrust and 1 past saturation.
pub fn thrust_to_command(thrust: f64, u: f64, model: &ThrusterModel) -> f64 {
    if !(thrust > 0.0) {
        return 0.0;
    }
    let cmd = match model.kind {
        ThrusterKind::BollardLinear => thrust / model.max_thrust,
        ThrusterKind::PumpAnalog => {
            let a2 = model.max_thrust;
            let b = model.decay * u;
            (-b + (b * b + 4.0 * a2 * thrust).sqrt()) / (2.0 * a2)
        }
    };
    clamp_unit(cmd)
}
