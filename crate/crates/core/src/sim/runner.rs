use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::integrator::rk4_step;
use super::log::{LogRecord, RunLog, RunMeta};
use super::scenario::{ActuatorMode, ControlSpec, EventKind, ScenarioSpec};
use crate::config::VesselConfig;
use crate::control::{lyapunov_diagnostics, ControlOutput, Controller, Setpoint, SurgeTruth};
use crate::model::{GeneralizedForce, SimState};
use crate::propulsion::{allocate, combine, MotorCommand, ThrusterModel};
use crate::{Error, Result};

const TIME_EPS: f64 = 1e-9;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Run a scenario on the default vessel.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<RunLog> {
    run_scenario_with(spec, &VesselConfig::default())
}

/// Run a scenario on a configured vessel. Deterministic: the same inputs
/// always give a bit-identical log.
pub fn run_scenario_with(spec: &ScenarioSpec, vessel_cfg: &VesselConfig) -> Result<RunLog> {
    vessel_cfg.validate()?;
    spec.validate(vessel_cfg)?;
    let mut plant = vessel_cfg.vessel(spec.condition)?;
    let thruster = spec.thruster.resolve(&plant.condition)?;
    let mut state = spec.initial.to_state();
    let geom = vessel_cfg.geometry;

    let mut controller = match &spec.control {
        ControlSpec::OpenLoop { .. } => None,
        ControlSpec::Closed {
            controller,
            tuned_for,
            gains,
            ..
        } => {
            let mut gains = *gains;
            gains.tick = spec.tick;
            let assumed = vessel_cfg.vessel(*tuned_for)?;
            Some(Controller::new(*controller, gains, assumed, state.u)?)
        }
    };
    let mut command = match &spec.control {
        ControlSpec::OpenLoop { command } => *command,
        ControlSpec::Closed { .. } => MotorCommand::default(),
    };
    let mut setpoint = match &spec.control {
        ControlSpec::OpenLoop { .. } => None,
        ControlSpec::Closed { setpoint, .. } => Some(setpoint.to_setpoint()),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let speed_noise = Normal::new(0.0, spec.noise.speed_std.max(0.0)).expect("valid std");
    let heading_noise =
        Normal::new(0.0, spec.noise.heading_std_deg.max(0.0).to_radians()).expect("valid std");

    let meta = RunMeta {
        tool_version: TOOL_VERSION.to_string(),
        scenario: spec.name.clone(),
        scenario_hash: spec.fingerprint(),
        config_hash: vessel_cfg.hash(),
        controller: spec
            .control
            .controller()
            .map_or("open_loop".to_string(), |c| c.as_str().to_string()),
    };

    let n_ticks = spec.tick_count();
    let steps = spec.steps_per_tick();
    let dt = spec.tick / steps as f64;
    let mut tow = 0.0;
    let mut impulses: Vec<(f64, f64, f64)> = Vec::new();
    let mut next_event = 0;
    let mut records = Vec::with_capacity(n_ticks + 1);

    for k in 0..=n_ticks {
        let t = k as f64 * spec.tick;
        state.t = t;
        let condition_pre = plant.condition.label.to_string();
        let mut labels = Vec::new();
        while next_event < spec.events.len() && spec.events[next_event].time <= t + TIME_EPS {
            let ev = &spec.events[next_event];
            match &ev.kind {
                EventKind::MassDrop { new_condition, .. } => {
                    plant = vessel_cfg.vessel(*new_condition)?;
                }
                EventKind::TowAttach { coefficient } => tow += coefficient,
                EventKind::Impulse { force, duration } => {
                    impulses.push((t, t + duration, *force));
                }
                EventKind::CommandChange {
                    command: new_command,
                    speed,
                    heading_deg,
                } => {
                    if let Some(c) = new_command {
                        command = *c;
                    }
                    if let Some(sp) = setpoint.as_mut() {
                        if let Some(u_d) = speed {
                            sp.u_d = *u_d;
                        }
                        if let Some(h) = heading_deg {
                            *sp = Setpoint::new(sp.u_d, h.to_radians());
                        }
                    }
                }
            }
            labels.push(ev.kind.label());
            next_event += 1;
        }

        let mut rec = LogRecord {
            t,
            x: state.x,
            y: state.y,
            psi: state.psi,
            u: state.u,
            v: state.v,
            r: state.r,
            u_d: f64::NAN,
            psi_d: f64::NAN,
            e_u: f64::NAN,
            e_psi: f64::NAN,
            u_m: f64::NAN,
            x_u_hat: f64::NAN,
            x_uu_hat: f64::NAN,
            a_d_hat: f64::NAN,
            lyapunov: f64::NAN,
            lyapunov_rate: f64::NAN,
            condition_pre,
            condition: plant.condition.label.to_string(),
            event: labels.join("+"),
            ..LogRecord::default()
        };

        // force held until the next tick, as a function of the stage state
        let applied: Applied;
        if let (Some(ctrl), Some(sp)) = (controller.as_mut(), setpoint.as_ref()) {
            let mut measured = state;
            if spec.noise.is_active() {
                measured.u += speed_noise.sample(&mut rng);
                measured.psi = crate::wrap_angle(measured.psi + heading_noise.sample(&mut rng));
            }
            let out = ctrl.command(&measured, sp);
            let saturated;
            match spec.actuator {
                ActuatorMode::Direct => {
                    saturated = false;
                    applied = Applied::Direct(out.tau);
                    rec.tau_x = out.tau.tau_x;
                    rec.tau_z = out.tau.tau_z;
                    rec.cmd_port = f64::NAN;
                    rec.cmd_stbd = f64::NAN;
                    rec.thrust_port = f64::NAN;
                    rec.thrust_stbd = f64::NAN;
                }
                ActuatorMode::Jets => {
                    let (cmd, sat) = jets_for(&out, &thruster, geom.hull_separation, state.u);
                    saturated = sat;
                    command = cmd;
                    applied = Applied::Jets(cmd);
                }
            }
            rec.u_d = sp.u_d;
            rec.psi_d = sp.psi_d;
            rec.e_u = out.e_u;
            rec.e_psi = out.e_psi;
            rec.saturated = saturated;
            if let Some(est) = ctrl.adaptive() {
                let a_m = ctrl.gains().reference_pole();
                let truth = SurgeTruth::effective(&plant, tow, ctrl.gains().surge_scale);
                let (v, v_dot) =
                    lyapunov_diagnostics(est, &truth, est.model_error(state.u), a_m, a_m);
                rec.u_m = est.u_m;
                rec.x_u_hat = est.x_u_hat;
                rec.x_uu_hat = est.x_uu_hat;
                rec.a_d_hat = est.a_d_hat;
                rec.lyapunov = v;
                rec.lyapunov_rate = v_dot;
            }
            rec.adapting = ctrl.advance(&measured, &out, saturated);
        } else {
            applied = Applied::Jets(command);
        }
        if let Applied::Jets(cmd) = applied {
            let (tp, ts) = thruster.apply(cmd, state.u);
            let f = combine(tp, ts, geom.hull_separation);
            rec.cmd_port = cmd.port;
            rec.cmd_stbd = cmd.stbd;
            rec.thrust_port = tp;
            rec.thrust_stbd = ts;
            rec.tau_x = f.tau_x;
            rec.tau_z = f.tau_z;
        }
        records.push(rec);

        if k == n_ticks {
            break;
        }
        for step in 0..steps {
            let t0 = t + step as f64 * dt;
            state.t = t0;
            let force = |s: &SimState| {
                let base = match applied {
                    Applied::Direct(tau) => tau,
                    Applied::Jets(cmd) => {
                        let (tp, ts) = thruster.apply(cmd, s.u);
                        combine(tp, ts, geom.hull_separation)
                    }
                };
                let impulse: f64 = impulses
                    .iter()
                    .filter(|(a, b, _)| s.t >= *a - TIME_EPS && s.t < *b - TIME_EPS)
                    .map(|(_, _, f)| f)
                    .sum();
                base + GeneralizedForce::surge(impulse - tow * s.u * s.u.abs())
            };
            state = rk4_step(&state, force, &plant, spec.plant, dt)?;
            if !state.is_finite() {
                return Err(Error::NonFinite {
                    time: state.t,
                    detail: format!("state {state:?}"),
                });
            }
        }
    }
    Ok(RunLog { meta, records })
}

#[derive(Debug, Clone, Copy)]
enum Applied {
    Direct(GeneralizedForce),
    Jets(MotorCommand),
}

/// Motor commands realizing the controller output, and whether both jets
/// are clipped.
fn jets_for(
    out: &ControlOutput,
    thruster: &ThrusterModel,
    hull_separation: f64,
    u: f64,
) -> (MotorCommand, bool) {
    let alloc = allocate(
        out.tau.tau_x,
        out.tau.tau_z,
        hull_separation,
        thruster.max_thrust,
    );
    let port = thruster.command_for(alloc.port, u);
    let stbd = thruster.command_for(alloc.stbd, u);
    let short = |cmd: f64, want: f64| cmd >= 1.0 && thruster.thrust(1.0, u) < want - 1e-9;
    let port_sat = alloc.port_saturated() || short(port, alloc.port);
    let stbd_sat = alloc.stbd_saturated() || short(stbd, alloc.stbd);
    (MotorCommand::new(port, stbd), port_sat && stbd_sat)
}
