//! Fixed-step simulation of the vehicle under open-loop commands or closed-loop
//! control, with timed events and per-tick telemetry.

mod integrator;
mod log;
mod runner;
mod scenario;

pub use integrator::{integrate_step, rk4_step};
pub use log::{EventRecord, LogRecord, RunLog, RunMeta, COLUMNS};
pub use runner::{run_scenario, run_scenario_with, TOOL_VERSION};
pub use scenario::{
    builtin, scenario_acceleration, scenario_setpoint, scenario_variable_drag,
    scenario_variable_mass, scenario_variable_mass_drag, scenario_zigzag, ActuatorMode,
    ControlSpec, Event, EventKind, InitialState, NoiseSpec, ScenarioSpec, SetpointSpec,
    ThrusterSpec, BUILTIN_SCENARIOS,
};
