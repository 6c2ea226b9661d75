use nalgebra::Vector3;

use crate::model::{state_derivative, GeneralizedForce, LoadedVessel, PlantKind, SimState};
use crate::{wrap_angle, Result};

fn offset(s: &SimState, eta_dot: &Vector3<f64>, nu_dot: &Vector3<f64>, h: f64) -> SimState {
    SimState {
        t: s.t + h,
        x: s.x + h * eta_dot[0],
        y: s.y + h * eta_dot[1],
        psi: s.psi + h * eta_dot[2],
        u: s.u + h * nu_dot[0],
        v: s.v + h * nu_dot[1],
        r: s.r + h * nu_dot[2],
    }
}

/// Classical fourth-order Runge-Kutta step with a state-dependent force.
/// The heading is re-wrapped after the step.
pub fn rk4_step<F>(
    state: &SimState,
    force: F,
    vessel: &LoadedVessel,
    plant: PlantKind,
    dt: f64,
) -> Result<SimState>
where
    F: Fn(&SimState) -> GeneralizedForce,
{
    let f = |s: &SimState| state_derivative(s, &force(s), vessel, plant);
    let k1 = f(state)?;
    let k2 = f(&offset(state, &k1.eta_dot, &k1.nu_dot, dt / 2.0))?;
    let k3 = f(&offset(state, &k2.eta_dot, &k2.nu_dot, dt / 2.0))?;
    let k4 = f(&offset(state, &k3.eta_dot, &k3.nu_dot, dt))?;
    let eta_dot = (k1.eta_dot + 2.0 * k2.eta_dot + 2.0 * k3.eta_dot + k4.eta_dot) / 6.0;
    let nu_dot = (k1.nu_dot + 2.0 * k2.nu_dot + 2.0 * k3.nu_dot + k4.nu_dot) / 6.0;
    let mut next = offset(state, &eta_dot, &nu_dot, dt);
    next.psi = wrap_angle(next.psi);
    Ok(next)
}

/// RK4 step under a constant generalized force.
pub fn integrate_step(
    state: &SimState,
    tau: &GeneralizedForce,
    vessel: &LoadedVessel,
    plant: PlantKind,
    dt: f64,
) -> Result<SimState> {
    rk4_step(state, |_| *tau, vessel, plant, dt)
}
