use nalgebra::Vector3;

use super::ControlGains;
use crate::model::{HydroCoefficients, SurgeDrag};

/// Linearizing surge force. With an exact model and unit scale the surge
/// error obeys e_u' = -k_u e_u.
pub fn bs_surge(
    nu: &Vector3<f64>,
    u_dot_d: f64,
    e_u: f64,
    coeffs: &HydroCoefficients,
    mass: f64,
    drag: &SurgeDrag,
    gains: &ControlGains,
) -> f64 {
    let (u, v, r) = (nu[0], nu[1], nu[2]);
    let xi = u_dot_d - gains.k_u * e_u;
    let tau = (mass - coeffs.x_udot) * xi - (mass - coeffs.y_vdot) * v * r + drag.force(u);
    tau * gains.surge_scale
}

/// Heading moment for a constant desired heading. With an exact model and
/// unit scale e'' + k2 e' + k1 e = 0.
pub fn bs_heading(
    nu: &Vector3<f64>,
    e_psi: f64,
    e_psi_dot: f64,
    coeffs: &HydroCoefficients,
    yaw_inertia: f64,
    gains: &ControlGains,
) -> f64 {
    let (u, v, r) = (nu[0], nu[1], nu[2]);
    let tau = (yaw_inertia - coeffs.n_rdot) * (-gains.k1 * e_psi - gains.k2 * e_psi_dot)
        - (-coeffs.x_udot + coeffs.y_vdot) * u * v
        - coeffs.n_r * r;
    tau * gains.yaw_scale
}
