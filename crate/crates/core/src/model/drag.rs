use nalgebra::Vector3;
use serde::Serialize;

use super::{DisplacementCondition, HullVelocitySign, VesselGeometry};

/// Resistive surge force for `condition` at surge speed `u`; acts against `u`.
pub fn surge_drag(condition: &DisplacementCondition, u: f64) -> f64 {
    condition.surge_drag.force(u)
}

/// Surge drag carried by each pontoon and the yaw moment it produces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HullDrag {
    /// N, resistive, opposes u_port
    pub port: f64,
    /// N, resistive, opposes u_stbd
    pub stbd: f64,
    /// (D_stbd - D_port) B/2, N m, added on the force side of the yaw equation
    pub yaw_moment: f64,
}

impl HullDrag {
    /// Generalized force contributed by the hull drag.
    pub fn as_force(&self) -> Vector3<f64> {
        Vector3::new(-(self.port + self.stbd), 0.0, self.yaw_moment)
    }
}

/// Split the surge drag between the two hulls using each hull's own surge
/// velocity; every hull carries half of the vessel drag coefficients.
pub fn hull_drag_split(
    condition: &DisplacementCondition,
    nu: &Vector3<f64>,
    geom: &VesselGeometry,
    sign: HullVelocitySign,
) -> HullDrag {
    let half_b = geom.hull_separation / 2.0;
    let shift = match sign {
        HullVelocitySign::PortOutboard => nu[2] * half_b,
        HullVelocitySign::StarboardOutboard => -nu[2] * half_b,
    };
    let u_port = nu[0] + shift;
    let u_stbd = nu[0] - shift;
    let port = condition.surge_drag.force(u_port) / 2.0;
    let stbd = condition.surge_drag.force(u_stbd) / 2.0;
    HullDrag {
        port,
        stbd,
        yaw_moment: (stbd - port) * half_b,
    }
}
