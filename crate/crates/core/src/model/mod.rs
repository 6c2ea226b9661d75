//! Vessel description, hydrodynamic coefficients and the 3-DOF
//! (surge, sway, yaw) equations of motion.
//!
//! Frames: earth-fixed North-East with heading `psi` measured clockwise from
//! North; body-fixed x forward, y to starboard, positive yaw rate turns the
//! bow to starboard.

mod coefficients;
mod drag;
mod dynamics;
mod geometry;
mod matrices;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

pub use coefficients::{coefficient_table, derive_coefficients, CoefficientRow, HydroCoefficients};
pub use drag::{hull_drag_split, surge_drag, HullDrag};
pub use dynamics::{state_derivative, LoadedVessel, PlantKind, StateDerivative};
pub use geometry::{ConditionLabel, DisplacementCondition, SurgeDrag, VesselGeometry};
pub use matrices::{coriolis_matrix, damping_matrix, kinematic_transform, mass_matrix};

/// Pose and body velocity at an instant.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SimState {
    /// s
    pub t: f64,
    /// North, m
    pub x: f64,
    /// East, m
    pub y: f64,
    /// Heading, rad in (-pi, pi]
    pub psi: f64,
    /// Surge, m/s
    pub u: f64,
    /// Sway, m/s
    pub v: f64,
    /// Yaw rate, rad/s
    pub r: f64,
}

impl SimState {
    pub fn at_rest(psi: f64) -> Self {
        Self {
            psi: crate::wrap_angle(psi),
            ..Self::default()
        }
    }

    pub fn eta(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.psi)
    }

    pub fn nu(&self) -> Vector3<f64> {
        Vector3::new(self.u, self.v, self.r)
    }

    pub fn is_finite(&self) -> bool {
        [self.t, self.x, self.y, self.psi, self.u, self.v, self.r]
            .iter()
            .all(|x| x.is_finite())
    }
}

/// Forces and moment acting in the body frame. Sway is never actuated.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GeneralizedForce {
    /// N
    pub tau_x: f64,
    /// N, always zero for this vehicle
    pub tau_y: f64,
    /// N m
    pub tau_z: f64,
}

impl GeneralizedForce {
    pub fn new(tau_x: f64, tau_z: f64) -> Self {
        Self {
            tau_x,
            tau_y: 0.0,
            tau_z,
        }
    }

    pub fn surge(tau_x: f64) -> Self {
        Self::new(tau_x, 0.0)
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.tau_x, self.tau_y, self.tau_z)
    }
}

impl std::ops::Add for GeneralizedForce {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            tau_x: self.tau_x + rhs.tau_x,
            tau_y: self.tau_y + rhs.tau_y,
            tau_z: self.tau_z + rhs.tau_z,
        }
    }
}

/// Which way a positive yaw rate shifts the per-hull surge velocities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HullVelocitySign {
    /// u_port = u + r B/2, u_stbd = u - r B/2: rigid-body velocity of the
    /// offset hulls, positive r speeds the outboard (port) hull.
    #[default]
    PortOutboard,
    /// u_port = u - r B/2, u_stbd = u + r B/2.
    StarboardOutboard,
}

/// Surge added mass that depends on the direction of acceleration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchingAddedMass {
    /// m_a1, kg, used while accelerating
    pub accelerating: f64,
    /// m_a2, kg, used while decelerating
    pub decelerating: f64,
}

/// Modelling switches and tuning constants that are not tied to one condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelOptions {
    /// Surge added mass as a fraction of the displacement (X_udot = -factor m).
    pub surge_added_mass_factor: f64,
    /// Lateral cylinder drag coefficient C_d.
    pub lateral_drag_coefficient: f64,
    /// Reference sway speed in the cross-flow term of Y_v, m/s.
    pub sway_reference_speed: f64,
    /// Divisor applied to the (1,3)/(3,1) added-mass Coriolis entries.
    pub coriolis_divisor: f64,
    pub hull_velocity_sign: HullVelocitySign,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub switching_added_mass: Option<SwitchingAddedMass>,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self {
            surge_added_mass_factor: 0.075,
            lateral_drag_coefficient: 1.1,
            sway_reference_speed: 1.0,
            coriolis_divisor: 200.0,
            hull_velocity_sign: HullVelocitySign::PortOutboard,
            switching_added_mass: None,
        }
    }
}
