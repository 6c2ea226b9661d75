//! Maneuvering simulator and low-level control library for a twin-hull,
//! waterjet-propelled unmanned surface vehicle.
//!
//! The crate is organized bottom-up:
//!
//! * [`model`] - geometry, hydrodynamic coefficients and the 3-DOF equations of motion
//! * [`propulsion`] - waterjet thrust models, thrust allocation and saturation
//! * [`control`] - backstepping speed/heading control and the adaptive surge controller
//! * [`sim`] - fixed-step RK4 integration, scenarios, events and run logs
//! * [`analysis`] - steady-state detection, controller comparison and identification fits
//! * [`config`] - human-readable vessel and scenario configuration

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod control;
pub mod error;
pub mod model;
pub mod propulsion;
pub mod sim;

pub use error::{Error, Result};

/// Wrap an angle to the half-open interval (-pi, pi].
pub fn wrap_angle(angle: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut a = angle.rem_euclid(TAU);
    if a > PI {
        a -= TAU;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::wrap_angle;
    use std::f64::consts::PI;

    #[test]
    fn wrap_keeps_interval() {
        assert_eq!(wrap_angle(0.0), 0.0);
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        for k in -20..20 {
            let a = wrap_angle(0.37 * k as f64);
            assert!(a > -PI && a <= PI);
        }
    }
}
