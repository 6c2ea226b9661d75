use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::{
    coriolis_matrix, damping_matrix, derive_coefficients, hull_drag_split, kinematic_transform,
    mass_matrix, DisplacementCondition, GeneralizedForce, HydroCoefficients, ModelOptions,
    SimState, VesselGeometry,
};
use crate::{Error, Result};

/// Which equations of motion drive the plant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlantKind {
    /// Full coupled model: M nu_dot + C(nu) nu + D(nu) nu = tau plus hull drag.
    #[default]
    Full,
    /// The decoupled surge, sway and yaw equations the controllers are designed on.
    Design,
}

/// Geometry and a loading condition resolved into the quantities the
/// equations of motion need.
#[derive(Debug, Clone)]
pub struct LoadedVessel {
    pub geometry: VesselGeometry,
    pub condition: DisplacementCondition,
    pub options: ModelOptions,
    pub draft: f64,
    pub yaw_inertia: f64,
    /// Coefficients with the speed-scaled terms evaluated at 1 m/s.
    unit_speed: HydroCoefficients,
    mass: Matrix3<f64>,
    mass_inv: Matrix3<f64>,
    /// Inverse with the decelerating surge added mass (switching model only).
    mass_inv_decel: Option<Matrix3<f64>>,
}

impl LoadedVessel {
    pub fn new(
        geometry: VesselGeometry,
        condition: DisplacementCondition,
        options: ModelOptions,
    ) -> Result<Self> {
        geometry.validate()?;
        condition.validate()?;
        let unit_speed = derive_coefficients(&geometry, &condition, [1.0, 0.0, 0.0], &options)?;
        let yaw_inertia = geometry.yaw_inertia_for(condition.mass);
        let mut coeffs = unit_speed;
        let mut mass_inv_decel = None;
        if let Some(sw) = options.switching_added_mass {
            if !(sw.accelerating >= 0.0 && sw.decelerating >= 0.0) {
                return Err(Error::InvalidCondition(
                    "switching added mass must be non-negative".into(),
                ));
            }
            coeffs.x_udot = -sw.decelerating;
            let decel = mass_matrix(condition.mass, yaw_inertia, &coeffs)?;
            mass_inv_decel = Some(decel.try_inverse().ok_or(Error::SingularMassMatrix)?);
            coeffs.x_udot = -sw.accelerating;
        }
        let mass = mass_matrix(condition.mass, yaw_inertia, &coeffs)?;
        let mass_inv = mass.try_inverse().ok_or(Error::SingularMassMatrix)?;
        Ok(Self {
            draft: condition.draft(&geometry),
            geometry,
            condition,
            options,
            yaw_inertia,
            unit_speed,
            mass,
            mass_inv,
            mass_inv_decel,
        })
    }

    /// Default WAM-V geometry in one of the preset conditions.
    pub fn preset(label: super::ConditionLabel) -> Self {
        Self::new(
            VesselGeometry::wam_v14(),
            DisplacementCondition::preset(label),
            ModelOptions::default(),
        )
        .expect("preset vessel is valid")
    }

    pub fn mass(&self) -> f64 {
        self.condition.mass
    }

    /// Coefficients with the speed-dependent terms evaluated at `nu`.
    pub fn coefficients(&self, nu: &Vector3<f64>) -> HydroCoefficients {
        self.unit_speed.with_speed(1.0, nu[0].hypot(nu[1]))
    }

    /// Inertia matrix (accelerating surge added mass when switching is on).
    pub fn mass_matrix(&self) -> &Matrix3<f64> {
        &self.mass
    }

    /// h = m - X_udot
    pub fn surge_inertia(&self) -> f64 {
        self.mass[(0, 0)]
    }

    /// Kinetic energy 1/2 nu^T M nu.
    pub fn kinetic_energy(&self, nu: &Vector3<f64>) -> f64 {
        0.5 * nu.dot(&(self.mass * nu))
    }

    /// Everything on the right of M nu_dot = f except the applied forces.
    fn hydrodynamic_force(&self, nu: &Vector3<f64>) -> Vector3<f64> {
        let c = self.coefficients(nu);
        let coriolis = coriolis_matrix(&c, nu, self.condition.mass, self.options.coriolis_divisor);
        let mut damping = damping_matrix(&c, nu);
        // surge resistance comes from the per-hull drag below
        damping[(0, 0)] = 0.0;
        let hull = hull_drag_split(
            &self.condition,
            nu,
            &self.geometry,
            self.options.hull_velocity_sign,
        );
        hull.as_force() - coriolis * nu - damping * nu
    }

    fn design_acceleration(&self, nu: &Vector3<f64>, tau: &Vector3<f64>) -> Vector3<f64> {
        let c = self.coefficients(nu);
        let m = self.condition.mass;
        let (u, v, r) = (nu[0], nu[1], nu[2]);
        let h = m - c.x_udot;
        let u_dot = (tau[0] + (m - c.y_vdot) * v * r - self.condition.surge_drag.force(u)) / h;
        let v_dot = (-h * u * r + c.y_v * v) / (m - c.y_vdot);
        let r_dot =
            (tau[2] + (-c.x_udot + c.y_vdot) * u * v + c.n_r * r) / (self.yaw_inertia - c.n_rdot);
        Vector3::new(u_dot, v_dot, r_dot)
    }
}

/// Pose rate and body acceleration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerivative {
    pub eta_dot: Vector3<f64>,
    pub nu_dot: Vector3<f64>,
}

/// Right-hand side of the equations of motion under the applied force `tau`.
pub fn state_derivative(
    state: &SimState,
    tau: &GeneralizedForce,
    vessel: &LoadedVessel,
    plant: PlantKind,
) -> Result<StateDerivative> {
    let nu = state.nu();
    let tau = tau.as_vector();
    let eta_dot = kinematic_transform(state.psi) * nu;
    let nu_dot = match plant {
        PlantKind::Full => {
            let f = tau + vessel.hydrodynamic_force(&nu);
            match vessel.mass_inv_decel {
                // surge is inertially decoupled, so the sign of the net surge
                // force fixes the sign of u_dot
                Some(decel) if f[0] < 0.0 => decel * f,
                _ => vessel.mass_inv * f,
            }
        }
        PlantKind::Design => vessel.design_acceleration(&nu, &tau),
    };
    if nu_dot.iter().chain(eta_dot.iter()).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            time: state.t,
            detail: format!("derivative {:?} at state {:?}", nu_dot.as_slice(), state),
        });
    }
    Ok(StateDerivative { eta_dot, nu_dot })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConditionLabel, SwitchingAddedMass};

    #[test]
    fn rest_is_equilibrium() {
        let vessel = LoadedVessel::preset(ConditionLabel::Lightship);
        let d = state_derivative(
            &SimState::at_rest(0.4),
            &GeneralizedForce::default(),
            &vessel,
            PlantKind::Full,
        )
        .unwrap();
        assert_eq!(d.eta_dot, Vector3::zeros());
        assert_eq!(d.nu_dot, Vector3::zeros());
    }

    #[test]
    fn bollard_push_from_rest() {
        let vessel = LoadedVessel::preset(ConditionLabel::Lightship);
        let d = state_derivative(
            &SimState::at_rest(0.0),
            &GeneralizedForce::surge(204.0),
            &vessel,
            PlantKind::Full,
        )
        .unwrap();
        assert!((d.nu_dot[0] - 204.0 / 236.5).abs() < 1e-12);
        assert_eq!(d.nu_dot[1], 0.0);
        assert_eq!(d.nu_dot[2], 0.0);
    }

    #[test]
    fn design_plant_matches_full_in_pure_surge() {
        let vessel = LoadedVessel::preset(ConditionLabel::Full);
        let s = SimState {
            u: 1.7,
            ..SimState::default()
        };
        let tau = GeneralizedForce::surge(120.0);
        let full = state_derivative(&s, &tau, &vessel, PlantKind::Full).unwrap();
        let design = state_derivative(&s, &tau, &vessel, PlantKind::Design).unwrap();
        assert!((full.nu_dot - design.nu_dot).norm() < 1e-12);
    }

    #[test]
    fn switching_added_mass_picks_by_force_sign() {
        let opts = ModelOptions {
            switching_added_mass: Some(SwitchingAddedMass {
                accelerating: 10.0,
                decelerating: 100.0,
            }),
            ..ModelOptions::default()
        };
        let vessel = LoadedVessel::new(
            VesselGeometry::wam_v14(),
            DisplacementCondition::lightship(),
            opts,
        )
        .unwrap();
        let rest = SimState::at_rest(0.0);
        let accel = state_derivative(
            &rest,
            &GeneralizedForce::surge(100.0),
            &vessel,
            PlantKind::Full,
        )
        .unwrap();
        assert!((accel.nu_dot[0] - 100.0 / 230.0).abs() < 1e-12);
        let coasting = SimState {
            u: 2.0,
            ..SimState::default()
        };
        let decel = state_derivative(
            &coasting,
            &GeneralizedForce::default(),
            &vessel,
            PlantKind::Full,
        )
        .unwrap();
        let drag = DisplacementCondition::lightship().surge_drag.force(2.0);
        assert!((decel.nu_dot[0] + drag / 320.0).abs() < 1e-12);
    }
}
