use nalgebra::Vector3;
use serde::Serialize;

use super::ControlGains;
use crate::model::{HydroCoefficients, LoadedVessel};

/// Reference model and parameter estimates of the adaptive surge law.
///
/// The drag estimates use the resistive convention of the drag fits, so
/// `x_u_hat u + x_uu_hat u|u|` is the force the controller expects to
/// overcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdaptiveState {
    /// Reference-model speed, m/s
    pub u_m: f64,
    pub x_u_hat: f64,
    pub x_uu_hat: f64,
    /// Feed-forward gain on the desired speed
    pub a_d_hat: f64,
    /// Adaptation gain in force units
    pub gamma: f64,
}

impl AdaptiveState {
    /// Estimates that make the assumed vessel follow the reference model
    /// exactly: the drag fit plus the reference pole, a_d = h b_m, all seen
    /// through the surge scale factor.
    pub fn initial(assumed: &LoadedVessel, gains: &ControlGains, u0: f64) -> Self {
        let truth = SurgeTruth::effective(assumed, 0.0, gains.surge_scale);
        let a_m = gains.reference_pole();
        let gamma = if gains.normalize_gamma {
            gains.gamma * truth.h
        } else {
            gains.gamma
        };
        Self {
            u_m: u0,
            x_u_hat: truth.linear - truth.h * a_m,
            x_uu_hat: truth.quadratic,
            a_d_hat: truth.h * a_m,
            gamma,
        }
    }

    /// Estimates at the unscaled drag fit of the assumed condition and
    /// a_d = h b_m, with no reference-pole term.
    pub fn drag_fit(assumed: &LoadedVessel, gains: &ControlGains, u0: f64) -> Self {
        let drag = assumed.condition.surge_drag;
        Self {
            x_u_hat: drag.linear,
            x_uu_hat: drag.quadratic,
            a_d_hat: assumed.surge_inertia() * gains.reference_pole(),
            ..Self::initial(assumed, gains, u0)
        }
    }

    /// Model error e_m = u - u_m.
    pub fn model_error(&self, u: f64) -> f64 {
        u - self.u_m
    }

    /// One controller tick: explicit-Euler estimate update (when `adapt`)
    /// followed by the reference-model step.
    pub fn step(&mut self, u: f64, u_d: f64, gains: &ControlGains, adapt: bool) {
        let dt = gains.tick;
        let e_m = self.model_error(u);
        if adapt {
            let g = self.gamma * e_m * dt;
            self.x_u_hat -= g * u;
            if !gains.freeze_secondary_estimates {
                self.x_uu_hat -= g * u * u.abs();
                self.a_d_hat -= g * u_d;
            }
        }
        let a_m = gains.reference_pole();
        self.u_m = reference_model_step(self.u_m, u_d, a_m, a_m, dt);
    }
}

/// Exact step of u_m' = -a_m u_m + b_m u_d with u_d held over `dt`.
pub fn reference_model_step(u_m: f64, u_d: f64, a_m: f64, b_m: f64, dt: f64) -> f64 {
    let target = b_m / a_m * u_d;
    target + (u_m - target) * (-a_m * dt).exp()
}

/// Adaptive surge force for the current estimates.
pub fn abs_surge(
    nu: &Vector3<f64>,
    est: &AdaptiveState,
    u_d: f64,
    coeffs: &HydroCoefficients,
    mass: f64,
    gains: &ControlGains,
) -> f64 {
    let (u, v, r) = (nu[0], nu[1], nu[2]);
    let tau = -(mass - coeffs.y_vdot) * v * r
        + est.x_u_hat * u
        + est.x_uu_hat * u * u.abs()
        + est.a_d_hat * u_d;
    tau * gains.surge_scale
}

/// True surge parameters as seen by the adaptive law, i.e. divided by the
/// surge scale factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurgeTruth {
    pub h: f64,
    pub linear: f64,
    pub quadratic: f64,
}

impl SurgeTruth {
    /// `tow` is the extra quadratic resistance c_t of a towed body.
    pub fn effective(plant: &LoadedVessel, tow: f64, surge_scale: f64) -> Self {
        let drag = plant.condition.surge_drag;
        Self {
            h: plant.surge_inertia() / surge_scale,
            linear: drag.linear / surge_scale,
            quadratic: (drag.quadratic + tow) / surge_scale,
        }
    }
}

/// Lyapunov function V and its continuous-time rate for the adaptive surge
/// loop. Needs the true plant, so it is a simulation-only diagnostic.
pub fn lyapunov_diagnostics(
    est: &AdaptiveState,
    truth: &SurgeTruth,
    e_m: f64,
    a_m: f64,
    b_m: f64,
) -> (f64, f64) {
    let h = truth.h;
    let p1 = est.x_u_hat - truth.linear + h * a_m;
    let p2 = est.x_uu_hat - truth.quadratic;
    let p3 = est.a_d_hat - h * b_m;
    let v = h.abs() * e_m * e_m + (p1 * p1 + p2 * p2 + p3 * p3) / est.gamma;
    // + 0.0 keeps -0 out of the logs
    let v_dot = -2.0 * a_m * e_m * e_m * h.abs() + 0.0;
    (v, v_dot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConditionLabel, DisplacementCondition};

    #[test]
    fn reference_model_examples() {
        assert_eq!(reference_model_step(1.5, 1.5, 1.2, 1.2, 0.01), 1.5);
        let mut u_m = 0.0;
        for _ in 0..100 {
            u_m = reference_model_step(u_m, 1.5, 1.2, 1.2, 0.01);
        }
        let exact = 1.5 * (1.0 - (-1.2f64).exp());
        assert!((u_m - exact).abs() < 1e-12);
        assert!((u_m - 1.048).abs() < 5e-4);
        let far = reference_model_step(0.0, 1.5, 1.2, 1.2, 1e3);
        assert!((far - 1.5).abs() < 1e-12);
    }

    #[test]
    fn no_adaptation_without_model_error() {
        let vessel = LoadedVessel::preset(ConditionLabel::Lightship);
        let g = ControlGains::default();
        let mut est = AdaptiveState::initial(&vessel, &g, 1.0);
        est.u_m = 1.0;
        let before = est;
        est.step(1.0, 1.0, &g, true);
        assert_eq!(est.x_u_hat, before.x_u_hat);
        assert_eq!(est.x_uu_hat, before.x_uu_hat);
        assert_eq!(est.a_d_hat, before.a_d_hat);
    }

    #[test]
    fn initial_estimates_follow_assumed_drag() {
        let vessel = LoadedVessel::preset(ConditionLabel::Lightship);
        let g = ControlGains::default();
        let fit = AdaptiveState::drag_fit(&vessel, &g, 0.0);
        assert_eq!(fit.x_u_hat, 55.771);
        assert_eq!(fit.x_uu_hat, -6.9627);
        assert!((fit.a_d_hat - 236.5 * 1.2).abs() < 1e-12);
        let est = AdaptiveState::initial(&vessel, &g, 0.0);
        assert!((est.x_u_hat - (55.771 - 236.5 * 1.2) / 0.5).abs() < 1e-9);
        assert!((est.x_uu_hat + 6.9627 / 0.5).abs() < 1e-12);
        assert!((est.a_d_hat - 236.5 * 1.2 / 0.5).abs() < 1e-9);
        let truth = SurgeTruth::effective(&vessel, 0.0, g.surge_scale);
        assert!(lyapunov_diagnostics(&est, &truth, 0.0, 1.2, 1.2).0.abs() < 1e-9);
        assert!((est.gamma - 0.05 * 236.5 / 0.5).abs() < 1e-12);
        let raw = ControlGains {
            normalize_gamma: false,
            ..g
        };
        assert_eq!(AdaptiveState::initial(&vessel, &raw, 0.0).gamma, 0.05);
    }

    #[test]
    fn lyapunov_at_exact_estimates() {
        let vessel = LoadedVessel::preset(ConditionLabel::Lightship);
        let g = ControlGains::unscaled();
        let est = AdaptiveState::drag_fit(&vessel, &g, 0.0);
        let truth = SurgeTruth::effective(&vessel, 0.0, 1.0);
        let (v, v_dot) = lyapunov_diagnostics(&est, &truth, 0.0, 1.2, 1.2);
        let h = 236.5;
        assert!((v - (h * 1.2f64).powi(2) / est.gamma).abs() < 1e-9);
        assert_eq!(v_dot, 0.0);
        let (_, v_dot) = lyapunov_diagnostics(&est, &truth, 0.1, 1.2, 1.2);
        assert!(v_dot < 0.0);
    }

    #[test]
    fn lyapunov_rate_matches_finite_difference() {
        // scalar surge loop on the full-load plant with lightship-tuned estimates
        let assumed = LoadedVessel::preset(ConditionLabel::Lightship);
        let plant = DisplacementCondition::full();
        let h_true = 246.0 * 1.075;
        let g = ControlGains {
            tick: 1e-4,
            ..ControlGains::default()
        };
        let coeffs = assumed.coefficients(&Vector3::zeros());
        let mut est = AdaptiveState::initial(&assumed, &g, 0.0);
        let truth = SurgeTruth {
            h: h_true / g.surge_scale,
            linear: plant.surge_drag.linear / g.surge_scale,
            quadratic: plant.surge_drag.quadratic / g.surge_scale,
        };
        let (a_m, u_d) = (1.2, 1.0);
        let mut u = 0.0;
        let mut prev = lyapunov_diagnostics(&est, &truth, est.model_error(u), a_m, a_m);
        for k in 0..20_000 {
            let tau = abs_surge(&Vector3::new(u, 0.0, 0.0), &est, u_d, &coeffs, 246.0, &g);
            let u_next = u + g.tick * (tau - plant.surge_drag.force(u)) / h_true;
            est.step(u, u_d, &g, true);
            u = u_next;
            let now = lyapunov_diagnostics(&est, &truth, est.model_error(u), a_m, a_m);
            let predicted = prev.1 * g.tick;
            let actual = now.0 - prev.0;
            assert!(
                (actual - predicted).abs() <= 1e-2 * prev.0 * g.tick + 1e-9,
                "step {k}: dV {actual} vs {predicted}"
            );
            prev = now;
        }
    }
}
