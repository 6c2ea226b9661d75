//! Hydrodynamic coefficients built from strip-theory and lateral-cylinder
//! drag terms, each scaled by an empirically tuned non-dimensional factor.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{DisplacementCondition, ModelOptions, VesselGeometry};
use crate::{Error, Result};

/// Added-mass, linear and nonlinear damping coefficients (SNAME notation).
///
/// Signs follow the tabulated convention: dimensional terms are negative so
/// that `D = -[...]` yields positive damping. The surge pair `x_u`/`x_uu`
/// is the exception and keeps the drag-fit sign (`x_u > 0`, `x_uu < 0`).
#[allow(missing_docs)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HydroCoefficients {
    pub x_udot: f64,
    pub y_vdot: f64,
    pub y_rdot: f64,
    pub n_vdot: f64,
    pub n_rdot: f64,
    pub x_u: f64,
    pub y_v: f64,
    pub y_r: f64,
    pub n_v: f64,
    pub n_r: f64,
    /// X_u|u|
    pub x_uu: f64,
    /// Y_v|v|
    pub y_vv: f64,
    /// Y_v|r|
    pub y_vr: f64,
    /// Y_r|v|
    pub y_rv: f64,
    /// Y_r|r|
    pub y_rr: f64,
    /// N_v|v|
    pub n_vv: f64,
    /// N_v|r|
    pub n_vr: f64,
    /// N_r|v|
    pub n_rv: f64,
    /// N_r|r|
    pub n_rr: f64,
}

impl HydroCoefficients {
    /// Rescale the three speed-proportional linear terms from speed `from` to `to`.
    pub(crate) fn with_speed(mut self, from: f64, to: f64) -> Self {
        let k = if from == 0.0 { 0.0 } else { to / from };
        self.n_r *= k;
        self.n_v *= k;
        self.y_r *= k;
        self
    }
}

const F_N_VDOT: f64 = 2.5;
const F_N_RDOT: f64 = 1.2;
const F_Y_RDOT: f64 = 0.2;
const F_Y_VDOT: f64 = 0.9;
const F_Y_V: f64 = 0.5;
const F_N_R: f64 = 0.02;
const F_N_V: f64 = 0.06;
const F_Y_R: f64 = 6.0;

/// Dimensional terms for a given geometry, draft and speed.
struct Terms {
    /// -pi rho T^2 [(L-LCG)^2 + LCG^2] / 2
    sway_yaw_added: f64,
    n_rdot: f64,
    x_udot: f64,
    y_vdot: f64,
    y_v: f64,
    n_r: f64,
    /// -pi rho U T^2 L, shared by N_v and Y_r
    speed_scaled: f64,
    y_vv: f64,
    y_vr: f64,
    y_rr: f64,
    n_rr: f64,
}

impl Terms {
    fn new(geom: &VesselGeometry, mass: f64, draft: f64, speed: f64, opts: &ModelOptions) -> Self {
        let rho = geom.water_density;
        let l = geom.length_overall;
        let t = draft;
        let fwd = l - geom.lcg;
        let aft = geom.lcg;
        let b_hull = geom.hull_beam;
        let cd = opts.lateral_drag_coefficient;
        let strip = PI * rho * t * t;

        let cross_flow = 1.1 + 0.0045 * l / t - 0.1 * b_hull / t + 0.016 * (b_hull / t).powi(2);

        Self {
            sway_yaw_added: -strip * (fwd.powi(2) + aft.powi(2)) / 2.0,
            n_rdot: -(4.75 / 2.0 * PI * rho * b_hull / 2.0 * t.powi(4)
                + strip * (fwd.powi(3) + aft.powi(3)) / 3.0),
            x_udot: -mass,
            y_vdot: -strip * l,
            y_v: -40.0 * rho * opts.sway_reference_speed * cross_flow * (PI * t * l / 2.0),
            n_r: -strip * speed * l * l,
            speed_scaled: -strip * speed * l,
            y_vv: -rho * t * cd * l,
            y_vr: -rho * t * cd / 2.0 * (fwd.powi(2) - aft.powi(2)),
            y_rr: -rho * t * cd / 3.0 * (fwd.powi(3) + aft.powi(3)),
            n_rr: -rho * t * cd / 4.0 * (fwd.powi(4) + aft.powi(4)),
        }
    }
}

fn checked_draft(geom: &VesselGeometry, condition: &DisplacementCondition) -> Result<f64> {
    if !(geom.water_density > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "water density must be positive, got {}",
            geom.water_density
        )));
    }
    let draft = condition.draft(geom);
    if !(draft.is_finite() && draft > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "draft must be positive, got {draft} for {}",
            condition.label
        )));
    }
    Ok(draft)
}

/// Compute every hydrodynamic coefficient for `condition`, with the
/// speed-proportional terms (N_r, N_v, Y_r) evaluated at `nu`.
pub fn derive_coefficients(
    geom: &VesselGeometry,
    condition: &DisplacementCondition,
    nu: [f64; 3],
    opts: &ModelOptions,
) -> Result<HydroCoefficients> {
    let draft = checked_draft(geom, condition)?;
    let speed = nu[0].hypot(nu[1]);
    let t = Terms::new(geom, condition.mass, draft, speed, opts);
    Ok(HydroCoefficients {
        x_udot: opts.surge_added_mass_factor * t.x_udot,
        y_vdot: F_Y_VDOT * t.y_vdot,
        y_rdot: F_Y_RDOT * t.sway_yaw_added,
        n_vdot: F_N_VDOT * t.sway_yaw_added,
        n_rdot: F_N_RDOT * t.n_rdot,
        x_u: condition.surge_drag.linear,
        y_v: F_Y_V * t.y_v,
        y_r: F_Y_R * t.speed_scaled,
        n_v: F_N_V * t.speed_scaled,
        n_r: F_N_R * t.n_r,
        x_uu: condition.surge_drag.quadratic,
        y_vv: t.y_vv,
        y_vr: t.y_vr,
        y_rv: t.y_vr,
        y_rr: t.y_rr,
        n_vv: t.y_vr,
        n_vr: t.y_rr,
        n_rv: t.y_rr,
        n_rr: t.n_rr,
    })
}

/// One row of the exported coefficient table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientRow {
    pub name: &'static str,
    /// Non-dimensional correction factor; `None` for identified surge terms.
    pub factor: Option<f64>,
    /// Dimensional term; `None` for identified surge terms.
    pub term: Option<f64>,
    pub value: f64,
    pub unit: &'static str,
    pub velocity_dependent: bool,
}

/// Coefficient table in the conventional row order, at reference velocity `nu`.
pub fn coefficient_table(
    geom: &VesselGeometry,
    condition: &DisplacementCondition,
    nu: [f64; 3],
    opts: &ModelOptions,
) -> Result<Vec<CoefficientRow>> {
    let draft = checked_draft(geom, condition)?;
    let speed = nu[0].hypot(nu[1]);
    let t = Terms::new(geom, condition.mass, draft, speed, opts);
    let row = |name, factor: f64, term: f64, unit, velocity_dependent| CoefficientRow {
        name,
        factor: Some(factor),
        term: Some(term),
        value: factor * term,
        unit,
        velocity_dependent,
    };
    let fitted = |name, value, unit| CoefficientRow {
        name,
        factor: None,
        term: None,
        value,
        unit,
        velocity_dependent: false,
    };
    Ok(vec![
        row("N_vdot", F_N_VDOT, t.sway_yaw_added, "kg m", false),
        row("N_rdot", F_N_RDOT, t.n_rdot, "kg m^2", false),
        row(
            "X_udot",
            opts.surge_added_mass_factor,
            t.x_udot,
            "kg",
            false,
        ),
        row("Y_rdot", F_Y_RDOT, t.sway_yaw_added, "kg m", false),
        row("Y_vdot", F_Y_VDOT, t.y_vdot, "kg", false),
        fitted("X_u", condition.surge_drag.linear, "N s/m"),
        row("Y_v", F_Y_V, t.y_v, "N s/m", false),
        row("N_r", F_N_R, t.n_r, "N m s", true),
        row("N_v", F_N_V, t.speed_scaled, "N s", true),
        row("Y_r", F_Y_R, t.speed_scaled, "N s", true),
        fitted("X_u|u|", condition.surge_drag.quadratic, "N s^2/m^2"),
        row("Y_v|v|", 1.0, t.y_vv, "N s^2/m^2", false),
        row("Y_v|r|", 1.0, t.y_vr, "N s^2/m", false),
        row("Y_r|v|", 1.0, t.y_vr, "N s^2/m", false),
        row("Y_r|r|", 1.0, t.y_rr, "N s^2", false),
        row("N_v|v|", 1.0, t.y_vr, "N s^2/m", false),
        row("N_v|r|", 1.0, t.y_rr, "N s^2", false),
        row("N_r|v|", 1.0, t.y_rr, "N s^2", false),
        row("N_r|r|", 1.0, t.n_rr, "N m s^2", false),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lightship(nu: [f64; 3]) -> HydroCoefficients {
        derive_coefficients(
            &VesselGeometry::wam_v14(),
            &DisplacementCondition::lightship(),
            nu,
            &ModelOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn surge_added_mass_is_7_5_percent() {
        let c = lightship([0.0; 3]);
        assert!((c.x_udot + 16.5).abs() < 1e-12);
    }

    #[test]
    fn sway_quadratic_drag_by_hand() {
        // rho T Cd L = 1025 * 0.105 * 1.1 * 4.29
        let by_hand = -(1025.0 * 0.105) * 1.1 * 4.29;
        let c = lightship([0.0; 3]);
        assert!((c.y_vv - by_hand).abs() < 1e-9);
        assert!((c.y_vv + 507.9).abs() < 0.05);
    }

    #[test]
    fn zero_speed_zeroes_exactly_the_speed_scaled_terms() {
        let at_rest = lightship([0.0; 3]);
        let moving = lightship([1.0, 0.2, 0.1]);
        assert_eq!(at_rest.n_r, 0.0);
        assert_eq!(at_rest.n_v, 0.0);
        assert_eq!(at_rest.y_r, 0.0);
        assert!(moving.n_r < 0.0 && moving.n_v < 0.0 && moving.y_r < 0.0);

        let mut a = at_rest;
        let mut b = moving;
        for c in [&mut a, &mut b] {
            c.n_r = 0.0;
            c.n_v = 0.0;
            c.y_r = 0.0;
        }
        assert_eq!(a, b);
        let nonzero = [
            a.x_udot, a.y_vdot, a.y_rdot, a.n_vdot, a.n_rdot, a.x_u, a.y_v, a.x_uu, a.y_vv, a.y_vr,
            a.y_rv, a.y_rr, a.n_vv, a.n_vr, a.n_rv, a.n_rr,
        ];
        assert!(nonzero.iter().all(|x| *x != 0.0));
    }

    #[test]
    fn speed_scaled_terms_are_linear_in_speed() {
        let one = lightship([1.0, 0.0, 0.0]);
        let three = lightship([1.8, 2.4, 0.0]);
        assert!((three.n_r / one.n_r - 3.0).abs() < 1e-12);
        assert!((three.y_r / one.y_r - 3.0).abs() < 1e-12);
        let rescaled = one.with_speed(1.0, 3.0);
        assert!((rescaled.n_v - three.n_v).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_positive_draft_and_density() {
        let mut cond = DisplacementCondition::lightship();
        cond.draft_override = Some(-0.1);
        let opts = ModelOptions::default();
        let geom = VesselGeometry::wam_v14();
        assert!(derive_coefficients(&geom, &cond, [0.0; 3], &opts).is_err());

        let mut geom = VesselGeometry::wam_v14();
        geom.water_density = 0.0;
        let cond = DisplacementCondition::lightship();
        assert!(derive_coefficients(&geom, &cond, [0.0; 3], &opts).is_err());
    }

    #[test]
    fn table_rows_agree_with_struct() {
        let geom = VesselGeometry::wam_v14();
        let cond = DisplacementCondition::full();
        let opts = ModelOptions::default();
        let nu = [1.2, 0.1, 0.0];
        let c = derive_coefficients(&geom, &cond, nu, &opts).unwrap();
        let rows = coefficient_table(&geom, &cond, nu, &opts).unwrap();
        assert_eq!(rows.len(), 19);
        let get = |name: &str| rows.iter().find(|r| r.name == name).unwrap().value;
        assert_eq!(get("X_udot"), c.x_udot);
        assert_eq!(get("N_rdot"), c.n_rdot);
        assert_eq!(get("Y_r"), c.y_r);
        assert_eq!(get("N_r|r|"), c.n_rr);
        assert_eq!(get("X_u|u|"), c.x_uu);
        assert_eq!(rows[0].name, "N_vdot");
        assert_eq!(rows[18].name, "N_r|r|");
    }
}
