use nalgebra::{Matrix3, Vector3};

use super::HydroCoefficients;
use crate::{Error, Result};

/// Body-to-earth rotation J(psi) about the vertical axis.
pub fn kinematic_transform(psi: f64) -> Matrix3<f64> {
    let (s, c) = psi.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Rigid-body plus added-mass inertia with the origin at the center of gravity.
///
/// The sway/yaw cross term uses the mean of Y_rdot and N_vdot so the matrix
/// is symmetric; fails if the result is not positive definite.
pub fn mass_matrix(mass: f64, yaw_inertia: f64, c: &HydroCoefficients) -> Result<Matrix3<f64>> {
    let cross = -(c.y_rdot + c.n_vdot) / 2.0;
    let m = Matrix3::new(
        mass - c.x_udot,
        0.0,
        0.0,
        0.0,
        mass - c.y_vdot,
        cross,
        0.0,
        cross,
        yaw_inertia - c.n_rdot,
    );
    if m.iter().any(|x| !x.is_finite()) || m.cholesky().is_none() {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(m)
}

/// C(nu) = C_RB + C_A. The (1,3)/(3,1) added-mass entries are divided by
/// `divisor`; both entries of the pair are scaled so C stays skew-symmetric.
pub fn coriolis_matrix(
    c: &HydroCoefficients,
    nu: &Vector3<f64>,
    mass: f64,
    divisor: f64,
) -> Matrix3<f64> {
    let (u, v, r) = (nu[0], nu[1], nu[2]);
    let a13 = (c.y_vdot * v + (c.y_rdot + c.n_vdot) / 2.0 * r) / divisor;
    let a23 = -c.x_udot * u;
    let rb13 = -mass * v;
    let rb23 = mass * u;
    Matrix3::new(
        0.0,
        0.0,
        rb13 + a13,
        0.0,
        0.0,
        rb23 + a23,
        -(rb13 + a13),
        -(rb23 + a23),
        0.0,
    )
}

/// D(nu) = D_l + D_n.
///
/// The surge entry carries the drag-fit coefficients with their own sign
/// (X_u + X_u|u| |u|), so D(1,1) u is the resistive surge force; the
/// sway/yaw block is the negated coefficient sum.
pub fn damping_matrix(c: &HydroCoefficients, nu: &Vector3<f64>) -> Matrix3<f64> {
    let (au, av, ar) = (nu[0].abs(), nu[1].abs(), nu[2].abs());
    Matrix3::new(
        c.x_u + c.x_uu * au,
        0.0,
        0.0,
        0.0,
        -(c.y_v + c.y_vv * av + c.y_vr * ar),
        -(c.y_r + c.y_rv * av + c.y_rr * ar),
        0.0,
        -(c.n_v + c.n_vv * av + c.n_vr * ar),
        -(c.n_r + c.n_rv * av + c.n_rr * ar),
    )
}
