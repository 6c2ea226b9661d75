use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::{Error, Result};

/// Speed range over which the towed-body drag was measured, m/s.
pub const TOW_VALID_RANGE: (f64, f64) = (0.5, 1.6);

/// Surge drag D = quadratic u|u| + linear u.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DragFit {
    /// N/(m/s)^2
    pub quadratic: f64,
    /// N/(m/s)
    pub linear: f64,
    /// N
    pub residual_rms: f64,
    pub samples: usize,
}

/// Towed-body drag D = c_t u^2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TowFit {
    pub coefficient: f64,
    pub residual_rms: f64,
    pub samples: usize,
    pub valid_range: (f64, f64),
    /// Indices of points measured outside `valid_range`
    pub out_of_range: Vec<usize>,
}

/// Jet thrust T = a2 n^2 + a1 u n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThrustFit {
    /// Thrust at full command and zero speed, N
    pub a2: f64,
    /// Thrust decay with speed, N/(m/s)
    pub a1: f64,
    pub residual_rms: f64,
    pub samples: usize,
}

/// Ordinary least squares without intercept, by QR with a rank check.
fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Result<(DVector<f64>, f64)> {
    let n = rows.len();
    let p = rows[0].len();
    let a = DMatrix::from_fn(n, p, |i, j| rows[i][j]);
    let b = DVector::from_column_slice(y);
    let qr = a.clone().qr();
    let r = qr.r();
    let scale = r.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || r.diagonal().iter().any(|v| v.abs() <= 1e-12 * scale) {
        return Err(Error::Fit(
            "design is rank deficient; use samples at two or more distinct non-zero speeds".into(),
        ));
    }
    let qtb = qr.q().transpose() * &b;
    let x = r
        .solve_upper_triangular(&qtb)
        .ok_or_else(|| Error::Fit("singular triangular factor".into()))?;
    let resid = &a * &x - b;
    Ok((x, (resid.norm_squared() / n as f64).sqrt()))
}

fn check_finite(values: impl IntoIterator<Item = f64>) -> Result<()> {
    if values.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(Error::Fit("non-finite sample".into()))
    }
}

/// Least-squares fit of D = X_u|u| u|u| + X_u u to `(u, D)` samples.
pub fn fit_drag_quadratic(points: &[(f64, f64)]) -> Result<DragFit> {
    if points.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 samples, got {}",
            points.len()
        )));
    }
    check_finite(points.iter().flat_map(|&(u, d)| [u, d]))?;
    let rows: Vec<Vec<f64>> = points.iter().map(|&(u, _)| vec![u * u.abs(), u]).collect();
    let y: Vec<f64> = points.iter().map(|&(_, d)| d).collect();
    let (x, rms) = least_squares(&rows, &y)?;
    Ok(DragFit {
        quadratic: x[0],
        linear: x[1],
        residual_rms: rms,
        samples: points.len(),
    })
}

/// Least-squares c_t for D = c_t u^2. Points outside the measured speed
/// range are used but flagged.
pub fn fit_tow_drag(points: &[(f64, f64)]) -> Result<TowFit> {
    check_finite(points.iter().flat_map(|&(u, d)| [u, d]))?;
    let den: f64 = points.iter().map(|&(u, _)| u.powi(4)).sum();
    if den == 0.0 {
        return Err(Error::Fit(
            "need at least one sample at non-zero speed".into(),
        ));
    }
    let c = points.iter().map(|&(u, f)| f * u * u).sum::<f64>() / den;
    let ss: f64 = points.iter().map(|&(u, f)| (c * u * u - f).powi(2)).sum();
    let (lo, hi) = TOW_VALID_RANGE;
    Ok(TowFit {
        coefficient: c,
        residual_rms: (ss / points.len() as f64).sqrt(),
        samples: points.len(),
        valid_range: TOW_VALID_RANGE,
        out_of_range: points
            .iter()
            .enumerate()
            .filter(|(_, &(u, _))| !(lo..=hi).contains(&u.abs()))
            .map(|(k, _)| k)
            .collect(),
    })
}

/// Least-squares fit of T = a2 n^2 + a1 u n to `(u, n, T)` samples of one jet.
pub fn fit_thrust_curve(points: &[(f64, f64, f64)]) -> Result<ThrustFit> {
    if points.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 samples, got {}",
            points.len()
        )));
    }
    check_finite(points.iter().flat_map(|&(u, n, t)| [u, n, t]))?;
    let rows: Vec<Vec<f64>> = points.iter().map(|&(u, n, _)| vec![n * n, u * n]).collect();
    let y: Vec<f64> = points.iter().map(|&(_, _, t)| t).collect();
    let (x, rms) = least_squares(&rows, &y)?;
    Ok(ThrustFit {
        a2: x[0],
        a1: x[1],
        residual_rms: rms,
        samples: points.len(),
    })
}
