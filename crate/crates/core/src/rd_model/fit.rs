//! Least-squares fitting of R-D curve families.
//!
//! Polynomial and logarithmic fits are both linear least-squares problems. They
//! are solved with a Householder QR factorisation of the column-equilibrated
//! design matrix rather than the normal equations: Vandermonde columns on a
//! 0.2–6 Mbps span differ by orders of magnitude and squaring the condition
//! number would cost most of the available precision.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::CubicRD;
use crate::error::{Error, Result};

/// Scaled design matrices with a worse condition number are rejected.
const MAX_CONDITION: f64 = 1e10;

/// Relative slack under which two family MSEs count as tied.
const MSE_TIE: f64 = 1e-12;

/// Least-squares polynomial of degree 1, 2 or 3, zero-padded to a cubic.
pub fn fit_polynomial(points: &[(f64, f64)], degree: usize) -> Result<CubicRD> {
    if !(1..=3).contains(&degree) {
        return Err(Error::input(format!("polynomial degree must be 1, 2 or 3, got {degree}")));
    }
    check_points(points)?;
    let distinct = distinct_bitrates(points);
    if distinct < degree + 1 {
        return Err(Error::Degenerate(format!(
            "degree-{degree} fit needs {} distinct bitrates, got {distinct}",
            degree + 1
        )));
    }

    let design = DMatrix::from_fn(points.len(), degree + 1, |i, j| points[i].0.powi(j as i32));
    let solution = least_squares(design, points)?;

    let mut coeffs = [0.0; 4];
    coeffs[..=degree].copy_from_slice(solution.as_slice());
    let (lo, hi) = bitrate_span(points);
    CubicRD::new(coeffs, (lo, hi))
}

/// `Q = a·ln(b·R)`, stored in its linear form `a·ln R + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogFit {
    pub a: f64,
    /// `exp(intercept / a)`, or 1 when `a` is numerically zero.
    pub b: f64,
    /// `a·ln b`.
    pub intercept: f64,
}

impl LogFit {
    pub fn value(&self, r: f64) -> f64 {
        self.a * r.ln() + self.intercept
    }
}

/// Fits `Q = a·ln(b·R)` by solving the linear problem in `(a, a·ln b)`.
pub fn fit_log(points: &[(f64, f64)]) -> Result<LogFit> {
    check_points(points)?;
    if let Some(&(r, _)) = points.iter().find(|p| p.0 <= 0.0) {
        return Err(Error::Domain(format!("logarithmic fit needs bitrates > 0, got {r}")));
    }
    if distinct_bitrates(points) < 2 {
        return Err(Error::Degenerate(
            "logarithmic fit needs at least 2 distinct bitrates".into(),
        ));
    }
    let design = DMatrix::from_fn(points.len(), 2, |i, j| {
        if j == 0 {
            1.0
        } else {
            points[i].0.ln()
        }
    });
    let solution = least_squares(design, points)?;
    let (intercept, a) = (solution[0], solution[1]);
    let b = if a.abs() < 1e-12 { 1.0 } else { (intercept / a).exp() };
    Ok(LogFit { a, b, intercept })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitFamily {
    Linear,
    Logarithmic,
    Quadratic,
    Cubic,
}

impl FitFamily {
    /// Tie-break order: fewer parameters first.
    pub const PREFERENCE: [FitFamily; 4] = [
        FitFamily::Linear,
        FitFamily::Logarithmic,
        FitFamily::Quadratic,
        FitFamily::Cubic,
    ];
}

/// Per-family mean squared error on one point set. A family whose fit
/// failed is `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub linear: Option<f64>,
    pub quadratic: Option<f64>,
    pub cubic: Option<f64>,
    pub logarithmic: Option<f64>,
    pub chosen: FitFamily,
}

impl FitReport {
    pub fn mse(&self, family: FitFamily) -> Option<f64> {
        match family {
            FitFamily::Linear => self.linear,
            FitFamily::Quadratic => self.quadratic,
            FitFamily::Cubic => self.cubic,
            FitFamily::Logarithmic => self.logarithmic,
        }
    }
}

pub fn compare_fits(points: &[(f64, f64)]) -> Result<FitReport> {
    check_points(points)?;
    let distinct = distinct_bitrates(points);
    if distinct < 4 {
        return Err(Error::Degenerate(format!(
            "family comparison needs 4 distinct bitrates, got {distinct}"
        )));
    }

    let poly_mse = |degree| {
        fit_polynomial(points, degree)
            .ok()
            .map(|m| mean_squared_error(points, |r| m.value(r)))
    };
    let linear = poly_mse(1);
    let quadratic = poly_mse(2);
    let cubic = poly_mse(3);
    let logarithmic = fit_log(points)
        .ok()
        .map(|m| mean_squared_error(points, |r| m.value(r)));

    let mut report = FitReport {
        linear,
        quadratic,
        cubic,
        logarithmic,
        chosen: FitFamily::Linear,
    };

    let mut best: Option<(FitFamily, f64)> = None;
    for family in FitFamily::PREFERENCE {
        let Some(mse) = report.mse(family) else { continue };
        match best {
            Some((_, current)) if mse >= current - MSE_TIE * current.max(1.0) => {}
            _ => best = Some((family, mse)),
        }
    }
    report.chosen = best
        .map(|(f, _)| f)
        .ok_or_else(|| Error::Degenerate("no curve family could be fitted".into()))?;
    Ok(report)
}

pub(crate) fn mean_squared_error(points: &[(f64, f64)], model: impl Fn(f64) -> f64) -> f64 {
    let sum: f64 = points.iter().map(|&(r, q)| (model(r) - q).powi(2)).sum();
    sum / points.len() as f64
}

fn least_squares(mut design: DMatrix<f64>, points: &[(f64, f64)]) -> Result<DVector<f64>> {
    let rhs = DVector::from_iterator(points.len(), points.iter().map(|p| p.1));

    let norms: Vec<f64> = design.column_iter().map(|c| c.norm()).collect();
    if norms.iter().any(|&n| n == 0.0 || !n.is_finite()) {
        return Err(Error::Degenerate("design matrix has a zero column".into()));
    }
    for (j, &n) in norms.iter().enumerate() {
        design.column_mut(j).unscale_mut(n);
    }

    let singular = design.singular_values();
    let smax = singular.max();
    let smin = singular.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition.is_nan() || condition > MAX_CONDITION {
        return Err(Error::Conditioning {
            condition,
            message: format!("{} points, {} unknowns", points.len(), norms.len()),
        });
    }

    let qr = design.qr();
    let qtb = qr.q().tr_mul(&rhs);
    let mut x = qr
        .r()
        .solve_upper_triangular(&qtb)
        .ok_or_else(|| Error::Conditioning {
            condition,
            message: "triangular factor is singular".into(),
        })?;
    for (xi, n) in x.iter_mut().zip(&norms) {
        *xi /= n;
    }
    Ok(x)
}

fn check_points(points: &[(f64, f64)]) -> Result<()> {
    for &(r, q) in points {
        if !r.is_finite() || !q.is_finite() {
            return Err(Error::input(format!("non-finite point ({r}, {q})")));
        }
        if r <= 0.0 {
            return Err(Error::Domain(format!("bitrate must be > 0, got {r}")));
        }
    }
    Ok(())
}

fn distinct_bitrates(points: &[(f64, f64)]) -> usize {
    let mut rs: Vec<f64> = points.iter().map(|p| p.0).collect();
    rs.sort_by(f64::total_cmp);
    rs.dedup();
    rs.len()
}

fn bitrate_span(points: &[(f64, f64)]) -> (f64, f64) {
    points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const C6_1080: [f64; 4] = [33.335, 17.415, -4.521, 0.383];
    const C5_1080: [f64; 4] = [27.468, 15.563, -4.010, 0.341];

    fn default_grid() -> Vec<f64> {
        (0..10).map(|i| 0.2 + i as f64 * (5.8 / 9.0)).collect()
    }

    fn sample(coeffs: &[f64; 4], rs: &[f64]) -> Vec<(f64, f64)> {
        rs.iter().map(|&r| (r, crate::poly::eval(coeffs, r))).collect()
    }

    #[test]
    fn interpolates_four_points() {
        let pts = sample(&C6_1080, &[0.5, 1.5, 3.0, 5.5]);
        let m = fit_polynomial(&pts, 3).unwrap();
        for (got, want) in m.coeffs().iter().zip(C6_1080) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
        assert_eq!(m.valid_range(), (0.5, 5.5));
    }

    #[test]
    fn collinear_data_gives_line() {
        let pts: Vec<_> = [0.3, 0.9, 1.7, 2.2, 4.0, 5.1].iter().map(|&r| (r, 2.0 * r + 1.0)).collect();
        let c = fit_polynomial(&pts, 3).unwrap().coeffs();
        assert!((c[0] - 1.0).abs() < 1e-9);
        assert!((c[1] - 2.0).abs() < 1e-9);
        assert!(c[2].abs() < 1e-9 && c[3].abs() < 1e-9);
    }

    #[test]
    fn recovers_cubic_on_grid() {
        let pts = sample(&C5_1080, &default_grid());
        let c = fit_polynomial(&pts, 3).unwrap().coeffs();
        for (got, want) in c.iter().zip(C5_1080) {
            assert!((got - want).abs() < 1e-8, "{got} vs {want}");
        }
    }

    #[test]
    fn lower_degrees_are_zero_padded() {
        let pts = sample(&C5_1080, &default_grid());
        assert_eq!(fit_polynomial(&pts, 1).unwrap().coeffs()[2..], [0.0, 0.0]);
        assert_eq!(fit_polynomial(&pts, 2).unwrap().coeffs()[3], 0.0);
    }

    #[test]
    fn too_few_distinct_bitrates() {
        let pts = [(1.0, 30.0), (1.0, 31.0), (2.0, 32.0), (3.0, 33.0)];
        assert!(matches!(fit_polynomial(&pts, 3), Err(Error::Degenerate(_))));
        assert!(fit_polynomial(&pts, 2).is_ok());
        assert!(matches!(fit_polynomial(&pts, 4), Err(Error::Input(_))));
    }

    #[test]
    fn near_duplicate_bitrates_are_ill_conditioned() {
        let pts = [(1.0, 30.0), (1.0 + 1e-9, 31.0), (1.0 + 2e-9, 32.0), (1.0 + 3e-9, 33.0)];
        assert!(matches!(fit_polynomial(&pts, 3), Err(Error::Conditioning { .. })));
    }

    #[test]
    fn log_fit_recovers_model() {
        let pts: Vec<_> = default_grid().iter().map(|&r| (r, 5.0 * (2.0 * r).ln())).collect();
        let m = fit_log(&pts).unwrap();
        assert!((m.a - 5.0).abs() < 1e-8);
        assert!((m.b - 2.0).abs() < 1e-8);
    }

    #[test]
    fn log_fit_flat_data() {
        let pts: Vec<_> = default_grid().iter().map(|&r| (r, 30.0)).collect();
        let m = fit_log(&pts).unwrap();
        assert!(m.a.abs() < 1e-12);
        assert_eq!(m.b, 1.0);
        assert!(mean_squared_error(&pts, |r| m.value(r)) < 1e-20);
    }

    #[test]
    fn log_fit_domain() {
        assert!(matches!(fit_log(&[(0.0, 1.0), (1.0, 2.0)]), Err(Error::Domain(_))));
        assert!(matches!(fit_log(&[(-1.0, 1.0), (1.0, 2.0)]), Err(Error::Domain(_))));
    }

    #[test]
    fn log_worse_than_cubic_on_cubic_data() {
        let pts = sample(&C5_1080, &default_grid());
        let report = compare_fits(&pts).unwrap();
        assert!(report.logarithmic.unwrap() > report.cubic.unwrap());
        assert_eq!(report.chosen, FitFamily::Cubic);
        assert!(report.cubic.unwrap() < 1e-18);
    }

    #[test]
    fn linear_data_prefers_linear() {
        let pts: Vec<_> = default_grid().iter().map(|&r| (r, 3.0 * r + 20.0)).collect();
        assert_eq!(compare_fits(&pts).unwrap().chosen, FitFamily::Linear);
    }

    #[test]
    fn constant_data_prefers_linear() {
        let pts: Vec<_> = default_grid().iter().map(|&r| (r, 30.0)).collect();
        assert_eq!(compare_fits(&pts).unwrap().chosen, FitFamily::Linear);
    }

    #[test]
    fn compare_needs_four_distinct() {
        let pts = [(1.0, 30.0), (2.0, 31.0), (3.0, 32.0)];
        assert!(matches!(compare_fits(&pts), Err(Error::Degenerate(_))));
    }
}
