//! Real roots of polynomials of degree ≤ 3.
//!
//! Closed-form solutions (trigonometric for three real roots, Cardano
//! otherwise) followed by Newton polishing on the original coefficients.
//! Double roots are easy to lose to rounding in the closed form, so critical
//! points where the polynomial is zero to within its evaluation error are
//! added as roots as well.

use crate::poly;

/// A real root and whether the polynomial changes sign across it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    /// Even multiplicity: the polynomial touches zero without crossing.
    pub touching: bool,
}

/// Roots closer than this (relative to max(1, |x|)) are merged.
const MERGE_TOL: f64 = 1e-9;

/// All real roots of `coeffs` (lowest order first, length ≤ 4), ascending and
/// deduplicated. A polynomial that is identically zero yields no roots; the
/// caller has to detect that case itself.
pub fn real_roots(coeffs: &[f64]) -> Vec<Root> {
    assert!(coeffs.len() <= 4, "only polynomials up to degree 3 are supported");
    let trimmed = trim(coeffs);
    let mut xs = match trimmed.len() {
        0 | 1 => Vec::new(),
        2 => vec![-trimmed[0] / trimmed[1]],
        3 => quadratic(trimmed[2], trimmed[1], trimmed[0]),
        _ => cubic(trimmed[3], trimmed[2], trimmed[1], trimmed[0]),
    };

    for x in xs.iter_mut() {
        *x = polish(trimmed, *x);
    }

    if trimmed.len() >= 3 {
        let deriv = poly::derivative(trimmed);
        for root in real_roots(&deriv) {
            let x = root.x;
            let tol = 64.0 * f64::EPSILON * poly::magnitude(trimmed, x);
            if poly::eval(trimmed, x).abs() <= tol {
                // The closed form only resolves a double root to about
                // sqrt(eps); the critical point is the better estimate.
                xs.retain(|y| (y - x).abs() > 1e-6 * x.abs().max(1.0));
                xs.push(x);
            }
        }
    }
    xs.retain(|x| x.is_finite());
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|b, a| (*b - *a).abs() <= MERGE_TOL * a.abs().max(1.0));

    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let gap_left = if i > 0 { x - xs[i - 1] } else { f64::INFINITY };
            let gap_right = xs.get(i + 1).map_or(f64::INFINITY, |&n| n - x);
            let h = (1e-6 * x.abs().max(1.0)).min(gap_left / 2.0).min(gap_right / 2.0);
            let left = poly::eval(trimmed, x - h);
            let right = poly::eval(trimmed, x + h);
            Root { x, touching: left.signum() == right.signum() && left != 0.0 }
        })
        .collect()
}

/// Real roots lying in `[lo, hi]`.
pub fn real_roots_in(coeffs: &[f64], lo: f64, hi: f64) -> Vec<Root> {
    real_roots(coeffs)
        .into_iter()
        .filter(|r| r.x >= lo && r.x <= hi)
        .collect()
}

/// Drops leading coefficients that are negligible against the rest.
fn trim(coeffs: &[f64]) -> &[f64] {
    let scale = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let mut n = coeffs.len();
    while n > 0 && coeffs[n - 1].abs() <= 1e-14 * scale {
        n -= 1;
    }
    &coeffs[..n]
}

fn quadratic(a: f64, b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    // Avoid cancellation between -b and sqrt(disc).
    let q = -0.5 * (b + disc.sqrt().copysign(b));
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

fn cubic(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    let (p2, p1, p0) = (b / a, c / a, d / a);
    let q = (p2 * p2 - 3.0 * p1) / 9.0;
    let r = (2.0 * p2 * p2 * p2 - 9.0 * p2 * p1 + 27.0 * p0) / 54.0;
    let shift = p2 / 3.0;
    let q3 = q * q * q;

    if r * r < q3 {
        let theta = (r / q3.sqrt()).clamp(-1.0, 1.0).acos();
        let m = -2.0 * q.sqrt();
        let tau = std::f64::consts::TAU;
        vec![
            m * (theta / 3.0).cos() - shift,
            m * ((theta + tau) / 3.0).cos() - shift,
            m * ((theta - tau) / 3.0).cos() - shift,
        ]
    } else {
        let big_a = -r.signum() * (r.abs() + (r * r - q3).sqrt()).cbrt();
        let big_b = if big_a != 0.0 { q / big_a } else { 0.0 };
        vec![big_a + big_b - shift]
    }
}

fn polish(coeffs: &[f64], mut x: f64) -> f64 {
    for _ in 0..8 {
        let f = poly::eval(coeffs, x);
        let df = poly::eval_derivative(coeffs, x);
        if f == 0.0 || df == 0.0 {
            break;
        }
        let next = x - f / df;
        if !next.is_finite() || poly::eval(coeffs, next).abs() >= f.abs() {
            break;
        }
        x = next;
    }
    x
}
