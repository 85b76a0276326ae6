use proptest::prelude::*;
use rdladder::rd_model::{compare_fits, fit_log, fit_polynomial, FitFamily};
use rdladder::roots::{real_roots, real_roots_in};
use rdladder::{BitrateGrid, CubicRD};

fn grid() -> Vec<f64> {
    BitrateGrid::linspace(0.2, 6.0, 10).unwrap().points().to_vec()
}

fn sample(coeffs: [f64; 4], xs: &[f64]) -> Vec<(f64, f64)> {
    xs.iter().map(|&r| (r, coeffs[0] + r * (coeffs[1] + r * (coeffs[2] + r * coeffs[3])))).collect()
}

fn mse(c: &CubicRD, pts: &[(f64, f64)]) -> f64 {
    pts.iter().map(|&(r, q)| (c.value(r) - q).powi(2)).sum::<f64>() / pts.len() as f64
}

/// Concave, increasing on the operating range, in the span of real R-D fits.
fn rd_coeffs() -> impl Strategy<Value = [f64; 4]> {
    (15.0..35.0f64, 3.0..10.0f64, -2.0..-0.5f64, 0.05..0.15f64).prop_map(|(a, b, c, d)| [a, b, c, d])
}

/// Sign-change scan with bisection refinement; slow but independent.
fn bisection_roots(coeffs: [f64; 4], lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let p = |x: f64| coeffs[0] + x * (coeffs[1] + x * (coeffs[2] + x * coeffs[3]));
    let mut out = Vec::new();
    let mut a = lo;
    while a < hi {
        let b = (a + step).min(hi);
        let (fa, fb) = (p(a), p(b));
        if fa == 0.0 {
            out.push(a);
        } else if fa * fb < 0.0 {
            let (mut l, mut r) = (a, b);
            for _ in 0..80 {
                let m = 0.5 * (l + r);
                if p(l) * p(m) <= 0.0 {
                    r = m;
                } else {
                    l = m;
                }
            }
            out.push(0.5 * (l + r));
        }
        a = b;
    }
    out
}

#[test]
fn noiseless_cubic_coefficients_are_recovered() {
    let truth = [33.335, 2.581, -0.508, 0.039];
    let fit = fit_polynomial(&sample(truth, &grid()), 3).unwrap();
    for (a, b) in fit.coeffs().iter().zip(truth) {
        assert!((a - b).abs() < 1e-8, "{:?}", fit.coeffs());
    }
    assert_eq!(fit.valid_range(), (0.2, 6.0));
}

#[test]
fn family_comparison_prefers_fewer_parameters_on_ties() {
    let cubic = compare_fits(&sample([20.0, 8.0, -1.2, 0.08], &grid())).unwrap();
    assert_eq!(cubic.chosen, FitFamily::Cubic);
    assert!(cubic.cubic.unwrap() < 1e-18);

    let linear = compare_fits(&sample([30.0, 2.0, 0.0, 0.0], &grid())).unwrap();
    assert_eq!(linear.chosen, FitFamily::Linear);

    let pts: Vec<(f64, f64)> = grid().iter().map(|&r| (r, 40.0 + 3.0 * r.ln())).collect();
    let log = compare_fits(&pts).unwrap();
    assert_eq!(log.chosen, FitFamily::Logarithmic);
    let lf = fit_log(&pts).unwrap();
    assert!((lf.value(2.5) - (40.0 + 3.0 * 2.5f64.ln())).abs() < 1e-9);
}

#[test]
fn too_few_distinct_bitrates_is_degenerate() {
    let pts = [(1.0, 30.0), (1.0, 31.0), (2.0, 33.0), (3.0, 34.0)];
    assert!(fit_polynomial(&pts, 3).is_err());
    assert!(fit_polynomial(&pts, 2).is_ok());
}

#[test]
fn roots_match_bisection_on_known_factors() {
    // (x - 0.5)(x - 1.5)(x - 4) and a double root at 2.
    let c = [-3.0, 8.75, -6.0, 1.0];
    let xs: Vec<f64> = real_roots(&c).iter().map(|r| r.x).collect();
    assert_eq!(xs.len(), 3);
    for (x, want) in xs.iter().zip([0.5, 1.5, 4.0]) {
        assert!((x - want).abs() < 1e-12);
    }
    let double = real_roots(&[4.0, -4.0, 1.0]);
    assert_eq!(double.len(), 1);
    assert!(double[0].touching && (double[0].x - 2.0).abs() < 1e-7);
    let inside = real_roots_in(&c, 1.0, 3.0);
    assert_eq!(inside.len(), 1);
    assert!((inside[0].x - 1.5).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn slope_matches_central_difference(c in rd_coeffs(), r in 0.3..5.9f64) {
        let cubic = CubicRD::new(c, (0.2, 6.0)).unwrap();
        let h = 1e-5;
        let fd = (cubic.value(r + h) - cubic.value(r - h)) / (2.0 * h);
        prop_assert!((cubic.slope(r) - fd).abs() <= 1e-6 * fd.abs().max(1.0));
    }

    #[test]
    fn fit_is_equivariant_under_affine_psnr_maps(c in rd_coeffs(), scale in 0.5..2.0f64, shift in -5.0..5.0f64) {
        let xs = grid();
        let base = fit_polynomial(&sample(c, &xs), 3).unwrap().coeffs();
        let mapped: Vec<(f64, f64)> = sample(c, &xs).into_iter().map(|(r, q)| (r, scale * q + shift)).collect();
        let fit = fit_polynomial(&mapped, 3).unwrap().coeffs();
        let want = [scale * base[0] + shift, scale * base[1], scale * base[2], scale * base[3]];
        for (a, b) in fit.iter().zip(want) {
            prop_assert!((a - b).abs() < 1e-7 * b.abs().max(1.0), "{:?} vs {:?}", fit, want);
        }
    }

    #[test]
    fn residual_never_grows_with_degree(c in rd_coeffs(), noise in prop::collection::vec(-0.3..0.3f64, 10)) {
        let pts: Vec<(f64, f64)> = sample(c, &grid()).into_iter().zip(noise).map(|((r, q), n)| (r, q + n)).collect();
        let m: Vec<f64> = (1..=3).map(|d| mse(&fit_polynomial(&pts, d).unwrap(), &pts)).collect();
        prop_assert!(m[1] <= m[0] * (1.0 + 1e-9) + 1e-15);
        prop_assert!(m[2] <= m[1] * (1.0 + 1e-9) + 1e-15);
        let report = compare_fits(&pts).unwrap();
        let chosen = report.mse(report.chosen).unwrap();
        for f in FitFamily::PREFERENCE {
            if let Some(v) = report.mse(f) {
                prop_assert!(chosen <= v * (1.0 + 1e-9) + 1e-15);
            }
        }
    }

    #[test]
    fn refitting_a_fitted_curve_changes_nothing(c in rd_coeffs(), noise in prop::collection::vec(-0.3..0.3f64, 10)) {
        let xs = grid();
        let pts: Vec<(f64, f64)> = sample(c, &xs).into_iter().zip(noise).map(|((r, q), n)| (r, q + n)).collect();
        let first = fit_polynomial(&pts, 3).unwrap();
        let again = fit_polynomial(&sample(first.coeffs(), &xs), 3).unwrap();
        for (a, b) in again.coeffs().iter().zip(first.coeffs()) {
            prop_assert!((a - b).abs() < 1e-8 * b.abs().max(1.0));
        }
    }

    #[test]
    fn roots_agree_with_bisection(
        r1 in -4.5..4.5f64, r2 in -4.5..4.5f64, r3 in -4.5..4.5f64, lead in prop_oneof![-3.0..-0.2f64, 0.2..3.0f64],
    ) {
        prop_assume!((r1 - r2).abs() > 1e-2 && (r2 - r3).abs() > 1e-2 && (r1 - r3).abs() > 1e-2);
        let c = [
            -lead * r1 * r2 * r3,
            lead * (r1 * r2 + r1 * r3 + r2 * r3),
            -lead * (r1 + r2 + r3),
            lead,
        ];
        let got: Vec<f64> = real_roots_in(&c, -5.0, 5.0).iter().map(|r| r.x).collect();
        let want = bisection_roots(c, -5.0, 5.0, 1e-3);
        prop_assert_eq!(got.len(), want.len(), "{:?} vs {:?}", got, want);
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).abs() < 1e-8, "{:?} vs {:?}", got, want);
        }
    }

    #[test]
    fn every_reported_root_is_a_zero(c in prop::array::uniform4(-10.0..10.0f64)) {
        for root in real_roots(&c) {
            let x = root.x;
            let scale = c.iter().enumerate().map(|(i, a)| (a * x.powi(i as i32)).abs()).sum::<f64>().max(1.0);
            let p = c[0] + x * (c[1] + x * (c[2] + x * c[3]));
            prop_assert!(p.abs() <= 1e-9 * scale, "p({x}) = {p} for {:?}", c);
        }
    }
}
