use gaussent::cft::fit_line;
use gaussent::{fit_log_sin, fit_size_scaling, holzhey_entropy, ConformalThresholds, Error, FitMode};
use proptest::prelude::*;

fn sigmas(count: usize) -> Vec<f64> {
    (1..=count).map(|i| i as f64 / (count + 1) as f64).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn recovers_exact_holzhey_curves(length in 1.0f64..1e4, eps in 1e-3f64..1.0, c in 0.5f64..4.0, count in 3usize..40) {
        let points: Vec<(f64, f64)> = sigmas(count)
            .into_iter()
            .map(|s| (s, holzhey_entropy(s, length, eps, c).unwrap()))
            .collect();
        let fit = fit_log_sin(&points, FitMode::Free).unwrap();
        prop_assert!((fit.slope - c / 6.0).abs() < 1e-10);
        let offset = c / 6.0 * (length / (std::f64::consts::PI * eps)).log2();
        prop_assert!((fit.offset - offset).abs() < 1e-9 * offset.abs().max(1.0));
        prop_assert!(fit.rms_residual < 1e-10 && fit.max_residual < 1e-10);
        prop_assert_eq!(fit.n_points, count);
    }

    #[test]
    fn holzhey_is_symmetric(sigma in 1e-3f64..0.999, length in 1.0f64..1e3) {
        let a = holzhey_entropy(sigma, length, 0.1, 2.0).unwrap();
        let b = holzhey_entropy(1.0 - sigma, length, 0.1, 2.0).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn fit_is_scale_equivariant(ys in prop::collection::vec(-5.0f64..5.0, 3..30), k in 0.1f64..10.0, shift in -5.0f64..5.0) {
        let pts: Vec<(f64, f64)> = ys.iter().enumerate().map(|(i, &y)| (i as f64 * 0.3, y)).collect();
        let moved: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (x, k * y + shift)).collect();
        let a = fit_line(&pts, FitMode::Free).unwrap();
        let b = fit_line(&moved, FitMode::Free).unwrap();
        prop_assert!((b.slope - k * a.slope).abs() < 1e-9 * (1.0 + a.slope.abs() * k));
        prop_assert!((b.offset - (k * a.offset + shift)).abs() < 1e-9 * (1.0 + a.offset.abs() * k + shift.abs()));
        prop_assert!((b.rms_residual - k * a.rms_residual).abs() < 1e-9 * (1.0 + k));
    }

    #[test]
    fn fixed_slope_residuals_are_exact(ys in prop::collection::vec(-5.0f64..5.0, 3..30), b in -2.0f64..2.0) {
        let pts: Vec<(f64, f64)> = ys.iter().enumerate().map(|(i, &y)| (i as f64, y)).collect();
        let fit = fit_line(&pts, FitMode::FixedSlope(b)).unwrap();
        prop_assert_eq!(fit.slope, b);
        let residuals: Vec<f64> = pts.iter().map(|&(x, y)| y - b * x - fit.offset).collect();
        // least-squares offset: residuals sum to zero
        prop_assert!(residuals.iter().sum::<f64>().abs() < 1e-9);
        let rms = (residuals.iter().map(|r| r * r).sum::<f64>() / pts.len() as f64).sqrt();
        prop_assert!((rms - fit.rms_residual).abs() < 1e-12);
        let free = fit_line(&pts, FitMode::Free).unwrap();
        prop_assert!(free.rms_residual <= fit.rms_residual + 1e-12);
    }
}

#[test]
fn symmetrised_input_gives_same_slope() {
    // an asymmetric perturbation on a symmetric σ grid
    let raw = |s: f64| holzhey_entropy(s, 100.0, 0.5, 2.0).unwrap() + 0.02 * (s - 0.3).powi(2);
    let grid = sigmas(19);
    let plain: Vec<(f64, f64)> = grid.iter().map(|&s| (s, raw(s))).collect();
    let symmetrised: Vec<(f64, f64)> = grid.iter().map(|&s| (s, 0.5 * (raw(s) + raw(1.0 - s)))).collect();
    let a = fit_log_sin(&plain, FitMode::Free).unwrap();
    let b = fit_log_sin(&symmetrised, FitMode::Free).unwrap();
    assert!((a.slope - b.slope).abs() < 1e-12, "{} vs {}", a.slope, b.slope);
    assert!((a.offset - b.offset).abs() < 1e-12);
}

#[test]
fn constant_shift_changes_only_offset() {
    let pts: Vec<(f64, f64)> = sigmas(9).into_iter().map(|s| (s, (s * 7.0).sin())).collect();
    let shifted: Vec<(f64, f64)> = pts.iter().map(|&(s, y)| (s, y + 3.25)).collect();
    let a = fit_log_sin(&pts, FitMode::Free).unwrap();
    let b = fit_log_sin(&shifted, FitMode::Free).unwrap();
    assert!((a.slope - b.slope).abs() < 1e-12);
    assert!((b.offset - a.offset - 3.25).abs() < 1e-12);
}

#[test]
fn end_anchored_matches_outermost_points() {
    let pts = vec![(0.0, 1.0), (1.0, 2.5), (2.0, 3.0), (3.0, 4.0)];
    let fit = fit_line(&pts, FitMode::EndAnchored(1.0)).unwrap();
    assert!((fit.offset - 1.0).abs() < 1e-15);
    assert!((fit.max_residual - 0.5).abs() < 1e-15);
}

#[test]
fn size_scaling_recovers_slope() {
    let pts: Vec<(usize, f64)> = [8, 16, 32, 64, 128]
        .iter()
        .map(|&n| (n, (n as f64).log2() / 3.0 + 0.2))
        .collect();
    let fit = fit_size_scaling(&pts).unwrap();
    assert!((fit.slope - 1.0 / 3.0).abs() < 1e-12);
    assert!(ConformalThresholds::default().is_conformal(&fit));
    let steep: Vec<(usize, f64)> = pts.iter().map(|&(n, s)| (n, 2.0 * s)).collect();
    assert!(!ConformalThresholds::default().is_conformal(&fit_size_scaling(&steep).unwrap()));
}

#[test]
fn degenerate_inputs() {
    assert!(matches!(
        fit_line(&[(0.0, 1.0), (1.0, 2.0)], FitMode::Free),
        Err(Error::DegenerateFit(_))
    ));
    assert!(matches!(
        fit_line(&[(1.0, 1.0); 5], FitMode::Free),
        Err(Error::DegenerateFit(_))
    ));
    assert!(fit_log_sin(&[(0.0, 1.0), (0.3, 1.0), (0.5, 1.0)], FitMode::Free).is_err());
    assert!(fit_size_scaling(&[(0, 1.0), (2, 1.0), (4, 1.0)]).is_err());
}
