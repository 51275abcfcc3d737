// reference digits are quoted as printed by mpmath
#![allow(clippy::excessive_precision, clippy::needless_range_loop)]

//! The double-double chain pipeline against 60-digit reference values.

use gaussent::{region_spectrum, region_spectrum_extended, Boundary, ChainConfig, Region};

/// Distinct mode ratios (each appears twice) of the antiperiodic chain with
/// N = 100, Λ = 1, κ = 1e-3 reduced to 50 sites, from an independent
/// 60-digit evaluation of the same Toeplitz sums and `4QP` eigenvalues.
const REFERENCE_PAIRS: [f64; 12] = [
    0.196_820_925_991_652_89,
    5.918_279_619_320_983_5e-3,
    1.037_801_616_217_296_2e-4,
    1.073_557_225_273_799_4e-6,
    7.057_823_798_990_844_3e-9,
    3.085_963_704_057_100_1e-11,
    9.178_648_357_527_725_9e-14,
    1.876_818_935_125_484_7e-16,
    2.647_389_271_050_025_1e-19,
    2.571_878_102_181_845_5e-22,
    1.710_715_686_916_837_1e-25,
    7.715_577_768_597_164_3e-29,
];

fn pairing_config() -> ChainConfig {
    ChainConfig::fixed_length(100, 1.0, 1e-3, Boundary::Antiperiodic).unwrap()
}

#[test]
fn resolves_deep_spectrum() {
    let spec = region_spectrum_extended(&pairing_config(), Region::new(0, 50)).unwrap();
    for (i, &reference) in REFERENCE_PAIRS.iter().enumerate() {
        // the last two pairs sit within ~1e3 ulp of the double-double floor
        let tol = if i < 10 { 1e-6 } else { 1e-3 };
        for xi in [spec.xi[2 * i], spec.xi[2 * i + 1]] {
            let rel = (xi - reference).abs() / reference;
            assert!(rel < tol, "pair {i}: {xi:e} vs {reference:e} (rel {rel:e})");
        }
    }
}

#[test]
fn double_precision_loses_the_tail() {
    // documents why the extended path exists: f64 resolves only ~1e-16
    let spec = region_spectrum(&pairing_config(), Region::new(0, 50)).unwrap();
    for i in 0..4 {
        let rel = (spec.xi[2 * i] - REFERENCE_PAIRS[i]).abs() / REFERENCE_PAIRS[i];
        assert!(rel < 1e-6);
    }
    let deep = spec.xi[18];
    assert!((deep - REFERENCE_PAIRS[9]).abs() / REFERENCE_PAIRS[9] > 0.05);
}

#[test]
fn matches_double_path_on_shallow_spectrum() {
    for alpha in [0, 1] {
        let config = ChainConfig::new(40, 0.5, Boundary::from_alpha(alpha).unwrap()).unwrap();
        let a = region_spectrum(&config, Region::new(5, 13)).unwrap();
        let b = region_spectrum_extended(&config, Region::new(5, 13)).unwrap();
        for (x, y) in a.xi.iter().zip(&b.xi) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn extended_rejects_zero_mode() {
    let config = ChainConfig::new(10, 0.0, Boundary::Periodic).unwrap();
    assert!(region_spectrum_extended(&config, Region::new(0, 5)).is_err());
}
