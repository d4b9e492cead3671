//! Randomized invariants of the finite-volume engine: walls conserve mass
//! and the scheme keeps densities non-negative.

use std::sync::Arc;

use proptest::prelude::*;

use fpe_core::fpe_fd::{evolve, FdConfig, FdDomain, FpeProblemSpec, Frame, Scheme};
use fpe_core::scaling::FnCoefficients;
use fpe_core::DensityField;

fn spec(drift: f64, slope: f64, diff: f64, bumps: &[f64]) -> FpeProblemSpec {
    let n = bumps.len();
    let coeffs = FnCoefficients {
        drift: move |x: f64, t: f64| drift + slope * x * t,
        diffusion: move |x: f64, _t: f64| diff * (1.0 + 0.5 * (3.0 * x).sin()),
    };
    let mass: f64 = bumps.iter().sum::<f64>() / n as f64;
    let ws: Vec<f64> = bumps.iter().map(|b| b / mass).collect();
    let initial = DensityField::new(1.0, DensityField::cell_centres(0.0, 1.0, n), ws, 0.0, 1.0).unwrap();
    FpeProblemSpec::new(Arc::new(coeffs), FdDomain::Fixed { lo: 0.0, hi: 1.0 }, initial).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mass_is_conserved_and_values_stay_nonnegative(
        drift in -3.0..3.0f64,
        slope in -2.0..2.0f64,
        diff in 0.01..0.5f64,
        bumps in prop::collection::vec(0.0..1.0f64, 32),
        explicit in any::<bool>(),
    ) {
        prop_assume!(bumps.iter().sum::<f64>() > 1e-3);
        let s = spec(drift, slope, diff, &bumps);
        let mut cfg = FdConfig::new(32, 1.0, 1.2, Frame::PhysicalFixed).unwrap();
        if explicit {
            cfg.scheme = Scheme::ExplicitUpwind;
        }
        let sol = evolve(&s, &cfg).unwrap();
        prop_assert!(sol.max_mass_drift < 1e-12, "drift {}", sol.max_mass_drift);
        prop_assert!(sol.min_raw_value >= -1e-14, "min {}", sol.min_raw_value);
        prop_assert!((sol.field.cell_mass() - 1.0).abs() < 1e-12);
    }
}
