use num_complex::Complex64;
use proptest::prelude::*;

use degenspec::geometry::Geodesic;
use degenspec::kernels::{poisson, poisson_quadrature, resolvent, resolvent_quadrature, wave, ModeSet};
use degenspec::selberg::{selberg_logderiv_series, selberg_zeta_product};
use degenspec::zeta_det::{
    det_laplacian, finite_trace, hurwitz_zeta_series, hurwitz_zeta_trace, spectral_zeta_mellin, spectral_zeta_series,
    SpectralInput, StripStage,
};

fn spectrum() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.2f64..20.0, 1..6)
}

fn modes() -> impl Strategy<Value = ModeSet> {
    prop::collection::vec((0.0f64..10.0, -2.0f64..2.0), 1..6).prop_map(|p| ModeSet::from_pairs(&p).unwrap())
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mellin_matches_series(eigs in spectrum(), re in -1.5f64..3.0, im in -2.0f64..2.0) {
        let s = Complex64::new(re, im);
        let trace = finite_trace(&eigs).unwrap();
        let m = spectral_zeta_mellin(&trace, 0.0, s, None).unwrap().value;
        prop_assert!(rel(m, spectral_zeta_series(&eigs, s)) < 1e-8, "{m} vs series");
    }

    #[test]
    fn extra_subtractions_do_not_change_value(eigs in spectrum(), re in 0.3f64..2.0) {
        let s = Complex64::new(re, 0.0);
        let trace = finite_trace(&eigs).unwrap();
        let a = spectral_zeta_mellin(&trace, 0.0, s, Some(1)).unwrap().value;
        let b = spectral_zeta_mellin(&trace, 0.0, s, Some(3)).unwrap().value;
        prop_assert!(rel(a, b) < 1e-8, "{a} vs {b}");
    }

    #[test]
    fn determinant_is_product(eigs in spectrum()) {
        let want: f64 = eigs.iter().product();
        let got = det_laplacian(SpectralInput::Finite(&eigs)).unwrap().det;
        prop_assert!((got - want).abs() <= 1e-7 * want, "{got} vs {want}");
    }

    #[test]
    fn hurwitz_continuous_at_zero_shift(eigs in spectrum(), re in 0.5f64..3.0) {
        let s = Complex64::new(re, 0.0);
        let base = spectral_zeta_series(&eigs, s);
        let near = hurwitz_zeta_series(&eigs, s, Complex64::new(1e-9, 0.0)).unwrap();
        prop_assert!(rel(near, base) < 1e-7);
        let trace = finite_trace(&eigs).unwrap();
        let z = Complex64::new(0.05, 0.0);
        let t = hurwitz_zeta_trace(&trace, 0.0, s, z, &StripStage::direct(&trace), None).unwrap().value;
        prop_assert!(rel(t, hurwitz_zeta_series(&eigs, s, z).unwrap()) < 1e-8);
    }

    #[test]
    fn poisson_nonincreasing_for_positive_weights(
        pairs in prop::collection::vec((0.0f64..10.0, 0.0f64..2.0), 1..6),
        w in 0.01f64..5.0,
        dw in 0.0f64..2.0,
    ) {
        let m = ModeSet::from_pairs(&pairs).unwrap();
        prop_assert!(poisson(&m, w + dw).unwrap() <= poisson(&m, w).unwrap() + 1e-15);
    }

    #[test]
    fn poisson_routes_agree(m in modes(), w in 0.05f64..5.0) {
        let a = poisson(&m, w).unwrap();
        let b = poisson_quadrature(&m, w).unwrap();
        prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn wave_bounded_by_total_amplitude(m in modes(), w in -50.0f64..50.0) {
        let total: f64 = m.modes().iter().map(|x| x.amplitude.abs()).sum();
        prop_assert!(wave(&m, w).norm() <= total * (1.0 + 1e-14));
    }

    #[test]
    fn resolvent_routes_agree(m in modes(), re in 0.1f64..3.0, im in -3.0f64..3.0) {
        let w = Complex64::new(re, im);
        let a = resolvent(&m, w).unwrap();
        let b = resolvent_quadrature(&m, w).unwrap();
        prop_assert!(rel(a, b) < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn selberg_logderiv_is_derivative_of_log_product(
        ls in prop::collection::vec((0.5f64..4.0, 1u32..3), 1..5),
        s in 1.5f64..4.0,
    ) {
        let lengths: Vec<Geodesic> = ls.iter().map(|&(l, m)| Geodesic::new(l, m)).collect();
        let logz = |x: f64| selberg_zeta_product(&lengths, Complex64::new(x, 0.0), 1e-15).unwrap().re.ln();
        let h = 1e-4;
        let fd = (logz(s + h) - logz(s - h)) / (2.0 * h);
        let series = selberg_logderiv_series(&lengths, Complex64::new(s, 0.0)).unwrap().value.re;
        prop_assert!((fd - series).abs() < 1e-6 * (1.0 + series.abs()), "{fd} vs {series}");
    }
}
