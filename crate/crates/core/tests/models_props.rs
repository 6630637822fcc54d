use crg_core::models::{count_zeros_argument_principle, ModelError};
use crg_core::{CanonicalProduct, Complex, EntireFunction, ExpTerm, ExponentialSum, Window, ZeroRule};
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// `log|sin(π√z)/(π√z)|` from complex `sqrt` and `sin`.
fn sine_identity_log(z: Complex) -> f64 {
    let w = z.sqrt() * PI;
    (w.sin() / w).norm().ln()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exp_log_modulus_is_real_part(x in -1e5f64..600.0, y in -1e3f64..1e3) {
        let e = ExponentialSum::exp().eval_log(c(x, y)).unwrap();
        prop_assert!((e.log_abs - x).abs() <= 1e-12 * x.abs().max(1.0));
    }

    #[test]
    fn sine_matches_closed_form(x in -30.0f64..30.0, y in -30.0f64..30.0) {
        let z = c(x, y);
        prop_assume!((z - c((x / PI).round() * PI, 0.0)).norm() > 1e-3);
        let sin = ExponentialSum::sin();
        let e = sin.eval_log(z).unwrap();
        prop_assert!((e.log_abs - z.sin().norm().ln()).abs() < 1e-9);
        let l = sin.log_derivative(z).unwrap();
        let oracle = z.cos() / z.sin();
        prop_assert!((l - oracle).norm() <= 1e-9 * oracle.norm().max(1.0));
    }

    #[test]
    fn log_derivative_matches_finite_differences(
        a in -3.0f64..3.0, b in -3.0f64..3.0, x in -4.0f64..4.0, y in -4.0f64..4.0,
    ) {
        let f = ExponentialSum::new(vec![
            ExpTerm::new(vec![c(1.0, 0.0), c(a, 0.5)], c(1.0, 0.3)),
            ExpTerm::new(vec![c(b, -1.0)], c(-0.7, 1.1)),
        ]).unwrap();
        let z = c(x, y);
        let v = f.value(z).unwrap();
        prop_assume!(v.norm() > 1e-3);
        let h = 1e-6;
        let d = (f.value(z + h).unwrap() - f.value(z - h).unwrap()) / (2.0 * h);
        let l = f.log_derivative(z).unwrap();
        prop_assert!((l - d / v).norm() <= 1e-5 * (d / v).norm().max(1.0));
    }

    #[test]
    fn square_product_matches_sine_identity(r in 2.0f64..5e3, theta in 0.05f64..6.2) {
        let f = CanonicalProduct::new(ZeroRule::power_law(2.0).unwrap(), 0, 1e-9, 5e3).unwrap();
        let z = Complex::from_polar(r, theta);
        let got = f.eval_log(z).unwrap().log_abs;
        let oracle = sine_identity_log(z);
        prop_assert!((got - oracle).abs() < 1e-6, "{} vs {}", got, oracle);
    }

    #[test]
    fn counting_function_of_squares(r in 0.0f64..1e8) {
        let f = CanonicalProduct::with_cutoff(ZeroRule::power_law(2.0).unwrap(), 0, 10, 1.0).unwrap();
        prop_assert_eq!(f.counting_function(r), r.sqrt().floor() as u64);
    }
}

#[test]
fn sine_zero_counts_over_growing_rectangles() {
    let sin = ExponentialSum::sin();
    for k in 1..6 {
        let half = k as f64 * PI + 0.5;
        let rect = Window::new(-half, half, -1.0, 1.0).unwrap();
        let n = count_zeros_argument_principle(&sin, &rect, 256).unwrap();
        assert_eq!(n, 2 * k as u64 + 1);
    }
}

#[test]
fn product_errors_are_typed() {
    let f = CanonicalProduct::new(ZeroRule::power_law(2.0).unwrap(), 0, 1e-6, 100.0).unwrap();
    assert!(matches!(f.eval_log(c(9.0, 0.0)), Err(ModelError::ZeroHit { .. })));
    assert!(ZeroRule::power_law(0.0).is_err());
}
