use crg_core::criteria::{annulus_density, membership_b};
use crg_core::{AnnulusSpec, Complex, ExponentialSum, GrowthMinorant, Region, SamplePlan, Thresholds};
use proptest::prelude::*;
use std::f64::consts::PI;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn b_implies_a(r in 60.0f64..400.0, theta in 0.0f64..(2.0 * PI), sine in any::<bool>()) {
        let f = if sine { ExponentialSum::sin() } else { ExponentialSum::exp() };
        let beta = GrowthMinorant::exp_power(0.5, 1.0).unwrap();
        let z = Complex::from_polar(r, theta);
        if let Ok(v) = membership_b(&f, &beta, z, 16, &Thresholds::default()) {
            prop_assert!(!v.in_b || v.in_a);
        }
    }

    #[test]
    fn density_is_monotone_under_implication(cut in -1.0f64..1.0, seed in 0u64..1000) {
        let region = Region::Annulus(AnnulusSpec::new(5.0));
        let plan = SamplePlan::MonteCarlo { samples: 2000, seed };
        let narrow = annulus_density(|z| z.re > cut * 5.0 && z.im > 0.0, &region, &plan);
        let wide = annulus_density(|z| z.re > cut * 5.0, &region, &plan);
        prop_assert!(narrow.hits <= wide.hits);
    }
}

#[test]
fn monte_carlo_agrees_with_grid_for_sectors() {
    let region = Region::Annulus(AnnulusSpec::new(3.0));
    let sector = |z: Complex| z.arg().abs() < PI / 3.0;
    let grid = annulus_density(sector, &region, &SamplePlan::Grid { n_a: 600, n_b: 30 });
    for seed in [1, 2, 3] {
        let mc = annulus_density(sector, &region, &SamplePlan::MonteCarlo { samples: 50_000, seed });
        assert!((mc.density - grid.density).abs() <= 3.0 * mc.confidence_halfwidth);
    }
}

#[test]
fn doubling_disk_samples_keeps_verdicts() {
    let beta = GrowthMinorant::exp_power(0.5, 1.0).unwrap();
    let t = Thresholds::default();
    let sin = ExponentialSum::sin();
    for i in 0..200 {
        let z = Complex::from_polar(80.0 + i as f64, 2.0 * PI * i as f64 / 200.0 + 0.01);
        let a = membership_b(&sin, &beta, z, 16, &t).map(|v| v.in_b);
        let b = membership_b(&sin, &beta, z, 32, &t).map(|v| v.in_b);
        assert_eq!(a, b, "{z}");
    }
}
