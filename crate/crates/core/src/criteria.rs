//! Membership in the escape-criteria sets `A(f, β)` and `B(f, β)`, and
//! sampled densities over annuli and windows.

use crate::covering::DiskSet;
use crate::growth::{DensityBudget, GrowthMinorant};
use crate::models::{EntireFunction, ModelError};
use crate::sampling::{binomial_halfwidth, sample_point, Region, SamplePlan};
use num_complex::Complex64 as Complex;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

pub use crate::sampling::AnnulusSpec;

/// The constants in the definitions of `A` and `B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    /// `A` needs `Re(zL(z))` above this.
    pub re_zl_min: f64,
    /// `B` protects the disk of radius `disk_factor · |f/f'|`.
    pub disk_factor: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            re_zl_min: 64.0,
            disk_factor: 32.0,
        }
    }
}

/// Witnesses for `A` and, when evaluated, `B`.
///
/// `B` is a sampling certificate: the disk condition is checked at the center
/// and on eight concentric circles, not proved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MembershipVerdict {
    pub in_a: bool,
    pub in_b: bool,
    pub re_zl: f64,
    /// `log|f(z)| - log β(|z|)`.
    pub log_margin: f64,
    /// Smallest `Re(ζL(ζ))` over the disk samples.
    pub min_disk_re_zl: Option<f64>,
    /// `disk_factor · |f(z)/f'(z)|`.
    pub disk_radius: Option<f64>,
}

fn near_zero(e: ModelError, z: Complex) -> ModelError {
    match e {
        ModelError::ZeroHit { .. } => ModelError::NearZero { z },
        other => other,
    }
}

/// Whether `Re(zf'(z)/f(z)) > re_zl_min` and `log|f(z)| > log β(|z|)`.
pub fn membership_a<F: EntireFunction + ?Sized>(
    f: &F,
    beta: &GrowthMinorant,
    z: Complex,
    thresholds: &Thresholds,
) -> Result<MembershipVerdict, ModelError> {
    let log_abs = f.eval_log(z).map_err(|e| near_zero(e, z))?.log_abs;
    let re_zl = (z * f.log_derivative(z).map_err(|e| near_zero(e, z))?).re;
    let log_margin = log_abs - beta.log_beta(z.norm());
    Ok(MembershipVerdict {
        in_a: re_zl > thresholds.re_zl_min && log_margin > 0.0,
        in_b: false,
        re_zl,
        log_margin,
        min_disk_re_zl: None,
        disk_radius: None,
    })
}

/// `A` plus positivity of `Re(ζL(ζ))` on `|ζ - z| < disk_factor·|f/f'|`,
/// sampled at the center and `disk_samples` points on each circle of radius
/// `j/8` of the full radius, `j = 1..8`.
///
/// A zero hit at any sample counts against `B`.
pub fn membership_b<F: EntireFunction + ?Sized>(
    f: &F,
    beta: &GrowthMinorant,
    z: Complex,
    disk_samples: usize,
    thresholds: &Thresholds,
) -> Result<MembershipVerdict, ModelError> {
    let mut v = membership_a(f, beta, z, thresholds)?;
    if !v.in_a {
        return Ok(v);
    }
    let radius = thresholds.disk_factor / f.log_derivative(z)?.norm();
    let mut min = v.re_zl;
    let mut positive = v.re_zl > 0.0;
    'rings: for j in 1..=8 {
        let rj = radius * j as f64 / 8.0;
        for k in 0..disk_samples {
            let zeta = z + Complex::from_polar(rj, 2.0 * PI * k as f64 / disk_samples as f64);
            match f.log_derivative(zeta) {
                Ok(l) => {
                    let re = (zeta * l).re;
                    min = min.min(re);
                    positive &= re > 0.0;
                }
                Err(ModelError::NearZero { .. } | ModelError::ZeroHit { .. }) => {
                    positive = false;
                    min = f64::NEG_INFINITY;
                    break 'rings;
                }
                Err(e) => return Err(e),
            }
        }
    }
    v.in_b = positive;
    v.min_disk_re_zl = Some(min);
    v.disk_radius = Some(radius);
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityReport {
    pub region: Region,
    pub plan: SamplePlan,
    pub hits: usize,
    pub total: usize,
    pub density: f64,
    /// 95% normal-approximation halfwidth; zero for grids.
    pub confidence_halfwidth: f64,
    /// Fraction of samples that fell inside an excluded disk.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub excluded_fraction: Option<f64>,
}

impl DensityReport {
    pub fn from_counts(region: Region, plan: SamplePlan, hits: usize, total: usize) -> Self {
        let halfwidth = if plan.is_monte_carlo() {
            binomial_halfwidth(hits, total)
        } else {
            0.0
        };
        Self {
            region,
            plan,
            hits,
            total,
            density: if total == 0 { 0.0 } else { hits as f64 / total as f64 },
            confidence_halfwidth: halfwidth,
            excluded_fraction: None,
        }
    }
}

/// Density of `predicate` over `region` under `plan`.
pub fn annulus_density(
    predicate: impl Fn(Complex) -> bool + Sync,
    region: &Region,
    plan: &SamplePlan,
) -> DensityReport {
    let total = plan.total();
    let hits = (0..total)
        .into_par_iter()
        .filter(|&i| predicate(sample_point(region, plan, i)))
        .count();
    DensityReport::from_counts(*region, *plan, hits, total)
}

/// Density of `predicate ∧ outside every disk`, with the excluded fraction.
pub fn density_with_exclusions(
    predicate: impl Fn(Complex) -> bool + Sync,
    region: &Region,
    disks: &DiskSet,
    plan: &SamplePlan,
) -> DensityReport {
    let total = plan.total();
    let (hits, excluded) = (0..total)
        .into_par_iter()
        .map(|i| {
            let z = sample_point(region, plan, i);
            if disks.contains(z) {
                (0usize, 1usize)
            } else {
                (predicate(z) as usize, 0)
            }
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let mut report = DensityReport::from_counts(*region, *plan, hits, total);
    report.excluded_fraction = Some(if total == 0 {
        0.0
    } else {
        excluded as f64 / total as f64
    });
    report
}

/// One row of the density-hypothesis check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginRow {
    pub r: f64,
    pub density: f64,
    pub alpha: f64,
    /// `density - (1 - α(r))`.
    pub margin: f64,
    pub confidence_halfwidth: f64,
    pub negative: bool,
}

/// `density(r) - (1 - α(r))` for each radius, with the density supplied by
/// `density_at`.
pub fn density_margins(
    alpha: &DensityBudget,
    r_list: &[f64],
    mut density_at: impl FnMut(f64) -> DensityReport,
) -> Vec<MarginRow> {
    r_list
        .iter()
        .map(|&r| {
            let rep = density_at(r);
            let a = alpha.value(r);
            let margin = rep.density - (1.0 - a);
            MarginRow {
                r,
                density: rep.density,
                alpha: a,
                margin,
                confidence_halfwidth: rep.confidence_halfwidth,
                negative: margin < 0.0,
            }
        })
        .collect()
}

/// Margins of `dens(B(f, β), ann(r)) ≥ 1 - α(r)` along `r_list`.
///
/// Samples where `f` or `f'/f` cannot be evaluated count as outside `B`.
pub fn hypothesis_check_14b<F: EntireFunction + ?Sized>(
    f: &F,
    beta: &GrowthMinorant,
    alpha: &DensityBudget,
    r_list: &[f64],
    plan: &SamplePlan,
    disk_samples: usize,
    thresholds: &Thresholds,
) -> Vec<MarginRow> {
    density_margins(alpha, r_list, |r| {
        let region = Region::Annulus(AnnulusSpec::new(r));
        annulus_density(
            |z| membership_b(f, beta, z, disk_samples, thresholds).is_ok_and(|v| v.in_b),
            &region,
            plan,
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::Disk;
    use crate::models::ExponentialSum;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn half() -> GrowthMinorant {
        GrowthMinorant::exp_power(0.5, 1.0).unwrap()
    }

    #[test]
    fn membership_a_examples() {
        let t = Thresholds::default();
        let exp = ExponentialSum::exp();
        let v = membership_a(&exp, &half(), c(100.0, 0.0), &t).unwrap();
        assert!(v.in_a && v.re_zl == 100.0 && (v.log_margin - 50.0).abs() < 1e-12);
        assert!(!membership_a(&exp, &half(), c(0.0, 100.0), &t).unwrap().in_a);
        let v = membership_a(&ExponentialSum::sin(), &half(), c(0.0, 100.0), &t).unwrap();
        assert!(v.in_a);
        assert!((v.re_zl - 100.0 / 100f64.tanh()).abs() < 1e-10);
        assert!((v.log_margin - (50.0 - 2f64.ln())).abs() < 1e-10);
    }

    #[test]
    fn membership_a_reports_zeros() {
        let err = membership_a(&ExponentialSum::sin(), &half(), c(0.0, 0.0), &Thresholds::default());
        assert!(matches!(err, Err(ModelError::NearZero { .. })));
    }

    #[test]
    fn membership_b_examples() {
        let t = Thresholds::default();
        let exp = ExponentialSum::exp();
        let v = membership_b(&exp, &half(), c(100.0, 0.0), 64, &t).unwrap();
        assert!(v.in_b && v.disk_radius == Some(32.0));
        assert!((v.min_disk_re_zl.unwrap() - 68.0).abs() < 1e-12);
        let quarter = GrowthMinorant::exp_power(0.25, 1.0).unwrap();
        let v = membership_b(&exp, &quarter, c(65.0, 70.0), 64, &t).unwrap();
        assert!(v.in_a && v.in_b);
        assert!((v.min_disk_re_zl.unwrap() - 33.0).abs() < 1e-12);
        let v = membership_b(&exp, &quarter, c(20.0, 0.0), 64, &t).unwrap();
        assert!(!v.in_a && !v.in_b);
    }

    #[test]
    fn density_examples() {
        let region = Region::Annulus(AnnulusSpec::new(10.0));
        let mc = SamplePlan::MonteCarlo {
            samples: 100_000,
            seed: 1,
        };
        assert_eq!(annulus_density(|_| true, &region, &mc).density, 1.0);
        let sector = annulus_density(|z| z.arg().abs() < PI / 3.0, &region, &mc);
        assert!((sector.density - 1.0 / 3.0).abs() < 0.01);
        let grid = annulus_density(
            |z| z.arg().abs() < PI / 3.0,
            &region,
            &SamplePlan::Grid { n_a: 300, n_b: 20 },
        );
        assert!((grid.density - 1.0 / 3.0).abs() < 1e-9);
        assert_eq!(grid.confidence_halfwidth, 0.0);
        assert!((sector.density - grid.density).abs() <= 3.0 * sector.confidence_halfwidth);
    }

    #[test]
    fn exclusion_examples() {
        let r = 8.0;
        let region = Region::Annulus(AnnulusSpec::new(r));
        let grid = SamplePlan::Grid { n_a: 2000, n_b: 400 };
        let plain = annulus_density(|z| z.re > 0.0, &region, &grid);
        let none = density_with_exclusions(|z| z.re > 0.0, &region, &DiskSet::empty(), &grid);
        assert_eq!(plain.hits, none.hits);
        assert_eq!(none.excluded_fraction, Some(0.0));

        let all = DiskSet::new(vec![Disk::new(c(0.0, 0.0), 3.0 * r)]).unwrap();
        assert_eq!(density_with_exclusions(|_| true, &region, &all, &grid).density, 0.0);

        let one = DiskSet::new(vec![Disk::new(c(1.25 * r, 0.0), 0.25 * r)]).unwrap();
        let rep = density_with_exclusions(|_| true, &region, &one, &grid);
        assert!((rep.density - (1.0 - 1.0 / 60.0)).abs() < 2e-4, "{}", rep.density);
    }

    #[test]
    fn margins_examples() {
        let stub = density_margins(&DensityBudget::constant(0.25), &[10.0, 20.0], |r| {
            annulus_density(
                |_| true,
                &Region::Annulus(AnnulusSpec::new(r)),
                &SamplePlan::Grid { n_a: 4, n_b: 4 },
            )
        });
        assert!(stub.iter().all(|m| m.margin == 0.25 && !m.negative));

        let exp = ExponentialSum::exp();
        let rows = hypothesis_check_14b(
            &exp,
            &half(),
            &DensityBudget::constant(0.5),
            &[200.0],
            &SamplePlan::MonteCarlo { samples: 4000, seed: 2 },
            16,
            &Thresholds::default(),
        );
        assert!(rows[0].negative);
        assert!((rows[0].margin + 1.0 / 6.0).abs() < 0.05, "{}", rows[0].margin);
    }
}
