//! Orbit classification against a growth track, escape-time rasters and
//! escaping-set density estimates.
//!
//! An orbit is declared escaped only when it passes the bailout while every
//! observed iterate stayed above the track `β^k(r₀)`. Iterates past the last
//! representable one are tracked through `log|f(z)|` alone. An iterate on a
//! zero of `f` sends the orbit to 0, whose log-modulus `-∞` fails the track.

use crate::criteria::DensityReport;
use crate::growth::{beta_track, GrowthMinorant};
use crate::models::{EntireFunction, ModelError, MAX_FINITE_LOG};
use crate::sampling::{sample_point, Region, SamplePlan, Window};
use num_complex::Complex64 as Complex;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("{0}")]
    Invalid(String),
}

pub const DEFAULT_BAILOUT_LOG: f64 = 500.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "step", rename_all = "snake_case")]
pub enum Verdict {
    Escaped(usize),
    /// Stopped at this step, either at `max_iter` or where the track failed.
    Survived(usize),
    /// The model could not evaluate the iterate at this step.
    Indeterminate(usize),
}

impl Verdict {
    /// Raster code: 0 survived, 1..=254 escape step, 255 indeterminate.
    pub fn code(&self) -> u8 {
        match *self {
            Verdict::Survived(_) => 0,
            Verdict::Escaped(k) => k.clamp(1, 254) as u8,
            Verdict::Indeterminate(_) => 255,
        }
    }

    pub fn is_escaped(&self) -> bool {
        matches!(self, Verdict::Escaped(_))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitRecord {
    pub start: Complex,
    /// `log|f^k(z₀)|` for every observed step.
    pub log_moduli: Vec<f64>,
    pub verdict: Verdict,
    /// `log β^k(r₀)` for `k = 0..=max_iter`.
    pub beta_track: Vec<f64>,
    /// First step at which the orbit fell to or below the track.
    pub track_failed_at: Option<usize>,
}

/// Shared parameters of every classification in a run.
#[derive(Debug, Clone)]
pub struct EscapeParams {
    pub r0: f64,
    pub beta: GrowthMinorant,
    pub max_iter: usize,
    pub bailout_log: f64,
}

impl EscapeParams {
    pub fn new(r0: f64, beta: GrowthMinorant, max_iter: usize, bailout_log: f64) -> Result<Self, DynamicsError> {
        if max_iter < 1 {
            return Err(DynamicsError::Invalid("max_iter must be at least 1".into()));
        }
        if !(bailout_log > 0.0 && bailout_log <= 700.0) {
            return Err(DynamicsError::Invalid(format!(
                "bailout_log {bailout_log} must lie in (0, 700]"
            )));
        }
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(DynamicsError::Invalid(format!("r0 {r0} must be positive")));
        }
        Ok(Self {
            r0,
            beta,
            max_iter,
            bailout_log,
        })
    }

    pub fn track(&self) -> Vec<f64> {
        beta_track(&self.beta, self.r0.ln(), self.max_iter)
    }
}

fn classify_with_track<F: EntireFunction + ?Sized>(
    f: &F,
    z0: Complex,
    params: &EscapeParams,
    track: &[f64],
) -> (Verdict, Vec<f64>, Option<usize>) {
    let mut log_moduli = Vec::new();
    let mut z = Some(z0);
    let mut l = z0.norm().ln();
    for (k, &floor) in track.iter().enumerate().take(params.max_iter + 1) {
        log_moduli.push(l);
        if !(l > floor) {
            return (Verdict::Survived(k), log_moduli, Some(k));
        }
        if l >= params.bailout_log {
            return (Verdict::Escaped(k), log_moduli, None);
        }
        if k == params.max_iter {
            break;
        }
        let Some(zk) = z else {
            return (Verdict::Indeterminate(k), log_moduli, None);
        };
        match f.eval_log(zk) {
            Ok(e) => {
                l = e.log_abs;
                z = if l < MAX_FINITE_LOG { e.to_complex() } else { None };
            }
            Err(ModelError::ZeroHit { .. }) => {
                l = f64::NEG_INFINITY;
                z = Some(Complex::new(0.0, 0.0));
            }
            Err(_) => return (Verdict::Indeterminate(k + 1), log_moduli, None),
        }
    }
    (Verdict::Survived(params.max_iter), log_moduli, None)
}

/// Classifies the orbit of `z0` against `log β^k(r₀)`.
pub fn classify_orbit<F: EntireFunction + ?Sized>(f: &F, z0: Complex, params: &EscapeParams) -> OrbitRecord {
    let track = params.track();
    let (verdict, log_moduli, track_failed_at) = classify_with_track(f, z0, params, &track);
    OrbitRecord {
        start: z0,
        log_moduli,
        verdict,
        beta_track: track,
        track_failed_at,
    }
}

fn verdict_at<F: EntireFunction + ?Sized>(f: &F, z0: Complex, params: &EscapeParams, track: &[f64]) -> Verdict {
    classify_with_track(f, z0, params, track).0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EscapeMap {
    pub window: Window,
    pub width: usize,
    pub height: usize,
    /// Row-major, top row first.
    pub verdicts: Vec<Verdict>,
}

impl EscapeMap {
    pub fn codes(&self) -> Vec<u8> {
        self.verdicts.iter().map(Verdict::code).collect()
    }

    pub fn escaped_fraction(&self) -> f64 {
        self.verdicts.iter().filter(|v| v.is_escaped()).count() as f64 / self.verdicts.len() as f64
    }

    /// Binary greymap `P5`.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.codes());
        out
    }
}

/// Classification at every pixel center of `window`.
pub fn escape_map<F: EntireFunction + ?Sized>(
    f: &F,
    window: &Window,
    width: usize,
    height: usize,
    params: &EscapeParams,
) -> Result<EscapeMap, DynamicsError> {
    if width == 0 || height == 0 {
        return Err(DynamicsError::Invalid("raster dimensions must be positive".into()));
    }
    let track = params.track();
    let verdicts = (0..width * height)
        .into_par_iter()
        .map(|i| {
            verdict_at(
                f,
                window.pixel_center(i % width, i / width, width, height),
                params,
                &track,
            )
        })
        .collect();
    Ok(EscapeMap {
        window: *window,
        width,
        height,
        verdicts,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureReport {
    /// Density of escaped verdicts.
    pub density: DensityReport,
    pub escaped: usize,
    pub survived: usize,
    pub indeterminate: usize,
    pub r0: f64,
    pub max_iter: usize,
    pub bailout_log: f64,
    pub beta: String,
    /// Set when `β` grows at least like `exp(r^μ)`, so escapes are fast.
    pub fast_escaping: bool,
}

/// `r/2` for an annulus; for a window, half the smallest modulus of its
/// points, or 1 when it contains the origin.
pub fn default_r0(region: &Region) -> f64 {
    match region {
        Region::Annulus(a) => a.r / 2.0,
        Region::Window(w) => {
            let dx = if w.x0 > 0.0 {
                w.x0
            } else if w.x1 < 0.0 {
                -w.x1
            } else {
                0.0
            };
            let dy = if w.y0 > 0.0 {
                w.y0
            } else if w.y1 < 0.0 {
                -w.y1
            } else {
                0.0
            };
            let d = dx.hypot(dy);
            if d > 0.0 {
                d / 2.0
            } else {
                1.0
            }
        }
    }
}

/// Density of escaped verdicts over `region` under `plan`.
pub fn measure_estimate<F: EntireFunction + ?Sized>(
    f: &F,
    region: &Region,
    plan: &SamplePlan,
    params: &EscapeParams,
) -> MeasureReport {
    let track = params.track();
    let total = plan.total();
    let counts = (0..total)
        .into_par_iter()
        .map(|i| match verdict_at(f, sample_point(region, plan, i), params, &track) {
            Verdict::Escaped(_) => [1usize, 0, 0],
            Verdict::Survived(_) => [0, 1, 0],
            Verdict::Indeterminate(_) => [0, 0, 1],
        })
        .reduce(|| [0; 3], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
    MeasureReport {
        density: DensityReport::from_counts(*region, *plan, counts[0], total),
        escaped: counts[0],
        survived: counts[1],
        indeterminate: counts[2],
        r0: params.r0,
        max_iter: params.max_iter,
        bailout_log: params.bailout_log,
        beta: params.beta.label(),
        fast_escaping: params.beta.is_fast(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ExponentialSum;
    use crate::sampling::AnnulusSpec;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn half_params(r0: f64, max_iter: usize) -> EscapeParams {
        EscapeParams::new(r0, GrowthMinorant::exp_power(0.5, 1.0).unwrap(), max_iter, 500.0).unwrap()
    }

    #[test]
    fn exp_escapes_on_the_second_step() {
        let rec = classify_orbit(&ExponentialSum::exp(), c(100.0, 0.0), &half_params(50.0, 10));
        // log|z₁| = 100 is still below the bailout; log|z₂| = e^100 is past it
        assert_eq!(rec.verdict, Verdict::Escaped(2));
        assert_eq!(rec.log_moduli[1], 100.0);
        assert!((rec.beta_track[1] - 25.0).abs() < 1e-12);
        assert!((rec.log_moduli[2] - 100f64.exp()).abs() / 100f64.exp() < 1e-15);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn sine_fixed_point_and_bounded_orbit_survive() {
        let p = EscapeParams::new(0.5, GrowthMinorant::linear(2.0).unwrap(), 100, 500.0).unwrap();
        let rec = classify_orbit(&ExponentialSum::sin(), c(0.0, 0.0), &p);
        assert!(matches!(rec.verdict, Verdict::Survived(_)));
        let rec = classify_orbit(&ExponentialSum::sin(), c(1.5708, 0.0), &p);
        assert!(matches!(rec.verdict, Verdict::Survived(_)));
        // direct iteration oracle: the orbit stays in [-1, 1]
        let mut x: f64 = 1.5708;
        for _ in 0..100 {
            x = x.sin();
            assert!(x.abs() <= 1.0);
        }
    }

    #[test]
    fn codes_and_pgm() {
        assert_eq!(Verdict::Survived(3).code(), 0);
        assert_eq!(Verdict::Escaped(0).code(), 1);
        assert_eq!(Verdict::Escaped(7).code(), 7);
        assert_eq!(Verdict::Escaped(900).code(), 254);
        assert_eq!(Verdict::Indeterminate(1).code(), 255);
        let w = Window::new(-2.0, 2.0, -2.0, 2.0).unwrap();
        let map = escape_map(&ExponentialSum::exp(), &w, 4, 4, &half_params(0.5, 50)).unwrap();
        let pgm = map.to_pgm();
        assert!(pgm.starts_with(b"P5\n4 4\n255\n"));
        assert_eq!(pgm.len(), 11 + 16);
    }

    /// `f ≡ 0`, which the closed model types cannot express.
    struct Zero;

    impl EntireFunction for Zero {
        fn eval_log(&self, z: Complex) -> Result<crate::models::LogEval, ModelError> {
            Err(ModelError::ZeroHit { z })
        }

        fn log_derivative(&self, z: Complex) -> Result<Complex, ModelError> {
            Err(ModelError::NearZero { z })
        }
    }

    #[test]
    fn zero_model_never_escapes() {
        let zero = Zero;
        let w = Window::new(-2.0, 2.0, -2.0, 2.0).unwrap();
        let map = escape_map(&zero, &w, 4, 4, &half_params(0.5, 10)).unwrap();
        assert!(map.verdicts.iter().all(|v| matches!(v, Verdict::Survived(_))));
        let half = ExponentialSum::polynomial(vec![c(0.0, 0.0), c(0.5, 0.0)]);
        let rep = measure_estimate(
            &half,
            &Region::Annulus(AnnulusSpec::new(10.0)),
            &SamplePlan::Grid { n_a: 16, n_b: 16 },
            &half_params(5.0, 20),
        );
        assert_eq!(rep.escaped, 0);
    }

    #[test]
    fn exp_right_half_annulus_escapes() {
        let region = Region::Annulus(AnnulusSpec::new(200.0));
        let p = half_params(default_r0(&region), 20);
        let rep = measure_estimate(
            &ExponentialSum::exp(),
            &region,
            &SamplePlan::Grid { n_a: 64, n_b: 64 },
            &p,
        );
        assert!(rep.density.density > 0.0);
        assert!(rep.fast_escaping);
    }

    #[test]
    fn escapes_are_monotone_in_max_iter() {
        let w = Window::new(-4.0, 4.0, -4.0, 4.0).unwrap();
        let short = escape_map(&ExponentialSum::exp(), &w, 24, 24, &half_params(0.5, 3)).unwrap();
        let long = escape_map(&ExponentialSum::exp(), &w, 24, 24, &half_params(0.5, 30)).unwrap();
        for (a, b) in short.verdicts.iter().zip(&long.verdicts) {
            if a.is_escaped() {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn params_are_validated() {
        let b = GrowthMinorant::linear(2.0).unwrap();
        assert!(EscapeParams::new(1.0, b.clone(), 0, 500.0).is_err());
        assert!(EscapeParams::new(1.0, b.clone(), 5, 800.0).is_err());
        assert!(EscapeParams::new(0.0, b, 5, 500.0).is_err());
    }
}
