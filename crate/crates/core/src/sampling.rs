//! Sampling plans over annuli and rectangular windows.
//!
//! Every sample is addressed by its index. Monte Carlo samples draw from a
//! ChaCha stream selected by `(seed, index)`, so a plan yields the same points
//! no matter how the indices are distributed over worker threads.

use num_complex::Complex64 as Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

/// The annulus `ann(r) = {z : r/2 < |z| < 2r}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnulusSpec {
    pub r: f64,
}

impl AnnulusSpec {
    pub fn new(r: f64) -> Self {
        assert!(r > 0.0 && r.is_finite(), "annulus radius must be positive");
        Self { r }
    }

    /// `15πr²/4`.
    pub fn area(&self) -> f64 {
        15.0 * PI * self.r * self.r / 4.0
    }

    pub fn contains(&self, z: Complex) -> bool {
        let m = z.norm();
        m > 0.5 * self.r && m < 2.0 * self.r
    }
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Window {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Option<Self> {
        let ok = [x0, x1, y0, y1].iter().all(|v| v.is_finite()) && x1 > x0 && y1 > y0;
        ok.then_some(Self { x0, x1, y0, y1 })
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    /// Center of pixel `(col, row)` in a `width × height` raster whose top row
    /// carries the largest imaginary part.
    pub fn pixel_center(&self, col: usize, row: usize, width: usize, height: usize) -> Complex {
        let dx = (self.x1 - self.x0) / width as f64;
        let dy = (self.y1 - self.y0) / height as f64;
        Complex::new(self.x0 + (col as f64 + 0.5) * dx, self.y1 - (row as f64 + 0.5) * dy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Annulus(AnnulusSpec),
    Window(Window),
}

impl Region {
    pub fn area(&self) -> f64 {
        match self {
            Region::Annulus(a) => a.area(),
            Region::Window(w) => w.area(),
        }
    }
}

/// How a region is sampled.
///
/// `Grid { n_a, n_b }` means `n_θ × n_r` polar cells for an annulus (radial
/// bands of equal area, so every cell carries the same weight) and
/// `width × height` pixels for a window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SamplePlan {
    Grid { n_a: usize, n_b: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

impl SamplePlan {
    pub fn total(&self) -> usize {
        match *self {
            SamplePlan::Grid { n_a, n_b } => n_a * n_b,
            SamplePlan::MonteCarlo { samples, .. } => samples,
        }
    }

    pub fn is_monte_carlo(&self) -> bool {
        matches!(self, SamplePlan::MonteCarlo { .. })
    }
}

/// Two uniforms in `[0, 1)` from the stream `(seed, index)`.
pub fn uniform_pair(seed: u64, index: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    (rng.random::<f64>(), rng.random::<f64>())
}

/// Area-uniform point of `ann(r)` from two uniforms.
///
/// `|z|²` is uniform on `(r²/4, 4r²)`, which is the inverse CDF of the
/// radial marginal of the area measure.
pub fn annulus_point(ann: &AnnulusSpec, u: f64, v: f64) -> Complex {
    let modulus = ann.r * (0.25 + 3.75 * u).sqrt();
    Complex::from_polar(modulus, 2.0 * PI * v)
}

/// The `index`-th sample point of `region` under `plan`.
pub fn sample_point(region: &Region, plan: &SamplePlan, index: usize) -> Complex {
    match (*plan, region) {
        (SamplePlan::MonteCarlo { seed, .. }, Region::Annulus(a)) => {
            let (u, v) = uniform_pair(seed, index as u64);
            annulus_point(a, u, v)
        }
        (SamplePlan::MonteCarlo { seed, .. }, Region::Window(w)) => {
            let (u, v) = uniform_pair(seed, index as u64);
            Complex::new(w.x0 + u * (w.x1 - w.x0), w.y0 + v * (w.y1 - w.y0))
        }
        (SamplePlan::Grid { n_a, n_b }, Region::Annulus(a)) => {
            let (ia, ib) = (index % n_a, index / n_a);
            let u = (ib as f64 + 0.5) / n_b as f64;
            let v = (ia as f64 + 0.5) / n_a as f64;
            annulus_point(a, u, v)
        }
        (SamplePlan::Grid { n_a, n_b }, Region::Window(w)) => w.pixel_center(index % n_a, index / n_a, n_a, n_b),
    }
}

/// 95% normal-approximation halfwidth for a proportion.
pub fn binomial_halfwidth(hits: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = hits as f64 / total as f64;
    1.96 * (p * (1.0 - p) / total as f64).sqrt()
}

/// Point `index` of a 2-D Halton sequence (bases 2 and 3) with a
/// Cranley–Patterson shift drawn from `seed`.
pub fn halton_point(index: u64, seed: u64) -> (f64, f64) {
    fn radical_inverse(mut i: u64, base: u64) -> f64 {
        let inv = 1.0 / base as f64;
        let mut f = inv;
        let mut acc = 0.0;
        while i > 0 {
            acc += (i % base) as f64 * f;
            i /= base;
            f *= inv;
        }
        acc
    }
    let (su, sv) = uniform_pair(seed, u64::MAX);
    let u = (radical_inverse(index + 1, 2) + su).fract();
    let v = (radical_inverse(index + 1, 3) + sv).fract();
    (u, v)
}
