//! Exceptional disk sets: Besicovitch sub-covers, Fuchs–Macintyre and
//! Cartan/Levin disks with their probe audits, inflation, budgets and Koebe
//! distortion constants.
//!
//! The Fuchs–Macintyre and Cartan constructions share one greedy: at each
//! stage pick the largest `λ` such that some closed disk of radius
//! `H (λ/n)^{1/d}` holds `λ` of the remaining points, remove them, and finally
//! double every radius. Outside the doubled disks every `D(z, t)` holds at most
//! `n (t/H)^d` points, which is what both audits rely on.

use crate::sampling::{halton_point, uniform_pair};
use num_complex::Complex64 as Complex;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{E, PI};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoveringError {
    #[error("certificate failed: {0}")]
    CertificateFailure(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Disk {
    pub center: Complex,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Complex, radius: f64) -> Self {
        Self { center, radius }
    }

    /// Open disk membership.
    pub fn contains(&self, z: Complex) -> bool {
        (z - self.center).norm() < self.radius
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DiskSet {
    disks: Vec<Disk>,
}

impl DiskSet {
    pub fn new(disks: Vec<Disk>) -> Result<Self, CoveringError> {
        if let Some(d) = disks
            .iter()
            .find(|d| !(d.radius > 0.0 && d.radius.is_finite() && d.center.is_finite()))
        {
            return Err(CoveringError::Invalid(format!("bad disk {d:?}")));
        }
        Ok(Self { disks })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn disks(&self) -> &[Disk] {
        &self.disks
    }

    pub fn len(&self) -> usize {
        self.disks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.disks.is_empty()
    }

    pub fn sum_radii(&self) -> f64 {
        self.disks.iter().map(|d| d.radius).sum()
    }

    pub fn sum_sq_radii(&self) -> f64 {
        self.disks.iter().map(|d| d.radius * d.radius).sum()
    }

    pub fn contains(&self, z: Complex) -> bool {
        self.disks.iter().any(|d| d.contains(z))
    }

    /// Number of open disks containing `z`.
    pub fn multiplicity(&self, z: Complex) -> usize {
        self.disks.iter().filter(|d| d.contains(z)).count()
    }

    /// One `re im radius` line per disk.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for d in &self.disks {
            writeln!(out, "{:.16e} {:.16e} {:.16e}", d.center.re, d.center.im, d.radius).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, CoveringError> {
        let mut disks = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| CoveringError::Parse {
                    line: i + 1,
                    message: format!("not a number: {s:?}"),
                })
            };
            if fields.len() != 3 {
                return Err(CoveringError::Parse {
                    line: i + 1,
                    message: format!("expected 3 fields, found {}", fields.len()),
                });
            }
            let (re, im, radius) = (parse(fields[0])?, parse(fields[1])?, parse(fields[2])?);
            if !(radius > 0.0) {
                return Err(CoveringError::Parse {
                    line: i + 1,
                    message: "radius must be positive".into(),
                });
            }
            disks.push(Disk::new(Complex::new(re, im), radius));
        }
        Self::new(disks)
    }
}

// ---------------------------------------------------------------------------
// Besicovitch

/// Multiplicity bound of the planar Besicovitch lemma, `4^{2·2}`.
pub const BESICOVITCH_BOUND: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BesicovitchCover {
    /// Indices into the input, in selection order.
    pub selected: Vec<usize>,
    pub disks: DiskSet,
}

/// Greedy sub-cover: visit disks by descending radius and keep one when its
/// center is not inside an already kept disk.
pub fn besicovitch_cover(
    points: &[Complex],
    radius_fn: impl Fn(Complex) -> f64,
) -> Result<BesicovitchCover, CoveringError> {
    let radii: Vec<f64> = points.iter().map(|&p| radius_fn(p)).collect();
    besicovitch_cover_with_radii(points, &radii)
}

/// [`besicovitch_cover`] with the radius of each point given by position.
pub fn besicovitch_cover_with_radii(points: &[Complex], radii: &[f64]) -> Result<BesicovitchCover, CoveringError> {
    if radii.len() != points.len() {
        return Err(CoveringError::Invalid(format!(
            "{} points but {} radii",
            points.len(),
            radii.len()
        )));
    }
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(CoveringError::Invalid(format!("radius {r} must be positive")));
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| radii[b].total_cmp(&radii[a]).then(a.cmp(&b)));
    let mut selected: Vec<usize> = Vec::new();
    for i in order {
        let covered = selected.iter().any(|&s| (points[i] - points[s]).norm() < radii[s]);
        if !covered {
            selected.push(i);
        }
    }
    let disks = DiskSet::new(selected.iter().map(|&i| Disk::new(points[i], radii[i])).collect())?;
    Ok(BesicovitchCover { selected, disks })
}

/// Largest multiplicity over the probes.
pub fn max_multiplicity(disks: &DiskSet, probes: &[Complex]) -> usize {
    probes.par_iter().map(|&z| disks.multiplicity(z)).max().unwrap_or(0)
}

// ---------------------------------------------------------------------------
// mass-concentration greedy

/// Closed disk of radius `rho` holding the most points; `(count, center)`.
///
/// Any optimal disk can be moved until a point lies on its boundary, so it
/// suffices to sweep, for every point `p`, the centers `p + ρe^{iφ}` and
/// count the arcs of `φ` that capture the other points.
fn max_cover(points: &[Complex], rho: f64) -> (usize, Complex) {
    let slack = 1e-12 * rho;
    let mut best = (0, Complex::new(0.0, 0.0));
    let mut events: Vec<(f64, i32)> = Vec::new();
    for (i, &p) in points.iter().enumerate() {
        events.clear();
        let mut always = 1usize;
        for (j, &q) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = (q - p).norm();
            if d <= slack {
                always += 1;
                continue;
            }
            if d > 2.0 * rho {
                continue;
            }
            let alpha = (q - p).arg();
            let beta = (d / (2.0 * rho)).min(1.0).acos();
            let lo = (alpha - beta).rem_euclid(2.0 * PI);
            let hi = lo + 2.0 * beta;
            events.push((lo, 1));
            events.push((hi, -1));
            // arcs that wrap past 2π also count from φ = 0
            events.push((lo + 2.0 * PI, 1));
            events.push((hi + 2.0 * PI, -1));
        }
        if always > best.0 {
            best = (always, p + Complex::new(rho, 0.0));
        }
        events.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
        let mut running = 0i32;
        for &(phi, delta) in &events {
            running += delta;
            if delta > 0 && always + running as usize > best.0 {
                best = (always + running as usize, p + Complex::from_polar(rho, phi));
            }
        }
    }
    best
}

/// Disks of radii `2H (λ_k/n)^{1/dim}` built by the greedy above, shrunk by
/// one part in 10¹² so that the budget identity survives rounding.
fn concentration_disks(points: &[Complex], h: f64, dim: i32) -> Vec<Disk> {
    let n = points.len();
    let radius = |lam: usize| h * (lam as f64 / n as f64).powf(1.0 / dim as f64);
    let mut remaining: Vec<Complex> = points.to_vec();
    let mut out = Vec::new();
    let mut lam = n;
    while !remaining.is_empty() {
        lam = lam.min(remaining.len());
        if lam == 1 {
            for &p in &remaining {
                out.push(Disk::new(p, 2.0 * radius(1) * (1.0 - 1e-12)));
            }
            break;
        }
        let (count, center) = loop {
            let (count, center) = max_cover(&remaining, radius(lam));
            if count >= lam {
                break (count, center);
            }
            lam = count;
        };
        let rho = radius(lam);
        let mut taken = 0;
        remaining.retain(|&p| {
            if taken < count && (p - center).norm() <= rho * (1.0 + 1e-12) {
                taken += 1;
                false
            } else {
                true
            }
        });
        debug_assert_eq!(taken, lam);
        out.push(Disk::new(center, 2.0 * rho * (1.0 - 1e-12)));
    }
    out
}

/// Relative slack allowed in the probe audits for the radius shrink.
pub const AUDIT_SLACK: f64 = 1e-9;

/// Probes used by the covering audits: Halton points of `box` plus points just
/// outside every disk boundary.
fn audit_probes(bbox: (f64, f64, f64, f64), disks: &[Disk], count: usize, seed: u64) -> Vec<Complex> {
    let (x0, x1, y0, y1) = bbox;
    let mut probes: Vec<Complex> = (0..count as u64)
        .map(|i| {
            let (u, v) = halton_point(i, seed);
            Complex::new(x0 + u * (x1 - x0), y0 + v * (y1 - y0))
        })
        .collect();
    for d in disks {
        for j in 0..16 {
            let phi = 2.0 * PI * (j as f64 + 0.5) / 16.0;
            probes.push(d.center + Complex::from_polar(d.radius * (1.0 + 1e-9), phi));
        }
    }
    probes
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuchsCertificate {
    pub sum_sq_radii: f64,
    /// `4H²`.
    pub area_bound: f64,
    /// Largest `Σ 1/|z - z_k|` over probes outside the disks.
    pub max_harmonic_sum: f64,
    /// `2n/H`.
    pub harmonic_bound: f64,
    pub probes_outside: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuchsCover {
    pub disks: DiskSet,
    pub certificate: FuchsCertificate,
}

pub const FUCHS_PROBES: usize = 10_000;

/// Disks with `Σ t_k² ≤ 4H²` outside which `Σ 1/|z - z_k| ≤ 2n/H`, audited
/// on [`FUCHS_PROBES`] Halton probes (seeded by `seed`) plus points hugging
/// each disk.
pub fn fuchs_macintyre_disks(points: &[Complex], h: f64, seed: u64) -> Result<FuchsCover, CoveringError> {
    if points.is_empty() || !(h > 0.0 && h.is_finite()) || points.iter().any(|p| !p.is_finite()) {
        return Err(CoveringError::Invalid("need at least one point and H > 0".into()));
    }
    let n = points.len();
    let disks = DiskSet::new(concentration_disks(points, h, 2))?;
    let sum_sq = disks.sum_sq_radii();
    let area_bound = 4.0 * h * h;
    if sum_sq > area_bound {
        return Err(CoveringError::CertificateFailure(format!(
            "Σt² = {sum_sq} > 4H² = {area_bound}"
        )));
    }
    let margin = 2.0 * h;
    let bbox = bounding_box(points, margin);
    let probes = audit_probes(bbox, disks.disks(), FUCHS_PROBES, seed);
    let harmonic_bound = 2.0 * n as f64 / h;
    let (max_sum, outside) = probes
        .par_iter()
        .filter(|&&z| !disks.contains(z))
        .map(|&z| (points.iter().map(|p| 1.0 / (z - p).norm()).sum::<f64>(), 1usize))
        .reduce(|| (0.0, 0), |a, b| (a.0.max(b.0), a.1 + b.1));
    if max_sum > harmonic_bound * (1.0 + AUDIT_SLACK) {
        return Err(CoveringError::CertificateFailure(format!(
            "Σ 1/|z - z_k| = {max_sum} > 2n/H = {harmonic_bound}"
        )));
    }
    Ok(FuchsCover {
        disks,
        certificate: FuchsCertificate {
            sum_sq_radii: sum_sq,
            area_bound,
            max_harmonic_sum: max_sum,
            harmonic_bound,
            probes_outside: outside,
        },
    })
}

fn bounding_box(points: &[Complex], margin: f64) -> (f64, f64, f64, f64) {
    let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        b.0 = b.0.min(p.re);
        b.1 = b.1.max(p.re);
        b.2 = b.2.min(p.im);
        b.3 = b.3.max(p.im);
    }
    (b.0 - margin, b.1 + margin, b.2 - margin, b.3 + margin)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CartanCertificate {
    pub sum_radii: f64,
    /// `4ηR`.
    pub radius_bound: f64,
    /// `log M(2eR, g)` from angular sampling of the factorization.
    pub log_max_modulus: f64,
    /// `-(2 + log(3e/2η)) log M(2eR, g)`.
    pub lower_bound: f64,
    /// Smallest `log|g|` over probes in `D(0, R)` outside the disks.
    pub min_log_modulus: f64,
    pub probes_outside: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CartanCover {
    pub disks: DiskSet,
    pub certificate: CartanCertificate,
}

pub const CARTAN_PROBES: usize = 10_000;
const MAX_MODULUS_ANGLES: usize = 4096;

/// `log|g(z)|` for `g(z) = Π (1 - z/z_k)`.
pub fn log_abs_normalized_polynomial(zeros: &[Complex], z: Complex) -> f64 {
    zeros.iter().map(|a| (1.0 - z / a).norm().ln()).sum()
}

/// Boutroux–Cartan disks for `g(z) = Π(1 - z/z_k)` with `Σ s_k ≤ 4ηR`, and an
/// audit of `log|g| ≥ -(2 + log(3e/2η)) log M(2eR, g)` on `D(0, R)` outside
/// them.
///
/// The audit is non-strict because `g ≡ 1` meets the bound with equality.
pub fn cartan_levin_disks(zeros: &[Complex], r: f64, eta: f64, seed: u64) -> Result<CartanCover, CoveringError> {
    if !(r > 0.0 && r.is_finite()) || !(eta > 0.0 && eta < 1.5 * E) {
        return Err(CoveringError::Invalid(format!(
            "need R > 0 and 0 < η < 3e/2, got R = {r}, η = {eta}"
        )));
    }
    if let Some(a) = zeros.iter().find(|a| !(a.norm() > 0.0 && a.norm() <= 2.0 * r)) {
        return Err(CoveringError::Invalid(format!("zero {a} is not in 0 < |z| ≤ 2R")));
    }
    let radius_bound = 4.0 * eta * r;
    let disks = if zeros.is_empty() {
        DiskSet::empty()
    } else {
        DiskSet::new(concentration_disks(zeros, 2.0 * eta * r, 1))?
    };
    let sum_radii = disks.sum_radii();
    if sum_radii > radius_bound {
        return Err(CoveringError::CertificateFailure(format!(
            "Σs = {sum_radii} > 4ηR = {radius_bound}"
        )));
    }
    let big = 2.0 * E * r;
    let log_m = (0..MAX_MODULUS_ANGLES)
        .map(|j| {
            let z = Complex::from_polar(big, 2.0 * PI * j as f64 / MAX_MODULUS_ANGLES as f64);
            log_abs_normalized_polynomial(zeros, z)
        })
        .fold(0.0f64, f64::max);
    let lower_bound = -(2.0 + (1.5 * E / eta).ln()) * log_m;
    let mut probes: Vec<Complex> = (0..CARTAN_PROBES as u64)
        .map(|i| {
            let (u, v) = halton_point(i, seed);
            Complex::from_polar(r * u.sqrt(), 2.0 * PI * v)
        })
        .collect();
    for d in disks.disks() {
        for j in 0..16 {
            let phi = 2.0 * PI * (j as f64 + 0.5) / 16.0;
            let z = d.center + Complex::from_polar(d.radius * (1.0 + 1e-9), phi);
            if z.norm() <= r {
                probes.push(z);
            }
        }
    }
    let (min_log, outside) = probes
        .par_iter()
        .filter(|&&z| !disks.contains(z))
        .map(|&z| (log_abs_normalized_polynomial(zeros, z), 1usize))
        .reduce(|| (f64::INFINITY, 0), |a, b| (a.0.min(b.0), a.1 + b.1));
    if min_log < lower_bound - AUDIT_SLACK * lower_bound.abs() {
        return Err(CoveringError::CertificateFailure(format!(
            "log|g| = {min_log} < {lower_bound}"
        )));
    }
    Ok(CartanCover {
        disks,
        certificate: CartanCertificate {
            sum_radii,
            radius_bound,
            log_max_modulus: log_m,
            lower_bound,
            min_log_modulus: min_log,
            probes_outside: outside,
        },
    })
}

// ---------------------------------------------------------------------------
// bookkeeping

/// Every radius increased by `q`.
pub fn inflate(disks: &DiskSet, q: f64) -> Result<DiskSet, CoveringError> {
    if !(q >= 0.0 && q.is_finite()) {
        return Err(CoveringError::Invalid(format!("inflation {q} must be non-negative")));
    }
    DiskSet::new(
        disks
            .disks()
            .iter()
            .map(|d| Disk::new(d.center, d.radius + q))
            .collect(),
    )
}

/// `(Σ(t_k + q)², 2Σt_k² + 2mq²)`; the first never exceeds the second.
pub fn inflation_area_bound(disks: &DiskSet, q: f64) -> (f64, f64) {
    let inflated: f64 = disks.disks().iter().map(|d| (d.radius + q).powi(2)).sum();
    let bound = 2.0 * disks.sum_sq_radii() + 2.0 * disks.len() as f64 * q * q;
    (inflated, bound)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BudgetRatios {
    /// `Σ_{|a_k| ≤ r} s_k / r`.
    pub c0_ratio: f64,
    /// `Σ_{|a_k| ≤ r} s_k² / r²`.
    pub area_ratio: f64,
}

pub fn budget_checks(disks: &DiskSet, r: f64) -> BudgetRatios {
    let inside = disks.disks().iter().filter(|d| d.center.norm() <= r);
    let (s, s2) = inside.fold((0.0, 0.0), |acc, d| (acc.0 + d.radius, acc.1 + d.radius * d.radius));
    BudgetRatios {
        c0_ratio: s / r,
        area_ratio: s2 / (r * r),
    }
}

/// Koebe growth and distortion bounds for a univalent map on `D(a, R)`
/// restricted to `D(a, ρR)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KoebeConstants {
    pub rho: f64,
    /// `ρ/(1+ρ)²`.
    pub growth_lower: f64,
    /// `ρ/(1-ρ)²`.
    pub growth_upper: f64,
    /// `(1-ρ)/(1+ρ)³`.
    pub derivative_lower: f64,
    /// `(1+ρ)/(1-ρ)³`.
    pub derivative_upper: f64,
    /// `(1+ρ)²/(1-ρ)²`, the spread of the growth bounds.
    pub growth_ratio: f64,
    /// `(1+ρ)⁴/(1-ρ)⁴`, the spread of the derivative bounds.
    pub derivative_ratio: f64,
}

pub fn koebe_constants(rho: f64) -> Result<KoebeConstants, CoveringError> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(CoveringError::Invalid(format!("ρ = {rho} must lie in (0, 1)")));
    }
    let (p, m) = (1.0 + rho, 1.0 - rho);
    Ok(KoebeConstants {
        rho,
        growth_lower: rho / (p * p),
        growth_upper: rho / (m * m),
        derivative_lower: m / (p * p * p),
        derivative_upper: p / (m * m * m),
        growth_ratio: (p / m).powi(2),
        derivative_ratio: (p / m).powi(4),
    })
}

/// `count` seeded uniform points of the unit square.
pub fn random_unit_square_points(count: usize, seed: u64) -> Vec<Complex> {
    (0..count as u64)
        .map(|i| {
            let (u, v) = uniform_pair(seed, i);
            Complex::new(u, v)
        })
        .collect()
}
