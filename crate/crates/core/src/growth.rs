//! Growth scales: proximate orders, the ε-cascade, indicators, growth
//! minorants `β` and density budgets `α`.
//!
//! Quantities that are evaluated at iterated radii (`β^n(r₀)` grows like a
//! tower) take `ln r` instead of `r`, so that nothing overflows before the
//! values stop mattering. Logs beyond [`LOG_CAP`] are reported as `+∞`.

use crate::models::{CanonicalProduct, EntireFunction, ExponentialSum, ModelError};
use num_complex::Complex64 as Complex;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Iterated logs above this are replaced by `+∞`.
pub const LOG_CAP: f64 = 1e300;

/// Angular samples used for `log M(r)`.
pub const MAX_MODULUS_SAMPLES: usize = 2048;

/// Grid points per arc in the wedge lower-bound check.
pub const WEDGE_GRID: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrowthError {
    #[error("r0 = {r0} is not above the minorant threshold {threshold}")]
    BelowThreshold { r0: f64, threshold: f64 },
    #[error("every radius hit a zero along θ = {theta}")]
    AllSamplesHitZeros { theta: f64 },
    #[error("indicator is not positive at θ = {theta} inside an arc")]
    NonpositiveInterior { theta: f64 },
    #[error("arc [{start}, {end}] has no interior")]
    DegenerateArc { start: f64, end: f64 },
    #[error("operation needs an exact indicator")]
    NotExact,
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

type LogFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

// ---------------------------------------------------------------------------
// proximate orders

/// A proximate order `ρ(r)` with `ρ(r) → ρ` and `ρ'(r) r log r → 0`.
///
/// Both `ρ(r)` and the bound on `|ρ'(r) r log r|` are stored as functions of
/// `ln r`.
#[derive(Clone)]
pub struct ProximateOrder {
    limit: f64,
    rho: LogFn,
    derivative_bound: LogFn,
    label: String,
}

impl fmt::Debug for ProximateOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProximateOrder")
            .field("limit", &self.limit)
            .field("label", &self.label)
            .finish()
    }
}

impl ProximateOrder {
    /// `ρ(r) ≡ ρ`.
    pub fn constant(rho: f64) -> Self {
        assert!(rho > 0.0 && rho.is_finite());
        Self {
            limit: rho,
            rho: Arc::new(move |_| rho),
            derivative_bound: Arc::new(|_| 0.0),
            label: format!("const:{rho}"),
        }
    }

    /// `ρ(r) = ρ + a / log r` for `r > e`, frozen at `ρ + a` below.
    pub fn log_corrected(rho: f64, a: f64) -> Self {
        assert!(rho > 0.0 && rho.is_finite() && a.is_finite());
        Self {
            limit: rho,
            rho: Arc::new(move |l| if l > 1.0 { rho + a / l } else { rho + a }),
            // ρ'(r) r log r = -a / log r
            derivative_bound: Arc::new(move |l| if l > 1.0 { a.abs() / l } else { 0.0 }),
            label: format!("logcorr:{rho},{a}"),
        }
    }

    /// A user-supplied order; both closures take `ln r`.
    pub fn custom(
        limit: f64,
        label: impl Into<String>,
        rho_of_log_r: impl Fn(f64) -> f64 + Send + Sync + 'static,
        bound_of_log_r: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            limit,
            rho: Arc::new(rho_of_log_r),
            derivative_bound: Arc::new(bound_of_log_r),
            label: label.into(),
        }
    }

    pub fn limit(&self) -> f64 {
        self.limit
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rho_at_log(&self, log_r: f64) -> f64 {
        (self.rho)(log_r)
    }

    pub fn rho(&self, r: f64) -> f64 {
        self.rho_at_log(r.ln())
    }

    /// Declared bound on `|ρ'(r) r log r|`.
    pub fn derivative_bound(&self, r: f64) -> f64 {
        (self.derivative_bound)(r.ln())
    }

    /// `log V(r) = ρ(r) log r`.
    pub fn log_scale_at_log(&self, log_r: f64) -> f64 {
        self.rho_at_log(log_r) * log_r
    }

    /// `V(r) = r^{ρ(r)}`.
    pub fn scale(&self, r: f64) -> f64 {
        r.powf(self.rho(r))
    }
}

/// `V(r) = r^{ρ(r)}`.
pub fn scale_v(po: &ProximateOrder, r: f64) -> f64 {
    po.scale(r)
}

// ---------------------------------------------------------------------------
// ε-cascade

/// `ε₁(r) = 1/log^N r`, `ε₂ = √ε₁`, `ε₃ = √ε₂`, with `ε = 1` below
/// `exp^N(1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EpsilonCascade {
    pub depth: u32,
}

impl EpsilonCascade {
    pub fn new(depth: u32) -> Self {
        assert!(depth >= 1, "cascade depth must be positive");
        Self { depth }
    }

    pub fn eps1_at_log(&self, log_r: f64) -> f64 {
        let mut x = log_r;
        for _ in 1..self.depth {
            if x.is_nan() || x <= 1.0 {
                return 1.0;
            }
            x = x.ln();
        }
        if x.is_nan() || x <= 1.0 {
            1.0
        } else {
            1.0 / x
        }
    }

    pub fn eps1(&self, r: f64) -> f64 {
        self.eps1_at_log(r.ln())
    }

    pub fn eps2(&self, r: f64) -> f64 {
        self.eps1(r).sqrt()
    }

    pub fn eps3(&self, r: f64) -> f64 {
        self.eps2(r).sqrt()
    }

    pub fn eps3_at_log(&self, log_r: f64) -> f64 {
        self.eps1_at_log(log_r).sqrt().sqrt()
    }

    /// `log exp^N(1) = exp^{N-1}(1)`, below which the cascade is floored.
    pub fn floor_log(&self) -> f64 {
        (1..self.depth).fold(1.0f64, |x, _| x.exp())
    }
}

// ---------------------------------------------------------------------------
// indicators

/// One sinusoidal arc `h(θ) = amplitude · cos(ρθ + phase)` on `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndicatorArc {
    pub start: f64,
    pub end: f64,
    pub amplitude: f64,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Indicator {
    /// Piecewise sinusoid. `arcs` tile `[arcs[0].start, arcs[0].start + 2π)`;
    /// `breakpoints` are the angles where the sinusoid changes (empty for a
    /// single smooth arc).
    Exact {
        rho: f64,
        breakpoints: Vec<f64>,
        arcs: Vec<IndicatorArc>,
    },
    /// Sampled `max_r log|f(re^{iθ})| / V(r)` over a radius ladder.
    Empirical {
        thetas: Vec<f64>,
        values: Vec<f64>,
        radii: Vec<f64>,
    },
}

impl Indicator {
    pub fn value(&self, theta: f64) -> f64 {
        match self {
            Indicator::Exact { rho, arcs, .. } => {
                let s0 = arcs[0].start;
                let t = s0 + (theta - s0).rem_euclid(2.0 * PI);
                let arc = arcs
                    .iter()
                    .find(|a| t >= a.start && t < a.end)
                    .unwrap_or(&arcs[arcs.len() - 1]);
                arc.amplitude * (rho * t + arc.phase).cos()
            }
            Indicator::Empirical { thetas, values, .. } => periodic_interp(thetas, values, theta),
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        match self {
            Indicator::Exact { breakpoints, .. } => breakpoints,
            Indicator::Empirical { .. } => &[],
        }
    }

    pub fn rho(&self) -> Option<f64> {
        match self {
            Indicator::Exact { rho, .. } => Some(*rho),
            Indicator::Empirical { .. } => None,
        }
    }

    /// Circular distance from `theta` to the nearest breakpoint.
    pub fn distance_to_breakpoints(&self, theta: f64) -> f64 {
        self.breakpoints()
            .iter()
            .map(|b| {
                let d = (theta - b).rem_euclid(2.0 * PI);
                d.min(2.0 * PI - d)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Maximal open arcs on which an exact indicator is positive.
    pub fn positive_arcs(&self) -> Result<Vec<(f64, f64)>, GrowthError> {
        let Indicator::Exact { rho, breakpoints, arcs } = self else {
            return Err(GrowthError::NotExact);
        };
        let s0 = arcs[0].start;
        let mut cuts: Vec<f64> = breakpoints.iter().map(|b| s0 + (b - s0).rem_euclid(2.0 * PI)).collect();
        for a in arcs {
            if a.amplitude == 0.0 {
                continue;
            }
            // ρθ + φ = π/2 + kπ
            let k_lo = ((rho * a.start + a.phase - PI / 2.0) / PI).floor() as i64 - 1;
            let k_hi = ((rho * a.end + a.phase - PI / 2.0) / PI).ceil() as i64 + 1;
            for k in k_lo..=k_hi {
                let t = (PI / 2.0 + k as f64 * PI - a.phase) / rho;
                if t > a.start && t < a.end {
                    cuts.push(t);
                }
            }
        }
        cuts.push(s0);
        let tiny = 1e-12 * arcs.iter().map(|a| a.amplitude.abs()).fold(0.0, f64::max);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
        let n = cuts.len();
        let mut pieces: Vec<(f64, f64, bool)> = (0..n)
            .map(|i| {
                let lo = cuts[i];
                let hi = if i + 1 < n { cuts[i + 1] } else { s0 + 2.0 * PI };
                (lo, hi, self.value(0.5 * (lo + hi)) > tiny)
            })
            .collect();
        // merge neighbours whose common endpoint is itself positive
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (lo, hi, pos) in pieces.drain(..) {
            if !pos {
                continue;
            }
            match merged.last_mut() {
                Some(last) if (last.1 - lo).abs() < 1e-13 && self.value(lo) > tiny => last.1 = hi,
                _ => merged.push((lo, hi)),
            }
        }
        if merged.len() > 1 {
            let first = merged[0];
            let last = merged[merged.len() - 1];
            if (last.1 - (first.0 + 2.0 * PI)).abs() < 1e-13 && self.value(first.0) > tiny {
                merged.pop();
                merged[0] = (last.0 - 2.0 * PI, first.1);
            }
        }
        Ok(merged)
    }
}

fn periodic_interp(thetas: &[f64], values: &[f64], theta: f64) -> f64 {
    let n = thetas.len();
    if n == 1 {
        return values[0];
    }
    let t = thetas[0] + (theta - thetas[0]).rem_euclid(2.0 * PI);
    let i = thetas.partition_point(|&x| x <= t);
    let (a, b, va, vb) = if i == 0 || i == n {
        (thetas[n - 1], thetas[0] + 2.0 * PI, values[n - 1], values[0])
    } else {
        (thetas[i - 1], thetas[i], values[i - 1], values[i])
    };
    let tt = if t < a { t + 2.0 * PI } else { t };
    if b == a {
        return va;
    }
    va + (vb - va) * (tt - a) / (b - a)
}

/// Exact indicator `h(θ) = max_k |b_k| cos(θ + arg b_k)` of an exponential
/// sum, as an upper envelope of sinusoids.
pub fn indicator_exact_expsum(f: &ExponentialSum) -> Indicator {
    let exps: Vec<Complex> = f
        .terms()
        .iter()
        .filter(|t| t.coeffs.iter().any(|c| c.norm() > 0.0))
        .map(|t| t.exponent)
        .collect();
    let winner = |theta: f64| {
        let e = Complex::from_polar(1.0, theta);
        let mut best = 0;
        for (k, b) in exps.iter().enumerate() {
            if (b * e).re > (exps[best] * e).re {
                best = k;
            }
        }
        best
    };
    // Re((b_i - b_j) e^{iθ}) vanishes at θ = ±π/2 - arg(b_i - b_j)
    let mut cands = vec![0.0];
    for i in 0..exps.len() {
        for j in (i + 1)..exps.len() {
            let d = exps[i] - exps[j];
            for s in [0.5 * PI, -0.5 * PI] {
                cands.push((s - d.arg()).rem_euclid(2.0 * PI));
            }
        }
    }
    cands.sort_by(f64::total_cmp);
    cands.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let n = cands.len();
    let owners: Vec<usize> = (0..n)
        .map(|i| {
            let hi = if i + 1 < n { cands[i + 1] } else { 2.0 * PI };
            winner(0.5 * (cands[i] + hi))
        })
        .collect();
    let mut breakpoints: Vec<f64> = (0..n)
        .filter(|&i| owners[i] != owners[(i + n - 1) % n])
        .map(|i| cands[i])
        .collect();
    let arc_for = |start: f64, end: f64, k: usize| IndicatorArc {
        start,
        end,
        amplitude: exps[k].norm(),
        phase: if exps[k].norm() == 0.0 { 0.0 } else { exps[k].arg() },
    };
    if breakpoints.is_empty() {
        return Indicator::Exact {
            rho: 1.0,
            breakpoints,
            arcs: vec![arc_for(0.0, 2.0 * PI, owners[0])],
        };
    }
    breakpoints.sort_by(f64::total_cmp);
    let m = breakpoints.len();
    let arcs = (0..m)
        .map(|j| {
            let start = breakpoints[j];
            let end = if j + 1 < m {
                breakpoints[j + 1]
            } else {
                breakpoints[0] + 2.0 * PI
            };
            arc_for(start, end, winner(0.5 * (start + end)))
        })
        .collect();
    Indicator::Exact {
        rho: 1.0,
        breakpoints,
        arcs,
    }
}

/// Indicator `c π cos(ρ(θ - θ₀ - π)) / sin(πρ)` of a ray product of
/// non-integer order `ρ = 1/power` and canonical genus `⌊ρ⌋`, with
/// `c = scale^{-ρ}` the density of `n(r) ~ c r^ρ`.
pub fn indicator_exact_product(f: &CanonicalProduct) -> Result<Indicator, GrowthError> {
    let rule = f.rule();
    let rho = rule.convergence_exponent();
    if (rho - rho.round()).abs() < 1e-12 {
        return Err(GrowthError::Invalid(format!("order {rho} is an integer")));
    }
    if f.genus() as f64 != rho.floor() {
        return Err(GrowthError::Invalid(format!(
            "genus {} is not the canonical genus of order {rho}",
            f.genus()
        )));
    }
    let c = rule.scale.powf(-rho);
    let theta0 = rule.angle;
    Ok(Indicator::Exact {
        rho,
        breakpoints: vec![theta0],
        arcs: vec![IndicatorArc {
            start: theta0,
            end: theta0 + 2.0 * PI,
            amplitude: c * PI / (PI * rho).sin(),
            phase: -rho * (theta0 + PI),
        }],
    })
}

/// `max_{r ∈ radii} log|f(re^{iθ})| / V(r)` per angle. Zero hits are skipped.
pub fn indicator_empirical<F: EntireFunction + ?Sized>(
    f: &F,
    po: &ProximateOrder,
    thetas: &[f64],
    radii: &[f64],
) -> Result<Indicator, GrowthError> {
    if radii.is_empty() || radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] <= 0.0 {
        return Err(GrowthError::Invalid("radii must be positive and increasing".into()));
    }
    let values = thetas
        .par_iter()
        .map(|&theta| {
            let mut best: Option<f64> = None;
            for &r in radii {
                match f.eval_log(Complex::from_polar(r, theta)) {
                    Ok(e) => {
                        let v = e.log_abs / po.scale(r);
                        best = Some(best.map_or(v, |b: f64| b.max(v)));
                    }
                    Err(ModelError::ZeroHit { .. }) => {}
                    Err(e) => return Err(GrowthError::Model(e)),
                }
            }
            best.ok_or(GrowthError::AllSamplesHitZeros { theta })
        })
        .collect::<Result<Vec<f64>, _>>()?;
    Ok(Indicator::Empirical {
        thetas: thetas.to_vec(),
        values,
        radii: radii.to_vec(),
    })
}

/// Largest `c` with `h(θ) ≥ c·min(θ - a, b - θ)` on a grid of each arc.
pub fn wedge_constants(ind: &Indicator, arcs: &[(f64, f64)]) -> Result<Vec<f64>, GrowthError> {
    arcs.iter()
        .map(|&(a, b)| {
            if b - a <= 0.0 || (b - a).abs() < 1e-12 {
                return Err(GrowthError::DegenerateArc { start: a, end: b });
            }
            let mut c = f64::INFINITY;
            for i in 1..WEDGE_GRID {
                let t = a + (b - a) * i as f64 / WEDGE_GRID as f64;
                let h = ind.value(t);
                if h <= 0.0 {
                    return Err(GrowthError::NonpositiveInterior { theta: t });
                }
                c = c.min(h / (t - a).min(b - t));
            }
            Ok(c)
        })
        .collect()
}

/// Per-arc wedge constants `c_j` over the arcs between breakpoints of an
/// exact indicator.
pub fn indicator_lower_bound_check(ind: &Indicator) -> Result<Vec<f64>, GrowthError> {
    let Indicator::Exact { arcs, .. } = ind else {
        return Err(GrowthError::NotExact);
    };
    let spans: Vec<(f64, f64)> = arcs.iter().map(|a| (a.start, a.end)).collect();
    wedge_constants(ind, &spans)
}

// ---------------------------------------------------------------------------
// growth minorants

#[derive(Clone)]
pub enum MinorantKind {
    /// `β(r) = exp(coeff · r^power)`.
    ExpPower { coeff: f64, power: f64 },
    /// `β(r) = exp(r^{ρ(r)} ε₁(r))`.
    PaperDefault {
        order: ProximateOrder,
        cascade: EpsilonCascade,
    },
    /// `β(r) = factor · r`.
    Linear { factor: f64 },
    /// Piecewise-linear `log β` against `ln r`, extrapolated with the end
    /// slopes.
    Table { log_r: Vec<f64>, log_beta: Vec<f64> },
}

/// A continuous increasing `β` with `β(x) > x` for `x > threshold`.
#[derive(Clone)]
pub struct GrowthMinorant {
    kind: MinorantKind,
    threshold: f64,
}

impl fmt::Debug for GrowthMinorant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GrowthMinorant")
            .field("label", &self.label())
            .field("threshold", &self.threshold)
            .finish()
    }
}

fn cap_exp(exponent: f64) -> f64 {
    if exponent.is_nan() {
        f64::NAN
    } else if exponent > LOG_CAP.ln() {
        f64::INFINITY
    } else {
        exponent.exp()
    }
}

impl GrowthMinorant {
    fn build(kind: MinorantKind) -> Result<Self, GrowthError> {
        let mut m = Self { kind, threshold: 0.0 };
        m.threshold = m.scan_threshold()?;
        Ok(m)
    }

    pub fn exp_power(coeff: f64, power: f64) -> Result<Self, GrowthError> {
        if !(coeff > 0.0 && power > 0.0) {
            return Err(GrowthError::Invalid("exp-power minorant needs coeff, power > 0".into()));
        }
        Self::build(MinorantKind::ExpPower { coeff, power })
    }

    pub fn paper_default(order: ProximateOrder, cascade: EpsilonCascade) -> Result<Self, GrowthError> {
        Self::build(MinorantKind::PaperDefault { order, cascade })
    }

    pub fn linear(factor: f64) -> Result<Self, GrowthError> {
        if factor <= 1.0 {
            return Err(GrowthError::Invalid("linear minorant needs factor > 1".into()));
        }
        Ok(Self {
            kind: MinorantKind::Linear { factor },
            threshold: 0.0,
        })
    }

    /// Table of `(r, β(r))` pairs with increasing `r`.
    pub fn table(points: &[(f64, f64)]) -> Result<Self, GrowthError> {
        if points.len() < 2
            || points.windows(2).any(|w| w[1].0 <= w[0].0 || w[1].1 <= w[0].1)
            || points.iter().any(|p| p.0 <= 0.0 || p.1 <= 0.0)
        {
            return Err(GrowthError::Invalid(
                "table needs ≥ 2 increasing positive points".into(),
            ));
        }
        Self::build(MinorantKind::Table {
            log_r: points.iter().map(|p| p.0.ln()).collect(),
            log_beta: points.iter().map(|p| p.1.ln()).collect(),
        })
    }

    /// Override the threshold `x₀`.
    pub fn with_threshold(mut self, x0: f64) -> Self {
        self.threshold = x0;
        self
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn kind(&self) -> &MinorantKind {
        &self.kind
    }

    pub fn label(&self) -> String {
        match &self.kind {
            MinorantKind::ExpPower { coeff, power } => format!("exp:{coeff},{power}"),
            MinorantKind::PaperDefault { order, cascade } => {
                format!("default:{},N={}", order.label(), cascade.depth)
            }
            MinorantKind::Linear { factor } => format!("linear:{factor}"),
            MinorantKind::Table { log_r, .. } => format!("table:{}", log_r.len()),
        }
    }

    /// Whether `β(r) ≥ exp(r^μ)` for some `μ > 0` and large `r`, which
    /// upgrades escape conclusions to the fast escaping set.
    pub fn is_fast(&self) -> bool {
        match &self.kind {
            MinorantKind::ExpPower { .. } => true,
            MinorantKind::PaperDefault { order, .. } => order.limit() > 0.0,
            _ => false,
        }
    }

    /// `log β(e^{log_r})`, capped at `+∞` beyond [`LOG_CAP`].
    pub fn log_beta_at_log(&self, log_r: f64) -> f64 {
        if log_r == f64::INFINITY {
            return f64::INFINITY;
        }
        match &self.kind {
            MinorantKind::ExpPower { coeff, power } => cap_exp(coeff.ln() + power * log_r),
            MinorantKind::PaperDefault { order, cascade } => {
                cap_exp(order.log_scale_at_log(log_r) + cascade.eps1_at_log(log_r).ln())
            }
            MinorantKind::Linear { factor } => log_r + factor.ln(),
            MinorantKind::Table {
                log_r: xs,
                log_beta: ys,
            } => {
                let n = xs.len();
                let i = xs.partition_point(|&x| x <= log_r).clamp(1, n - 1);
                let slope = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
                let v = ys[i - 1] + slope * (log_r - xs[i - 1]);
                if v > LOG_CAP {
                    f64::INFINITY
                } else {
                    v
                }
            }
        }
    }

    pub fn log_beta(&self, r: f64) -> f64 {
        self.log_beta_at_log(r.ln())
    }

    /// Smallest grid point in `ln r ∈ [-20, 690]` beyond which
    /// `log β(r) > log r` holds on the whole scanned grid.
    fn scan_threshold(&self) -> Result<f64, GrowthError> {
        const LO: f64 = -20.0;
        const HI: f64 = 690.0;
        const STEPS: usize = 71_000;
        let mut last_fail: Option<f64> = None;
        for i in 0..=STEPS {
            let l = LO + (HI - LO) * i as f64 / STEPS as f64;
            if self.log_beta_at_log(l).partial_cmp(&l) != Some(std::cmp::Ordering::Greater) {
                last_fail = Some(l);
            }
        }
        match last_fail {
            None => Ok(0.0),
            Some(l) if l >= HI => Err(GrowthError::Invalid(format!(
                "β({}) never exceeds its argument on the scanned range",
                self.label()
            ))),
            Some(l) => Ok((l + (HI - LO) / STEPS as f64).exp()),
        }
    }
}

/// `log β^n(r₀)`, composing on logs; `+∞` once the log exceeds [`LOG_CAP`].
pub fn beta_iterate(beta: &GrowthMinorant, r0: f64, n: usize) -> Result<f64, GrowthError> {
    if r0 <= beta.threshold() {
        return Err(GrowthError::BelowThreshold {
            r0,
            threshold: beta.threshold(),
        });
    }
    Ok(beta_track(beta, r0.ln(), n).pop().unwrap_or(r0.ln()))
}

/// `[log β^0(r₀), …, log β^n(r₀)]` given `ln r₀`.
pub fn beta_track(beta: &GrowthMinorant, log_r0: f64, n: usize) -> Vec<f64> {
    let mut track = Vec::with_capacity(n + 1);
    let mut l = log_r0;
    track.push(l);
    for _ in 0..n {
        l = beta.log_beta_at_log(l);
        track.push(l);
    }
    track
}

// ---------------------------------------------------------------------------
// density budgets

/// Continuous decreasing `α(r) → 0`, stored as a function of `ln r`.
#[derive(Clone)]
pub struct DensityBudget {
    f: LogFn,
    label: String,
}

impl fmt::Debug for DensityBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityBudget").field("label", &self.label).finish()
    }
}

impl DensityBudget {
    pub fn custom(label: impl Into<String>, of_log_r: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(of_log_r),
            label: label.into(),
        }
    }

    pub fn constant(a: f64) -> Self {
        Self::custom(format!("const:{a}"), move |_| a)
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// `α(r) = 1 / (log r)^p`, capped at 1 for `log r ≤ 1`.
    pub fn inverse_log_power(p: f64) -> Self {
        Self::custom(format!("invlog:{p}"), move |l| if l > 1.0 { l.powf(-p) } else { 1.0 })
    }

    /// `α(r) = factor · ε₃(r/2)`.
    pub fn cascade(factor: f64, cascade: EpsilonCascade) -> Self {
        Self::custom(format!("cascade:{factor},N={}", cascade.depth), move |l| {
            factor * cascade.eps3_at_log(l - std::f64::consts::LN_2)
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value_at_log(&self, log_r: f64) -> f64 {
        (self.f)(log_r)
    }

    pub fn value(&self, r: f64) -> f64 {
        self.value_at_log(r.ln())
    }

    /// Non-increasing on the sampled radii.
    pub fn is_monotone_on(&self, radii: &[f64]) -> bool {
        radii.windows(2).all(|w| self.value(w[1]) <= self.value(w[0]))
    }
}

/// Outcome of the ratio-test certificate for `Σ α(β^n(r₀)) < ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesCheck {
    pub converges: bool,
    pub partial_sum: f64,
    pub terms_used: usize,
}

pub const SERIES_MAX_TERMS: usize = 10_000;

/// Sum `α(β^n(r₀))` until a term falls below `tail_tol` while decaying at
/// ratio ≤ 1/2 against its predecessor.
pub fn series_condition_check(
    alpha: &DensityBudget,
    beta: &GrowthMinorant,
    r0: f64,
    tail_tol: f64,
) -> Result<SeriesCheck, GrowthError> {
    if r0 <= beta.threshold() {
        return Err(GrowthError::BelowThreshold {
            r0,
            threshold: beta.threshold(),
        });
    }
    let mut l = r0.ln();
    let mut sum = 0.0;
    let mut prev: Option<f64> = None;
    for n in 0..SERIES_MAX_TERMS {
        let term = alpha.value_at_log(l);
        sum += term;
        if term < tail_tol && prev.is_some_and(|p| term <= 0.5 * p) {
            return Ok(SeriesCheck {
                converges: true,
                partial_sum: sum,
                terms_used: n + 1,
            });
        }
        prev = Some(term);
        l = beta.log_beta_at_log(l);
    }
    Ok(SeriesCheck {
        converges: false,
        partial_sum: sum,
        terms_used: SERIES_MAX_TERMS,
    })
}

// ---------------------------------------------------------------------------
// scalar diagnostics

/// `log M(r)` as the maximum of `log|f|` over `samples` equally spaced angles.
pub fn log_max_modulus<F: EntireFunction + ?Sized>(f: &F, r: f64, samples: usize) -> Result<f64, ModelError> {
    let mut best = f64::NEG_INFINITY;
    for j in 0..samples {
        let z = Complex::from_polar(r, 2.0 * PI * j as f64 / samples as f64);
        match f.eval_log(z) {
            Ok(e) => best = best.max(e.log_abs),
            Err(ModelError::ZeroHit { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZhengReport {
    pub radii: Vec<f64>,
    pub ratios: Vec<f64>,
    pub min_ratio: f64,
    /// Set when the last ratio is no larger than `1 + 2 log 2 / log r`, i.e.
    /// `log M` grows no faster than a multiple of `log r` and no `d > 1` can
    /// persist.
    pub polynomial_like: bool,
}

/// `min_r log M(2r) / log M(r)` over the supplied radii.
pub fn zheng_ratio<F: EntireFunction + ?Sized>(f: &F, radii: &[f64]) -> Result<ZhengReport, GrowthError> {
    if radii.is_empty() || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(GrowthError::Invalid("radii must be increasing".into()));
    }
    let ratios = radii
        .iter()
        .map(|&r| {
            let lo = log_max_modulus(f, r, MAX_MODULUS_SAMPLES)?;
            let hi = log_max_modulus(f, 2.0 * r, MAX_MODULUS_SAMPLES)?;
            if lo <= 0.0 {
                return Err(GrowthError::Invalid(format!("M({r}) ≤ 1")));
            }
            Ok(hi / lo)
        })
        .collect::<Result<Vec<f64>, GrowthError>>()?;
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let last_r = radii[radii.len() - 1];
    let polynomial_like = ratios[ratios.len() - 1] <= 1.0 + 2.0 * 2f64.ln() / last_r.ln();
    Ok(ZhengReport {
        radii: radii.to_vec(),
        ratios,
        min_ratio,
        polynomial_like,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProxReport {
    /// `max V(2r)/V(r)`.
    pub prox0_max_ratio: f64,
    /// `max |V(s)/V(r) - 1|`.
    pub prox1_max_deviation: f64,
    /// `max |V(s)/V(r) - 1 - ρ(s/r - 1)|`.
    pub prox2_max_residual: f64,
}

/// Regression diagnostics for the doubling and first-order expansion
/// properties of `V(r) = r^{ρ(r)}`.
pub fn prox_order_properties(po: &ProximateOrder, radii: &[f64], s_over_r: &[f64]) -> ProxReport {
    let mut rep = ProxReport {
        prox0_max_ratio: 0.0,
        prox1_max_deviation: 0.0,
        prox2_max_residual: 0.0,
    };
    let rho = po.limit();
    for &r in radii {
        let lv = po.log_scale_at_log(r.ln());
        let ratio2 = (po.log_scale_at_log((2.0 * r).ln()) - lv).exp();
        rep.prox0_max_ratio = rep.prox0_max_ratio.max(ratio2);
        for &q in s_over_r {
            let ratio = (po.log_scale_at_log((q * r).ln()) - lv).exp_m1();
            rep.prox1_max_deviation = rep.prox1_max_deviation.max(ratio.abs());
            rep.prox2_max_residual = rep.prox2_max_residual.max((ratio - rho * (q - 1.0)).abs());
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{CanonicalProduct, ZeroRule};

    #[test]
    fn scale_examples() {
        assert!((scale_v(&ProximateOrder::constant(1.0), 10.0) - 10.0).abs() < 1e-12);
        assert!((scale_v(&ProximateOrder::constant(0.5), 1e4) - 100.0).abs() < 1e-10);
        let po = ProximateOrder::log_corrected(0.5, 1.0);
        let r = 10f64.exp();
        assert!((scale_v(&po, r) - 6f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn cascade_floor_and_ordering() {
        let c = EpsilonCascade::new(1);
        assert_eq!(c.eps1(2.0), 1.0);
        assert!((c.eps1(100.0) - 1.0 / 100f64.ln()).abs() < 1e-15);
        let c2 = EpsilonCascade::new(2);
        assert_eq!(c2.eps1(10.0), 1.0); // below e^e
        assert!(c2.eps1(1e6) < 1.0);
        assert!((c2.floor_log() - std::f64::consts::E).abs() < 1e-15);
        for r in [20.0, 1e3, 1e9] {
            assert!(c.eps1(r) <= c.eps2(r) && c.eps2(r) <= c.eps3(r) && c.eps3(r) <= 1.0);
        }
    }

    #[test]
    fn exact_indicator_of_exp_sin_cosh() {
        let h = indicator_exact_expsum(&ExponentialSum::exp());
        assert!(h.breakpoints().is_empty());
        let Indicator::Exact { arcs, .. } = &h else { panic!() };
        assert_eq!(arcs.len(), 1);
        assert_eq!((arcs[0].amplitude, arcs[0].phase), (1.0, 0.0));

        let h = indicator_exact_expsum(&ExponentialSum::sin());
        let bp = h.breakpoints();
        assert_eq!(bp.len(), 2);
        assert!(bp[0].abs() < 1e-15 && (bp[1] - PI).abs() < 1e-14);
        for t in [0.1, 1.0, 2.5, 4.0, 5.9] {
            assert!((h.value(t) - f64::sin(t).abs()).abs() < 1e-14);
        }

        let h = indicator_exact_expsum(&ExponentialSum::cosh2());
        let bp = h.breakpoints();
        assert!((bp[0] - PI / 2.0).abs() < 1e-14 && (bp[1] - 1.5 * PI).abs() < 1e-14);
        for t in [0.1, 1.0, 2.5, 4.0, 5.9] {
            assert!((h.value(t) - f64::cos(t).abs()).abs() < 1e-14);
        }
    }

    #[test]
    fn empirical_indicator_examples() {
        let po = ProximateOrder::constant(1.0);
        let h = indicator_empirical(&ExponentialSum::exp(), &po, &[0.0], &[10.0, 100.0, 1000.0]).unwrap();
        assert!((h.value(0.0) - 1.0).abs() < 1e-15);

        let h = indicator_empirical(&ExponentialSum::sin(), &po, &[PI / 2.0], &[100.0, 1000.0]).unwrap();
        let oracle = (1000.0 - 2f64.ln() + (-2000f64).exp().ln_1p()) / 1000.0;
        assert!((h.value(PI / 2.0) - oracle).abs() < 1e-12);
        assert!((h.value(PI / 2.0) - 0.99930).abs() < 1e-4);

        let h = indicator_empirical(&ExponentialSum::sin(), &po, &[0.3], &[100.0, 1000.0, 1e4]).unwrap();
        assert!((h.value(0.3) - 0.3f64.sin()).abs() < 1e-3);
    }

    #[test]
    fn empirical_indicator_rejects_bad_ladders() {
        let po = ProximateOrder::constant(1.0);
        assert!(indicator_empirical(&ExponentialSum::exp(), &po, &[0.0], &[10.0, 5.0]).is_err());
        assert!(indicator_empirical(&ExponentialSum::exp(), &po, &[0.0], &[]).is_err());
    }

    #[test]
    fn wedge_constants_oracle() {
        // independent 1-D minimization of sinθ / min(θ, π-θ) on a fine grid
        let oracle = (1..200_000)
            .map(|i| {
                let t = PI * i as f64 / 200_000.0;
                t.sin() / t.min(PI - t)
            })
            .fold(f64::INFINITY, f64::min);
        let h = indicator_exact_expsum(&ExponentialSum::sin());
        let cs = indicator_lower_bound_check(&h).unwrap();
        assert_eq!(cs.len(), 2);
        for c in cs {
            assert!((c - oracle).abs() < 1e-6 && (c - 2.0 / PI).abs() < 1e-6);
        }

        let h = indicator_exact_expsum(&ExponentialSum::exp());
        assert!(matches!(
            indicator_lower_bound_check(&h),
            Err(GrowthError::NonpositiveInterior { .. })
        ));
        let arcs = h.positive_arcs().unwrap();
        assert_eq!(arcs.len(), 1);
        assert!((arcs[0].1 - arcs[0].0 - PI).abs() < 1e-12);
        let c = wedge_constants(&h, &arcs).unwrap();
        assert!((c[0] - 2.0 / PI).abs() < 1e-6);

        assert!(matches!(
            wedge_constants(&h, &[(1.0, 1.0)]),
            Err(GrowthError::DegenerateArc { .. })
        ));
    }

    #[test]
    fn positive_arcs_of_sine() {
        let h = indicator_exact_expsum(&ExponentialSum::sin());
        let arcs = h.positive_arcs().unwrap();
        assert_eq!(arcs.len(), 2);
        assert!((arcs[0].0).abs() < 1e-14 && (arcs[0].1 - PI).abs() < 1e-14);
    }

    #[test]
    fn product_indicator_is_continuous_at_its_breakpoint() {
        let f = CanonicalProduct::new(ZeroRule::power_law(2.0).unwrap(), 0, 1e-3, 10.0).unwrap();
        let h = indicator_exact_product(&f).unwrap();
        assert!((h.value(PI) - PI).abs() < 1e-12);
        assert!((h.value(1e-12) - h.value(2.0 * PI - 1e-12)).abs() < 1e-9);
        assert!((h.value(PI / 2.0) - PI * (PI / 4.0).sin()).abs() < 1e-12);
    }

    #[test]
    fn beta_iterates() {
        let b = GrowthMinorant::exp_power(1.0, 1.0).unwrap();
        assert!((beta_iterate(&b, 1.0, 2).unwrap() - std::f64::consts::E).abs() < 1e-15);
        let tower = std::f64::consts::E.exp().exp();
        assert!((beta_iterate(&b, 1.0, 4).unwrap() - tower).abs() / tower < 1e-12);
        assert!((tower - 3_814_279.1).abs() < 0.1);
        assert_eq!(beta_iterate(&b, 1.0, 6).unwrap(), f64::INFINITY);
        let b = GrowthMinorant::exp_power(1.0, 0.5).unwrap();
        assert!((beta_iterate(&b, 100.0, 1).unwrap() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn beta_threshold_is_enforced() {
        // exp(r/10) > r fails up to the root of r/10 = log r near 35.77
        let b = GrowthMinorant::exp_power(0.1, 1.0).unwrap();
        assert!(b.threshold() > 35.77 && b.threshold() < 36.2, "{}", b.threshold());
        assert!(matches!(
            beta_iterate(&b, 30.0, 1),
            Err(GrowthError::BelowThreshold { .. })
        ));
        let b = GrowthMinorant::paper_default(ProximateOrder::constant(1.0), EpsilonCascade::new(1)).unwrap();
        assert!(b.threshold() <= 1.0);
    }

    #[test]
    fn series_examples() {
        let beta = GrowthMinorant::exp_power(1.0, 1.0).unwrap();
        let s = series_condition_check(&DensityBudget::inverse_log_power(2.0), &beta, 10.0, 1e-10).unwrap();
        assert!(s.converges);
        assert!(s.terms_used <= 4);
        let expected = 1.0 / 10f64.ln().powi(2) + 0.01 + 10f64.exp().powi(-2);
        assert!((s.partial_sum - expected).abs() < 1e-15);

        let s = series_condition_check(
            &DensityBudget::inverse_log_power(1.0),
            &GrowthMinorant::linear(2.0).unwrap(),
            10.0,
            1e-10,
        )
        .unwrap();
        assert!(!s.converges);

        let s = series_condition_check(&DensityBudget::zero(), &beta, 10.0, 1e-10).unwrap();
        assert!(s.converges && s.partial_sum == 0.0);
    }

    #[test]
    fn zheng_examples() {
        let z = zheng_ratio(&ExponentialSum::exp(), &[10.0, 20.0, 40.0]).unwrap();
        assert!((z.min_ratio - 2.0).abs() < 1e-12 && !z.polynomial_like);
        let z = zheng_ratio(&ExponentialSum::sin(), &[50.0, 100.0, 200.0]).unwrap();
        assert!((z.min_ratio - 2.0).abs() < 2e-2);
        let cube = ExponentialSum::polynomial(vec![
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(1.0, 0.0),
        ]);
        let z = zheng_ratio(&cube, &[1e2, 1e3, 1e4]).unwrap();
        assert!((z.ratios[2] - 1.075).abs() < 1e-3);
        assert!(z.polynomial_like);
    }

    #[test]
    fn prox_examples() {
        let rep = prox_order_properties(&ProximateOrder::constant(0.5), &[100.0], &[1.01]);
        let exact = (1.01f64.sqrt() - 1.0 - 0.005).abs();
        assert!((rep.prox2_max_residual - exact).abs() < 1e-15);
        assert!((exact - 1.2e-5).abs() < 1e-6);

        let rep = prox_order_properties(&ProximateOrder::log_corrected(0.5, 1.0), &[1e6], &[1.001]);
        assert!(rep.prox1_max_deviation < 1e-3);

        let rep = prox_order_properties(&ProximateOrder::log_corrected(0.5, 1.0), &[1e3, 1e6], &[1.0]);
        assert_eq!(rep.prox1_max_deviation, 0.0);
        assert_eq!(rep.prox2_max_residual, 0.0);
    }

    #[test]
    fn derivative_bound_matches_finite_differences() {
        let po = ProximateOrder::log_corrected(0.7, 2.0);
        for l in [2.0f64, 5.0, 20.0, 100.0] {
            let h = 1e-6 * l;
            // ρ'(r) r = dρ/d(log r)
            let d = (po.rho_at_log(l + h) - po.rho_at_log(l - h)) / (2.0 * h);
            let measured = (d * l).abs();
            assert!((measured - po.derivative_bound(l.exp())).abs() < 1e-6);
        }
    }

    #[test]
    fn budgets_are_monotone() {
        let radii: Vec<f64> = (1..60).map(|i| 1.5f64.powi(i)).collect();
        assert!(DensityBudget::inverse_log_power(2.0).is_monotone_on(&radii));
        assert!(DensityBudget::cascade(12.0, EpsilonCascade::new(1)).is_monotone_on(&radii));
    }
}
