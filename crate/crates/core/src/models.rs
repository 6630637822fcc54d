//! Concrete entire functions with overflow-safe evaluation.
//!
//! Two families are supported:
//!
//! * [`ExponentialSum`]: `f(z) = Σ p_k(z) exp(b_k z)` with polynomial
//!   coefficients `p_k`.
//! * [`CanonicalProduct`]: `f(z) = Π E(z/a_k, p)` over a rule-generated zero
//!   sequence `a_k = c·k^e·e^{iθ₀}`.
//!
//! Everything is evaluated in log space. Exponential sums use a log-sum-exp
//! shift by the dominant term; products sum `log E` directly up to a cutoff
//! `K` and add the leading terms of the tail expansion
//! `Σ_{k>K} log E(z/a_k, p) = -Σ_{j>p} (z/ω)^j ζ(e·j, K+1) / j`, which leaves a
//! remainder that is bounded in closed form.

use crate::quad::{gauss_legendre, hurwitz_zeta};
use crate::sampling::Window;
use num_complex::Complex64 as Complex;
use std::f64::consts::PI;
use thiserror::Error;

/// `ln(f64::MIN_POSITIVE) + 50`. A zero hit is declared when the value of
/// an exponential sum, with its largest term factored out, or one factor
/// `1 - z/a_k` of a product falls below this on the log scale. The total
/// `log|f|` may be far smaller: `e^z` at `z = -10⁴` is not a zero hit.
pub const ZERO_HIT_LOG: f64 = -658.396_418_532_264_1;

/// Largest `log|f|` whose exponential is still a finite `f64`.
pub const MAX_FINITE_LOG: f64 = 709.782_712_893_384;

/// Relative size of `|f|` against its largest term below which `f'/f` is
/// considered swamped by cancellation.
pub const CANCELLATION_TOL: f64 = 1e-12;

/// Number of tail-expansion orders a canonical product carries beyond its
/// genus.
pub const DEFAULT_TAIL_ORDERS: u32 = 3;

/// Canonical products refuse to sum more factors than this for one point.
pub const MAX_DIRECT_FACTORS: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("log|f| is not representable at z = {z}")]
    OverflowUnrepresentable { z: Complex },
    #[error("z = {z} coincides with a zero of f")]
    ZeroHit { z: Complex },
    #[error("z = {z} is too close to a zero for f'/f to be reliable")]
    NearZero { z: Complex },
    #[error("|f| becomes too small on the contour near {z}")]
    ContourTooClose { z: Complex },
    #[error("contour integral {value} is not close to an integer")]
    NonIntegerResidue { value: Complex },
    #[error("point {z} lies beyond the range the product can evaluate")]
    OutOfRange { z: Complex },
    #[error("invalid model: {0}")]
    Invalid(String),
}

/// `log|f(z)|` together with an argument of `f(z)`.
///
/// The phase is reduced to `(-π, π]`; no branch continuity between nearby
/// points is implied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogEval {
    pub log_abs: f64,
    pub phase: f64,
}

impl LogEval {
    /// `f(z)` as a plain complex number, or `None` when `|f(z)|` overflows.
    pub fn to_complex(&self) -> Option<Complex> {
        (self.log_abs <= MAX_FINITE_LOG).then(|| Complex::from_polar(self.log_abs.exp(), self.phase))
    }
}

/// Reduce an angle to `(-π, π]`.
pub fn wrap_phase(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Interface shared by all function models.
pub trait EntireFunction: Send + Sync {
    fn eval_log(&self, z: Complex) -> Result<LogEval, ModelError>;

    /// `L(z) = f'(z)/f(z)`.
    fn log_derivative(&self, z: Complex) -> Result<Complex, ModelError>;

    /// All zeros in the closed disk `|ζ - center| ≤ radius` with multiplicity,
    /// when the model can enumerate them.
    fn zeros_in_disk(&self, _center: Complex, _radius: f64) -> Option<Vec<Complex>> {
        None
    }

    /// `f(z)` in plain arithmetic.
    fn value(&self, z: Complex) -> Result<Complex, ModelError> {
        self.eval_log(z)?
            .to_complex()
            .ok_or(ModelError::OverflowUnrepresentable { z })
    }
}

// ---------------------------------------------------------------------------
// exponential sums

/// One term `p(z)·exp(b z)`; `coeffs` are in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpTerm {
    pub coeffs: Vec<Complex>,
    pub exponent: Complex,
}

impl ExpTerm {
    pub fn new(coeffs: Vec<Complex>, exponent: Complex) -> Self {
        Self { coeffs, exponent }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex::new(0.0, 0.0))
    }
}

/// `Σ p_k(z) exp(b_k z)` with pairwise distinct exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialSum {
    terms: Vec<ExpTerm>,
}

fn horner(coeffs: &[Complex], z: Complex) -> (Complex, Complex) {
    let mut p = Complex::new(0.0, 0.0);
    let mut dp = Complex::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

struct ShiftedSums {
    shift: f64,
    value: Complex,
    derivative: Complex,
    peak: f64,
}

impl ExponentialSum {
    pub fn new(terms: Vec<ExpTerm>) -> Result<Self, ModelError> {
        if terms.is_empty() {
            return Err(ModelError::Invalid("exponential sum without terms".into()));
        }
        for (i, t) in terms.iter().enumerate() {
            let finite = t.exponent.is_finite() && t.coeffs.iter().all(|c| c.is_finite());
            if !finite || t.coeffs.is_empty() {
                return Err(ModelError::Invalid(format!("term {i} is malformed")));
            }
            if terms[..i].iter().any(|s| s.exponent == t.exponent) {
                return Err(ModelError::Invalid(format!(
                    "duplicate exponent {} in term {i}",
                    t.exponent
                )));
            }
        }
        if terms.iter().all(ExpTerm::is_zero) {
            return Err(ModelError::Invalid("every polynomial coefficient is zero".into()));
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    /// `e^z`.
    pub fn exp() -> Self {
        Self::single(vec![Complex::new(1.0, 0.0)], Complex::new(1.0, 0.0))
    }

    /// `sin z = (-i/2) e^{iz} + (i/2) e^{-iz}`.
    pub fn sin() -> Self {
        Self::new(vec![
            ExpTerm::new(vec![Complex::new(0.0, -0.5)], Complex::new(0.0, 1.0)),
            ExpTerm::new(vec![Complex::new(0.0, 0.5)], Complex::new(0.0, -1.0)),
        ])
        .expect("sin is well formed")
    }

    /// `e^z + e^{-z}`.
    pub fn cosh2() -> Self {
        Self::new(vec![
            ExpTerm::new(vec![Complex::new(1.0, 0.0)], Complex::new(1.0, 0.0)),
            ExpTerm::new(vec![Complex::new(1.0, 0.0)], Complex::new(-1.0, 0.0)),
        ])
        .expect("cosh is well formed")
    }

    /// A polynomial, as the single term with exponent zero.
    pub fn polynomial(coeffs: Vec<Complex>) -> Self {
        Self::single(coeffs, Complex::new(0.0, 0.0))
    }

    fn single(coeffs: Vec<Complex>, exponent: Complex) -> Self {
        Self::new(vec![ExpTerm::new(coeffs, exponent)]).expect("single term is well formed")
    }

    fn shifted_sums(&self, z: Complex) -> Result<ShiftedSums, ModelError> {
        let overflow = || ModelError::OverflowUnrepresentable { z };
        let mut parts = Vec::with_capacity(self.terms.len());
        let mut shift = f64::NEG_INFINITY;
        for t in &self.terms {
            let w = t.exponent * z;
            if !w.is_finite() {
                return Err(overflow());
            }
            let (p, dp) = horner(&t.coeffs, z);
            if !(p.is_finite() && dp.is_finite()) {
                return Err(overflow());
            }
            let mag = p.norm() + dp.norm();
            if mag == 0.0 {
                continue;
            }
            shift = shift.max(w.re + mag.ln());
            parts.push((w, p, dp, t.exponent));
        }
        if parts.is_empty() {
            return Err(ModelError::ZeroHit { z });
        }
        let mut value = Complex::new(0.0, 0.0);
        let mut derivative = Complex::new(0.0, 0.0);
        let mut peak: f64 = 0.0;
        for (w, p, dp, b) in parts {
            let e = Complex::from_polar((w.re - shift).exp(), w.im);
            let term = p * e;
            value += term;
            derivative += (dp + b * p) * e;
            peak = peak.max(term.norm());
        }
        if !(value.is_finite() && derivative.is_finite()) {
            return Err(overflow());
        }
        Ok(ShiftedSums {
            shift,
            value,
            derivative,
            peak,
        })
    }
}

impl EntireFunction for ExponentialSum {
    fn eval_log(&self, z: Complex) -> Result<LogEval, ModelError> {
        let s = self.shifted_sums(z)?;
        let modulus = s.value.norm();
        let log_abs = s.shift + modulus.ln();
        if modulus == 0.0 || modulus.ln() < ZERO_HIT_LOG {
            return Err(ModelError::ZeroHit { z });
        }
        if !log_abs.is_finite() {
            return Err(ModelError::OverflowUnrepresentable { z });
        }
        Ok(LogEval {
            log_abs,
            phase: s.value.arg(),
        })
    }

    fn log_derivative(&self, z: Complex) -> Result<Complex, ModelError> {
        let s = self.shifted_sums(z)?;
        let modulus = s.value.norm();
        if modulus == 0.0 || modulus < CANCELLATION_TOL * s.peak || modulus.ln() < ZERO_HIT_LOG {
            return Err(ModelError::NearZero { z });
        }
        Ok(s.derivative / s.value)
    }

    fn zeros_in_disk(&self, center: Complex, radius: f64) -> Option<Vec<Complex>> {
        let live: Vec<&ExpTerm> = self.terms.iter().filter(|t| !t.is_zero()).collect();
        if live.len() == 1 && live[0].coeffs.iter().skip(1).all(|c| c.norm() == 0.0) {
            // c·e^{bz} never vanishes
            return Some(Vec::new());
        }
        locate_zeros(self, center, radius)
    }
}

// ---------------------------------------------------------------------------
// canonical products

/// Zero sequence `a_k = scale · k^power · e^{i·angle}`, `k ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroRule {
    pub scale: f64,
    pub power: f64,
    pub angle: f64,
}

impl ZeroRule {
    pub fn new(scale: f64, power: f64, angle: f64) -> Result<Self, ModelError> {
        if !(scale > 0.0 && scale.is_finite() && power > 0.0 && power.is_finite() && angle.is_finite()) {
            return Err(ModelError::Invalid(format!(
                "zero rule needs scale > 0, power > 0 (got {scale}, {power})"
            )));
        }
        Ok(Self { scale, power, angle })
    }

    /// `a_k = k^power` on the positive axis.
    pub fn power_law(power: f64) -> Result<Self, ModelError> {
        Self::new(1.0, power, 0.0)
    }

    pub fn modulus(&self, k: u64) -> f64 {
        self.scale * (k as f64).powf(self.power)
    }

    pub fn zero(&self, k: u64) -> Complex {
        Complex::from_polar(self.modulus(k), self.angle)
    }

    /// Exponent of convergence `1/power` of the sequence.
    pub fn convergence_exponent(&self) -> f64 {
        1.0 / self.power
    }

    /// `n(r) = #{k ≥ 1 : |a_k| ≤ r}`, exact.
    pub fn count_within(&self, r: f64) -> u64 {
        if r.is_nan() || r < self.scale {
            return 0;
        }
        if r.is_infinite() {
            return u64::MAX;
        }
        let est = (r / self.scale).powf(1.0 / self.power).floor();
        let mut k = if est >= u64::MAX as f64 {
            u64::MAX - 1
        } else {
            est as u64
        };
        while self.modulus(k + 1) <= r {
            k += 1;
        }
        while k > 0 && self.modulus(k) > r {
            k -= 1;
        }
        k
    }

    /// `scale · e^{i·angle}`, so that `a_k = ω k^power`.
    fn direction(&self) -> Complex {
        Complex::from_polar(self.scale, self.angle)
    }
}

/// Weierstrass product `Π_{k≥1} E(z/a_k, p)` over a [`ZeroRule`].
///
/// The first `cutoff` factors are summed directly and the tail is replaced by
/// its expansion through order `genus + tail_orders`. `tail_bound` is a
/// certified bound on `|log f_true(z) - log f_computed(z)|` for every
/// `|z| ≤ r_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalProduct {
    rule: ZeroRule,
    genus: u32,
    cutoff: u64,
    r_max: f64,
    tail_orders: u32,
    tail_bound: f64,
    derivative_tail_bound: f64,
}

/// Bounds on the remainder after the tail expansion, for `|z| ≤ r`, given
/// `|a_{K+1}| ≥ 2r`.
fn remainder_bounds(rule: &ZeroRule, genus: u32, tail_orders: u32, cutoff: u64, r: f64) -> (f64, f64) {
    let q = (genus + tail_orders + 1) as f64;
    let zeta = hurwitz_zeta(rule.power * q, cutoff as f64 + 1.0);
    let value = 2.0 * (r / rule.scale).powf(q) / q * zeta;
    let derivative = 2.0 * r.powf(q - 1.0) / rule.scale.powf(q) * zeta;
    (value, derivative)
}

impl CanonicalProduct {
    /// Pick the smallest cutoff whose certified tail bound is at most
    /// `tolerance` on `|z| ≤ r_max`.
    pub fn new(rule: ZeroRule, genus: u32, tolerance: f64, r_max: f64) -> Result<Self, ModelError> {
        if !(tolerance > 0.0 && r_max > 0.0 && r_max.is_finite()) {
            return Err(ModelError::Invalid("tolerance and r_max must be positive".into()));
        }
        Self::check_genus(&rule, genus)?;
        let tail_orders = DEFAULT_TAIL_ORDERS;
        let bound_at = |k: u64| remainder_bounds(&rule, genus, tail_orders, k, r_max).0;
        let mut lo = rule.count_within(2.0 * r_max);
        if bound_at(lo) > tolerance {
            let mut hi = lo.max(1);
            while bound_at(hi) > tolerance {
                if hi > MAX_DIRECT_FACTORS {
                    return Err(ModelError::Invalid(format!(
                        "tolerance {tolerance} needs more than {MAX_DIRECT_FACTORS} factors"
                    )));
                }
                lo = hi;
                hi *= 2;
            }
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if bound_at(mid) > tolerance {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo = hi;
        }
        Self::with_cutoff(rule, genus, lo, r_max)
    }

    /// A product with an explicit cutoff; requires `|a_{K+1}| ≥ 2 r_max`.
    pub fn with_cutoff(rule: ZeroRule, genus: u32, cutoff: u64, r_max: f64) -> Result<Self, ModelError> {
        Self::check_genus(&rule, genus)?;
        if rule.modulus(cutoff + 1) < 2.0 * r_max {
            return Err(ModelError::Invalid(format!(
                "cutoff {cutoff} leaves zeros inside 2·r_max = {}",
                2.0 * r_max
            )));
        }
        if cutoff > MAX_DIRECT_FACTORS {
            return Err(ModelError::Invalid(format!("cutoff {cutoff} is too large")));
        }
        let tail_orders = DEFAULT_TAIL_ORDERS;
        let (tail_bound, derivative_tail_bound) = remainder_bounds(&rule, genus, tail_orders, cutoff, r_max);
        Ok(Self {
            rule,
            genus,
            cutoff,
            r_max,
            tail_orders,
            tail_bound,
            derivative_tail_bound,
        })
    }

    fn check_genus(rule: &ZeroRule, genus: u32) -> Result<(), ModelError> {
        if rule.power * (genus as f64 + 1.0) <= 1.0 {
            return Err(ModelError::Invalid(format!(
                "genus {genus} is too small for convergence exponent {}",
                rule.convergence_exponent()
            )));
        }
        Ok(())
    }

    pub fn rule(&self) -> &ZeroRule {
        &self.rule
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn derivative_tail_bound(&self) -> f64 {
        self.derivative_tail_bound
    }

    /// Counting function `n(r, 0)`.
    pub fn counting_function(&self, r: f64) -> u64 {
        self.rule.count_within(r)
    }

    /// Cutoff used at `z`: the stored one, extended when `|z|` exceeds
    /// `r_max` so that the tail expansion still converges.
    fn cutoff_at(&self, z: Complex) -> Result<u64, ModelError> {
        let m = z.norm();
        if m <= self.r_max {
            return Ok(self.cutoff);
        }
        let k = self.rule.count_within(2.0 * m);
        if k > MAX_DIRECT_FACTORS {
            return Err(ModelError::OutOfRange { z });
        }
        Ok(k.max(self.cutoff))
    }

    /// `Σ_{k>K} log E(z/a_k, p)` truncated after `tail_orders` orders.
    fn tail_log(&self, z: Complex, cutoff: u64) -> Complex {
        let x = z / self.rule.direction();
        let mut acc = Complex::new(0.0, 0.0);
        let mut pw = x.powu(self.genus + 1);
        for j in (self.genus + 1)..=(self.genus + self.tail_orders) {
            let zeta = hurwitz_zeta(self.rule.power * j as f64, cutoff as f64 + 1.0);
            acc -= pw * (zeta / j as f64);
            pw *= x;
        }
        acc
    }

    fn tail_log_derivative(&self, z: Complex, cutoff: u64) -> Complex {
        let omega = self.rule.direction();
        let x = z / omega;
        let mut acc = Complex::new(0.0, 0.0);
        let mut pw = x.powu(self.genus);
        for j in (self.genus + 1)..=(self.genus + self.tail_orders) {
            let zeta = hurwitz_zeta(self.rule.power * j as f64, cutoff as f64 + 1.0);
            acc -= pw * zeta / omega;
            pw *= x;
        }
        acc
    }
}

/// `log E(u, p) = log(1-u) + u + u²/2 + … + u^p/p`.
pub fn log_primary_factor(u: Complex, p: u32) -> Complex {
    if u.norm() < 0.5 {
        let mut term = u.powu(p + 1);
        let mut sum = Complex::new(0.0, 0.0);
        let mut j = p + 1;
        loop {
            let add = term / j as f64;
            sum -= add;
            if add.norm() <= 1e-17 * sum.norm() || j > p + 200 {
                break;
            }
            term *= u;
            j += 1;
        }
        sum
    } else {
        let mut s = (Complex::new(1.0, 0.0) - u).ln();
        let mut pw = Complex::new(1.0, 0.0);
        for j in 1..=p {
            pw *= u;
            s += pw / j as f64;
        }
        s
    }
}

impl EntireFunction for CanonicalProduct {
    fn eval_log(&self, z: Complex) -> Result<LogEval, ModelError> {
        if !z.is_finite() {
            return Err(ModelError::OverflowUnrepresentable { z });
        }
        let cutoff = self.cutoff_at(z)?;
        let mut re = 0.0;
        let mut im = 0.0;
        let floor = ZERO_HIT_LOG.exp();
        for k in 1..=cutoff {
            let u = z / self.rule.zero(k);
            if (1.0 - u).norm() < floor {
                return Err(ModelError::ZeroHit { z });
            }
            let l = log_primary_factor(u, self.genus);
            re += l.re;
            im += l.im;
        }
        let tail = self.tail_log(z, cutoff);
        let log_abs = re + tail.re;
        if log_abs.is_nan() {
            return Err(ModelError::ZeroHit { z });
        }
        if !log_abs.is_finite() {
            return Err(ModelError::OverflowUnrepresentable { z });
        }
        Ok(LogEval {
            log_abs,
            phase: wrap_phase(im + tail.im),
        })
    }

    fn log_derivative(&self, z: Complex) -> Result<Complex, ModelError> {
        if !z.is_finite() {
            return Err(ModelError::OverflowUnrepresentable { z });
        }
        let cutoff = self.cutoff_at(z)?;
        let mut acc = Complex::new(0.0, 0.0);
        for k in 1..=cutoff {
            let a = self.rule.zero(k);
            let gap = a - z;
            if gap.norm() < 1e-12 * a.norm().max(1.0) {
                return Err(ModelError::NearZero { z });
            }
            acc -= (z / a).powu(self.genus) / gap;
        }
        Ok(acc + self.tail_log_derivative(z, cutoff))
    }

    fn zeros_in_disk(&self, center: Complex, radius: f64) -> Option<Vec<Complex>> {
        let n = self.rule.count_within(center.norm() + radius);
        if n > MAX_DIRECT_FACTORS {
            return None;
        }
        Some(
            (1..=n)
                .map(|k| self.rule.zero(k))
                .filter(|a| (a - center).norm() <= radius)
                .collect(),
        )
    }
}

// ---------------------------------------------------------------------------
// the closed model type

/// A function model accepted by every operation in the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    ExpSum(ExponentialSum),
    Product(CanonicalProduct),
}

impl EntireFunction for Model {
    fn eval_log(&self, z: Complex) -> Result<LogEval, ModelError> {
        match self {
            Model::ExpSum(f) => f.eval_log(z),
            Model::Product(f) => f.eval_log(z),
        }
    }

    fn log_derivative(&self, z: Complex) -> Result<Complex, ModelError> {
        match self {
            Model::ExpSum(f) => f.log_derivative(z),
            Model::Product(f) => f.log_derivative(z),
        }
    }

    fn zeros_in_disk(&self, center: Complex, radius: f64) -> Option<Vec<Complex>> {
        match self {
            Model::ExpSum(f) => f.zeros_in_disk(center, radius),
            Model::Product(f) => f.zeros_in_disk(center, radius),
        }
    }
}

impl From<ExponentialSum> for Model {
    fn from(f: ExponentialSum) -> Self {
        Model::ExpSum(f)
    }
}

impl From<CanonicalProduct> for Model {
    fn from(f: CanonicalProduct) -> Self {
        Model::Product(f)
    }
}

// ---------------------------------------------------------------------------
// argument principle

fn round_count(value: Complex) -> Result<u64, ModelError> {
    let n = value.re.round();
    if (value.re - n).abs() > 0.1 || value.im.abs() > 0.1 || n < 0.0 {
        return Err(ModelError::NonIntegerResidue { value });
    }
    Ok(n as u64)
}

fn contour_l<F: EntireFunction + ?Sized>(f: &F, z: Complex) -> Result<Complex, ModelError> {
    f.log_derivative(z).map_err(|e| match e {
        ModelError::NearZero { z } | ModelError::ZeroHit { z } => ModelError::ContourTooClose { z },
        other => other,
    })
}

/// Number of zeros (with multiplicity) inside the rectangle, from
/// `(1/2πi) ∮ f'/f dz` with composite 8-point Gauss–Legendre panels.
pub fn count_zeros_argument_principle<F: EntireFunction + ?Sized>(
    f: &F,
    rect: &Window,
    nodes_per_side: usize,
) -> Result<u64, ModelError> {
    let (gx, gw) = gauss_legendre(8);
    let panels = nodes_per_side.div_ceil(8).max(1);
    let corners = [
        Complex::new(rect.x0, rect.y0),
        Complex::new(rect.x1, rect.y0),
        Complex::new(rect.x1, rect.y1),
        Complex::new(rect.x0, rect.y1),
    ];
    for &z in &corners {
        if let Err(ModelError::ZeroHit { z }) = f.eval_log(z) {
            return Err(ModelError::ContourTooClose { z });
        }
    }
    let mut integral = Complex::new(0.0, 0.0);
    // largest |f'/f|·(panel length) seen, and where
    let mut steepest = (0.0, corners[0]);
    for s in 0..4 {
        let a = corners[s];
        let b = corners[(s + 1) % 4];
        let step = (b - a) / panels as f64;
        for p in 0..panels {
            let mid = a + step * (p as f64 + 0.5);
            for (x, w) in gx.iter().zip(&gw) {
                let z = mid + step * (0.5 * x);
                let l = contour_l(f, z)?;
                if l.norm() * step.norm() > steepest.0 {
                    steepest = (l.norm() * step.norm(), z);
                }
                integral += l * step * (0.5 * w);
            }
        }
    }
    round_count(integral / Complex::new(0.0, 2.0 * PI)).map_err(|e| {
        // a zero within a fraction of a panel of the contour spoils the rule
        if steepest.0 > 2.0 * PI {
            ModelError::ContourTooClose { z: steepest.1 }
        } else {
            e
        }
    })
}

/// Number of zeros inside `|ζ - center| < radius` by the periodic trapezoidal
/// rule on the circle.
pub fn count_zeros_in_disk<F: EntireFunction + ?Sized>(
    f: &F,
    center: Complex,
    radius: f64,
    nodes: usize,
) -> Result<u64, ModelError> {
    let mut acc = Complex::new(0.0, 0.0);
    for j in 0..nodes {
        let offset = Complex::from_polar(radius, 2.0 * PI * j as f64 / nodes as f64);
        acc += contour_l(f, center + offset)? * offset;
    }
    round_count(acc / nodes as f64)
}

/// Zeros of `f` in the closed disk, found by recursive subdivision with
/// argument-principle counts and Newton polishing. `None` when the recursion
/// cannot certify a count.
pub fn locate_zeros<F: EntireFunction + ?Sized>(f: &F, center: Complex, radius: f64) -> Option<Vec<Complex>> {
    let half = radius * 1.0137 + 1e-9;
    let rect = Window::new(center.re - half, center.re + half, center.im - half, center.im + half)?;
    let mut found = Vec::new();
    subdivide(f, rect, 0, half, &mut found)?;
    // overlapping retries can report a zero twice
    let tol = 1e-8 * radius.max(1.0);
    let mut unique: Vec<Complex> = Vec::new();
    for z in found {
        if !unique.iter().any(|u| (u - z).norm() < tol) {
            unique.push(z);
        }
    }
    Some(unique.into_iter().filter(|z| (z - center).norm() <= radius).collect())
}

fn robust_count<F: EntireFunction + ?Sized>(f: &F, rect: &Window) -> Option<(u64, Window)> {
    let size = (rect.x1 - rect.x0).max(rect.y1 - rect.y0);
    for attempt in 0..4 {
        let grow = size * 1e-3 * attempt as f64 * 1.37;
        let r = Window::new(rect.x0 - grow, rect.x1 + grow, rect.y0 - grow, rect.y1 + grow)?;
        let a = count_zeros_argument_principle(f, &r, 256);
        let b = count_zeros_argument_principle(f, &r, 512);
        if let (Ok(a), Ok(b)) = (a, b) {
            if a == b {
                return Some((a, r));
            }
        }
    }
    None
}

fn newton<F: EntireFunction + ?Sized>(f: &F, start: Complex, rect: &Window) -> Option<Complex> {
    let mut z = start;
    let size = (rect.x1 - rect.x0).max(rect.y1 - rect.y0);
    for _ in 0..60 {
        let l = match f.log_derivative(z) {
            Ok(l) => l,
            Err(ModelError::NearZero { .. }) | Err(ModelError::ZeroHit { .. }) => return Some(z),
            Err(_) => return None,
        };
        let step = Complex::new(1.0, 0.0) / l;
        z -= step;
        let inside =
            z.re >= rect.x0 - size && z.re <= rect.x1 + size && z.im >= rect.y0 - size && z.im <= rect.y1 + size;
        if !inside {
            return None;
        }
        if step.norm() <= 1e-14 * z.norm().max(1.0) {
            return Some(z);
        }
    }
    None
}

fn subdivide<F: EntireFunction + ?Sized>(
    f: &F,
    rect: Window,
    depth: u32,
    scale: f64,
    out: &mut Vec<Complex>,
) -> Option<()> {
    let (n, rect) = robust_count(f, &rect)?;
    if n == 0 {
        return Some(());
    }
    let size = (rect.x1 - rect.x0).max(rect.y1 - rect.y0);
    let center = Complex::new(0.5 * (rect.x0 + rect.x1), 0.5 * (rect.y0 + rect.y1));
    if n == 1 {
        if let Some(z) = newton(f, center, &rect) {
            if z.re >= rect.x0 && z.re <= rect.x1 && z.im >= rect.y0 && z.im <= rect.y1 {
                out.push(z);
                return Some(());
            }
        }
    }
    if size < 1e-9 * scale || depth > 40 {
        out.extend(std::iter::repeat_n(center, n as usize));
        return Some(());
    }
    let xm = rect.x0 + 0.507_31 * (rect.x1 - rect.x0);
    let ym = rect.y0 + 0.493_17 * (rect.y1 - rect.y0);
    for (x0, x1, y0, y1) in [
        (rect.x0, xm, rect.y0, ym),
        (xm, rect.x1, rect.y0, ym),
        (rect.x0, xm, ym, rect.y1),
        (xm, rect.x1, ym, rect.y1),
    ] {
        subdivide(f, Window::new(x0, x1, y0, y1)?, depth + 1, scale, out)?;
    }
    Some(())
}
