//! Analytic identities: Schwarz reconstruction of `f'/f`, the sector
//! asymptotic `Re(zL) ≈ ρ h(θ) V(r)`, an upper bound for `|g'/g|`, the kernel
//! integral of ray products and a checker for their asymptotics.

use crate::growth::{log_max_modulus, EpsilonCascade, Indicator, ProximateOrder, MAX_MODULUS_SAMPLES};
use crate::models::{count_zeros_in_disk, locate_zeros, CanonicalProduct, EntireFunction, ModelError};
use crate::quad::integrate_adaptive;
use num_complex::Complex64 as Complex;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("disk |ζ - {center}| ≤ {radius} contains a zero")]
    ZeroInDisk { center: Complex, radius: f64 },
    #[error("reconstruction at {nodes} nodes moved by {change:e} relative to half as many")]
    NonConvergent { nodes: usize, change: f64 },
    #[error("θ = {theta} is {distance} from a breakpoint at r = {r}; the sector rule needs {required}")]
    SectorViolation {
        r: f64,
        theta: f64,
        distance: f64,
        required: f64,
    },
    #[error("zeros of the model in |ζ| ≤ {radius} could not be enumerated")]
    IncompleteZeroList { radius: f64 },
    #[error("arg z must lie in (0, 2π); got z = {z}")]
    BranchViolation { z: Complex },
    #[error("order {order} is not strictly between {p} and {p} + 1")]
    NotInRegime { order: f64, p: u32 },
    #[error("θ = {theta} lies outside the admissible band at r = {r}")]
    BandViolation { r: f64, theta: f64 },
    #[error("counting deviation {deviation} exceeds {allowed} at r = {r}")]
    HypothesisFailure { r: f64, deviation: f64, allowed: f64 },
    #[error("quadrature did not converge (error estimate {error:e})")]
    Quadrature { error: f64 },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Relative change tolerated between the `M`- and `M/2`-node reconstructions.
pub const SCHWARZ_REL_TOL: f64 = 1e-6;

/// `f'(z)/f(z)` from `(1/πt) ∫ log|f(z + t e^{iφ})| e^{-iφ} dφ` by the
/// `nodes`-point trapezoidal rule.
///
/// The disk is first certified zero-free by an argument-principle count on
/// the same circle. Convergence is judged by comparing with the rule on every
/// other node.
pub fn schwarz_log_derivative<F: EntireFunction + ?Sized>(
    f: &F,
    z: Complex,
    radius: f64,
    nodes: usize,
) -> Result<Complex, AnalyticError> {
    if nodes < 16 || !nodes.is_power_of_two() {
        return Err(AnalyticError::Invalid(format!(
            "node count {nodes} must be a power of two ≥ 16"
        )));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(AnalyticError::Invalid(format!("radius {radius} must be positive")));
    }
    let zero_in_disk = AnalyticError::ZeroInDisk { center: z, radius };
    match count_zeros_in_disk(f, z, radius, (4 * nodes).max(256)) {
        Ok(0) => {}
        Ok(_) | Err(ModelError::ContourTooClose { .. }) | Err(ModelError::NonIntegerResidue { .. }) => {
            return Err(zero_in_disk)
        }
        Err(e) => return Err(e.into()),
    }
    let mut full = Complex::new(0.0, 0.0);
    let mut half = Complex::new(0.0, 0.0);
    let mut peak: f64 = 0.0;
    for j in 0..nodes {
        let phi = 2.0 * PI * j as f64 / nodes as f64;
        let rot = Complex::from_polar(1.0, phi);
        let v = match f.eval_log(z + rot * radius) {
            Ok(e) => e.log_abs,
            Err(ModelError::ZeroHit { .. }) => return Err(zero_in_disk),
            Err(e) => return Err(e.into()),
        };
        peak = peak.max(v.abs());
        let term = rot.conj() * v;
        full += term;
        if j % 2 == 0 {
            half += term;
        }
    }
    let full = full * (2.0 / (radius * nodes as f64));
    let half = half * (4.0 / (radius * nodes as f64));
    // roundoff in the sum scales with the integrand, not with the result
    let scale = full.norm().max(1e-3 * peak / radius);
    let change = (full - half).norm() / scale.max(f64::MIN_POSITIVE);
    if change > SCHWARZ_REL_TOL {
        return Err(AnalyticError::NonConvergent { nodes, change });
    }
    Ok(full)
}

/// One sample of the sector check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorResidual {
    pub r: f64,
    pub theta: f64,
    pub re_zl: f64,
    pub predicted: f64,
    pub eps2: f64,
    /// `(Re(zL) - ρ h(θ) V(r)) / (V(r) ε₂(r))`.
    pub residual: f64,
}

/// `Re(z f'(z)/f(z))`.
pub fn re_z_log_derivative<F: EntireFunction + ?Sized>(f: &F, z: Complex) -> Result<f64, ModelError> {
    Ok((z * f.log_derivative(z)?).re)
}

/// Compares `Re(zL)` against `ρ h(θ) V(r)` in units of `V(r) ε₂(r)`.
///
/// Every sample must sit at least `margin · ε₂(r)` away from each breakpoint
/// of the indicator; the sector rule uses `margin = 3`.
pub fn check_8l<F: EntireFunction + ?Sized>(
    f: &F,
    ind: &Indicator,
    po: &ProximateOrder,
    cascade: EpsilonCascade,
    margin: f64,
    samples: &[(f64, f64)],
) -> Result<Vec<SectorResidual>, AnalyticError> {
    let rho = po.limit();
    samples
        .iter()
        .map(|&(r, theta)| {
            let eps2 = cascade.eps2(r);
            let distance = ind.distance_to_breakpoints(theta);
            if distance < margin * eps2 {
                return Err(AnalyticError::SectorViolation {
                    r,
                    theta,
                    distance,
                    required: margin * eps2,
                });
            }
            let v = po.scale(r);
            let re_zl = re_z_log_derivative(f, Complex::from_polar(r, theta))?;
            let predicted = rho * ind.value(theta) * v;
            Ok(SectorResidual {
                r,
                theta,
                re_zl,
                predicted,
                eps2,
                residual: (re_zl - predicted) / (v * eps2),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogDerivativeBound {
    pub bound: f64,
    /// `log⁺ M(s, g)`, standing in for the characteristic `T(s, g)`.
    pub log_plus_max_modulus: f64,
    pub zeros_used: usize,
}

/// `4s/(s - |z|)² · log⁺M(s, g) + Σ_{|z_j| ≤ s} 2/|z - z_j|`.
pub fn log_derivative_upper_bound<F: EntireFunction + ?Sized>(
    g: &F,
    z: Complex,
    s: f64,
) -> Result<LogDerivativeBound, AnalyticError> {
    if !(s > z.norm()) {
        return Err(AnalyticError::Invalid(format!(
            "need s > |z|, got s = {s}, |z| = {}",
            z.norm()
        )));
    }
    let origin = Complex::new(0.0, 0.0);
    let zeros = g
        .zeros_in_disk(origin, s)
        .or_else(|| locate_zeros(g, origin, s))
        .ok_or(AnalyticError::IncompleteZeroList { radius: s })?;
    let log_m = log_max_modulus(g, s, MAX_MODULUS_SAMPLES)?.max(0.0);
    let mut bound = 4.0 * s / (s - z.norm()).powi(2) * log_m;
    for zj in &zeros {
        let d = (z - zj).norm();
        if d == 0.0 {
            return Err(ModelError::NearZero { z }.into());
        }
        bound += 2.0 / d;
    }
    Ok(LogDerivativeBound {
        bound,
        log_plus_max_modulus: log_m,
        zeros_used: zeros.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelIntegral {
    pub quadrature: Complex,
    pub closed_form: Complex,
}

impl KernelIntegral {
    pub fn relative_gap(&self) -> f64 {
        (self.quadrature - self.closed_form).norm() / self.closed_form.norm()
    }
}

const KERNEL_CUT: f64 = 5.0;
const KERNEL_TOL: f64 = 1e-9;

/// `∫₀^∞ t^{order} dt / (t^{p+1} (t - z))` by quadrature, next to its closed
/// form `-π e^{-iπa} / sin(πa) · z^{a-1}` with `a = order - p` and
/// `arg z ∈ (0, 2π)`.
///
/// After `t = |z| e^u` the integrand is `|z|^{a-1} e^{au} / (e^u - w)` with
/// `w = z/|z|`; `[-5, 0]` and `[0, 5]` are integrated adaptively and both
/// tails are summed as geometric series.
pub fn kernel_integral(order: f64, p: u32, z: Complex) -> Result<KernelIntegral, AnalyticError> {
    let a = order - p as f64;
    if !(a > 0.0 && a < 1.0) {
        return Err(AnalyticError::NotInRegime { order, p });
    }
    let modulus = z.norm();
    if !(modulus > 0.0 && modulus.is_finite()) || (z.im == 0.0 && z.re > 0.0) {
        return Err(AnalyticError::BranchViolation { z });
    }
    let theta = z.im.atan2(z.re).rem_euclid(2.0 * PI);
    let w = Complex::from_polar(1.0, theta);
    let one = Complex::new(1.0, 0.0);
    let integrand = |u: f64| Complex::new((a * u).exp(), 0.0) / (Complex::new(u.exp(), 0.0) - w);
    let quad = |lo: f64, hi: f64| {
        integrate_adaptive(integrand, lo, hi, KERNEL_TOL).map_err(|e| AnalyticError::Quadrature { error: e.error })
    };
    let mut body = quad(-KERNEL_CUT, 0.0)? + quad(0.0, KERNEL_CUT)?;
    // u < -U: e^{au}/(e^u - w) = -Σ_k e^{(a+k)u} / w^{k+1}
    // u > U:  e^{au}/(e^u - w) =  Σ_k w^k e^{(a-1-k)u}
    let winv = one / w;
    let mut wk = one;
    let mut winvk = winv;
    for k in 0..40 {
        let kf = k as f64;
        body -= winvk * ((-(a + kf) * KERNEL_CUT).exp() / (a + kf));
        body += wk * ((-(1.0 + kf - a) * KERNEL_CUT).exp() / (1.0 + kf - a));
        wk *= w;
        winvk *= winv;
    }
    let quadrature = body * modulus.powf(a - 1.0);
    let power = Complex::from_polar(modulus.powf(a - 1.0), (a - 1.0) * theta);
    let closed_form = -Complex::from_polar(PI / (PI * a).sin(), -PI * a) * power;
    Ok(KernelIntegral {
        quadrature,
        closed_form,
    })
}

/// One sample of the ray-product asymptotic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrgComparison {
    pub r: f64,
    /// Angle measured from the ray carrying the zeros.
    pub theta: f64,
    pub measured: f64,
    pub predicted: f64,
    /// `(measured - predicted) / V(r)`.
    pub residual: f64,
    /// `(measured - predicted) / (ε(r)^{1/4} V(r))`.
    pub normalized_residual: f64,
}

/// Compares `log|f(re^{i(θ₀+θ)})|` for a ray product against
/// `cπ cos((θ - π)ρ(r)) / sin(πρ(r)) · V(r)`.
///
/// `ε(r)` is `ε₁` of `cascade`. Samples need `√ε ≤ θ ≤ 2π - √ε`, and the
/// counting function must satisfy `|n(r) - c V(r)| ≤ hypothesis_constant ·
/// ε(r) V(r)` at every sampled radius.
pub fn verify_crg_theorem15(
    product: &CanonicalProduct,
    c: f64,
    po: &ProximateOrder,
    cascade: EpsilonCascade,
    hypothesis_constant: f64,
    samples: &[(f64, f64)],
) -> Result<Vec<CrgComparison>, AnalyticError> {
    let theta0 = product.rule().angle;
    samples
        .iter()
        .map(|&(r, theta)| {
            let eps = cascade.eps1(r);
            if theta < eps.sqrt() || theta > 2.0 * PI - eps.sqrt() {
                return Err(AnalyticError::BandViolation { r, theta });
            }
            let rho = po.rho(r);
            let v = po.scale(r);
            let deviation = (product.counting_function(r) as f64 - c * v).abs();
            let allowed = hypothesis_constant * eps * v;
            if deviation > allowed {
                return Err(AnalyticError::HypothesisFailure { r, deviation, allowed });
            }
            let predicted = c * PI * ((theta - PI) * rho).cos() / (PI * rho).sin() * v;
            let measured = product.eval_log(Complex::from_polar(r, theta0 + theta))?.log_abs;
            let residual = (measured - predicted) / v;
            Ok(CrgComparison {
                r,
                theta,
                measured,
                predicted,
                residual,
                normalized_residual: residual / eps.powf(0.25),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::indicator_exact_expsum;
    use crate::models::{ExponentialSum, ZeroRule};

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn schwarz_examples() {
        let l = schwarz_log_derivative(&ExponentialSum::exp(), c(5.0, 2.0), 1.0, 256).unwrap();
        assert!((l - c(1.0, 0.0)).norm() < 1e-12, "{l}");

        let l = schwarz_log_derivative(&ExponentialSum::sin(), c(0.0, 20.0), 1.0, 256).unwrap();
        let oracle = c(0.0, -1.0 / 20f64.tanh());
        assert!((l - oracle).norm() < 1e-9, "{l}");

        let two = ExponentialSum::polynomial(vec![c(2.0, 0.0)]);
        let l = schwarz_log_derivative(&two, c(0.3, -0.2), 1.0, 64).unwrap();
        assert!(l.norm() < 1e-14);
    }

    #[test]
    fn schwarz_rejects_disks_with_zeros() {
        let err = schwarz_log_derivative(&ExponentialSum::sin(), c(3.0, 0.0), 1.0, 256).unwrap_err();
        assert!(matches!(err, AnalyticError::ZeroInDisk { .. }), "{err:?}");
        assert!(schwarz_log_derivative(&ExponentialSum::exp(), c(0.0, 0.0), 1.0, 100).is_err());
    }

    #[test]
    fn schwarz_flags_slow_convergence() {
        // zero at distance 1.02 from a radius-1 circle: ratio^16 is far from small
        let err = schwarz_log_derivative(&ExponentialSum::sin(), c(PI / 2.0 + 0.55, 0.0), 1.0, 16);
        assert!(matches!(err, Err(AnalyticError::NonConvergent { .. })), "{err:?}");
    }

    #[test]
    fn sector_check_examples() {
        let po = ProximateOrder::constant(1.0);
        let cascade = EpsilonCascade::new(1);
        let sin = ExponentialSum::sin();
        let ind = indicator_exact_expsum(&sin);
        // r coth r - r underflows to zero at r = 30
        let res = check_8l(&sin, &ind, &po, cascade, 0.5, &[(30.0, PI / 2.0)]).unwrap();
        assert!((res[0].re_zl - 30.0 / 30f64.tanh()).abs() < 1e-12);
        assert!(res[0].residual.abs() < 1e-12);

        let exp = ExponentialSum::exp();
        let res = check_8l(&exp, &indicator_exact_expsum(&exp), &po, cascade, 3.0, &[(100.0, 0.0)]).unwrap();
        assert_eq!(res[0].residual, 0.0);

        let cosh = ExponentialSum::cosh2();
        let ind = indicator_exact_expsum(&cosh);
        let z = Complex::from_polar(50.0, PI / 4.0);
        let oracle = (z * z.tanh()).re;
        let res = check_8l(&cosh, &ind, &po, cascade, 0.5, &[(50.0, PI / 4.0)]).unwrap();
        assert!((res[0].re_zl - oracle).abs() < 1e-9);
        assert!(res[0].residual.abs() <= 1.0);
    }

    #[test]
    fn sector_rule_is_enforced() {
        let sin = ExponentialSum::sin();
        let ind = indicator_exact_expsum(&sin);
        let err = check_8l(
            &sin,
            &ind,
            &ProximateOrder::constant(1.0),
            EpsilonCascade::new(1),
            3.0,
            &[(1e4, 0.1)],
        )
        .unwrap_err();
        assert!(matches!(err, AnalyticError::SectorViolation { .. }));
    }

    #[test]
    fn sector_residuals_stay_bounded_and_shrink() {
        let sin = ExponentialSum::sin();
        let ind = indicator_exact_expsum(&sin);
        let po = ProximateOrder::constant(1.0);
        let cascade = EpsilonCascade::new(1);
        let mut prev = f64::INFINITY;
        for r in [1e2, 1e3, 1e4] {
            let thetas: Vec<(f64, f64)> = (0..40)
                .map(|i| {
                    let edge = 3.0 * cascade.eps2(r) * (1.0 + 1e-9);
                    (r, edge + (PI - 2.0 * edge) * i as f64 / 39.0)
                })
                .collect();
            let worst = check_8l(&sin, &ind, &po, cascade, 3.0, &thetas)
                .unwrap()
                .iter()
                .map(|s| s.residual.abs())
                .fold(0.0, f64::max);
            // the residuals are exponentially small by r = 10³, so allow roundoff
            assert!(worst <= 5.0 && worst <= prev + 1e-12, "{r}: {worst}");
            prev = worst;
        }
    }

    #[test]
    fn bound_examples() {
        let g = ExponentialSum::polynomial(vec![c(1.0, 0.0), c(-1.0, 0.0)]);
        let b = log_derivative_upper_bound(&g, c(3.0, 0.0), 10.0).unwrap();
        let expected = 40.0 / 49.0 * 11f64.ln() + 1.0;
        assert!((b.bound - expected).abs() < 1e-12, "{}", b.bound);
        assert_eq!(b.zeros_used, 1);

        let b = log_derivative_upper_bound(&ExponentialSum::exp(), c(1.0, 0.0), 4.0).unwrap();
        assert!((b.bound - 64.0 / 9.0).abs() < 1e-12);

        let b = log_derivative_upper_bound(&g, c(0.0, 0.0), 0.5).unwrap();
        assert!(b.bound >= 0.0);
        assert_eq!(b.zeros_used, 0);
    }

    #[test]
    fn bound_dominates_for_products() {
        let f = CanonicalProduct::new(ZeroRule::power_law(2.0).unwrap(), 0, 1e-8, 100.0).unwrap();
        for z in [c(2.0, 0.5), c(-7.0, 1.0), c(10.0, -3.0)] {
            let b = log_derivative_upper_bound(&f, z, 40.0).unwrap();
            assert!(b.bound >= f.log_derivative(z).unwrap().norm() - 1e-9);
        }
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_integral(0.5, 0, c(-1.0, 0.0)).unwrap();
        assert!((k.closed_form - c(PI, 0.0)).norm() < 1e-14);
        assert!(k.relative_gap() < 1e-7);

        let k = kernel_integral(0.5, 0, c(0.0, 1.0)).unwrap();
        let oracle = Complex::from_polar(PI, PI / 4.0);
        assert!((k.closed_form - oracle).norm() < 1e-13);
        assert!(k.relative_gap() < 1e-7);

        // a = 3/2 - 1 = 1/2 again, so the value at -1 is +π as well
        let k = kernel_integral(1.5, 1, c(-1.0, 0.0)).unwrap();
        assert!((k.closed_form - c(PI, 0.0)).norm() < 1e-14);
        assert!(k.relative_gap() < 1e-7);
    }

    #[test]
    fn kernel_rejects_bad_inputs() {
        assert!(matches!(
            kernel_integral(0.5, 0, c(2.0, 0.0)),
            Err(AnalyticError::BranchViolation { .. })
        ));
        assert!(matches!(
            kernel_integral(1.0, 0, c(-1.0, 0.0)),
            Err(AnalyticError::NotInRegime { .. })
        ));
        assert!(matches!(
            kernel_integral(0.5, 1, c(-1.0, 0.0)),
            Err(AnalyticError::NotInRegime { .. })
        ));
    }

    #[test]
    fn crg_examples() {
        let rule = ZeroRule::power_law(2.0).unwrap();
        let f = CanonicalProduct::new(rule, 0, 1e-6, 1e4).unwrap();
        let po = ProximateOrder::constant(0.5);
        let cascade = EpsilonCascade::new(1);
        let out = verify_crg_theorem15(&f, 1.0, &po, cascade, 1.0, &[(1e4, PI), (1e4, PI / 2.0)]).unwrap();
        // sin(π√z)/(π√z) at z = -10⁴: sinh(100π)/(100π)
        let oracle = 100.0 * PI + (-(-200.0 * PI).exp()).ln_1p() - 2f64.ln() - (100.0 * PI).ln();
        assert!((out[0].predicted - 100.0 * PI).abs() < 1e-10);
        assert!(
            (out[0].measured - oracle).abs() < 1e-5,
            "{} vs {oracle}",
            out[0].measured
        );
        assert!(out[0].normalized_residual.abs() < 1.0);
        assert!((out[1].predicted - 100.0 * PI * (PI / 4.0).cos()).abs() < 1e-10);
        let w = Complex::from_polar(100.0, PI / 4.0);
        let id = ((PI * w).sin() / (PI * w)).norm().ln();
        assert!((out[1].measured - id).abs() < 1e-5);

        let eps = cascade.eps1(1e4);
        let err = verify_crg_theorem15(&f, 1.0, &po, cascade, 1.0, &[(1e4, eps * eps)]).unwrap_err();
        assert!(matches!(err, AnalyticError::BandViolation { .. }));
        let err = verify_crg_theorem15(&f, 2.0, &po, cascade, 1.0, &[(1e4, PI)]).unwrap_err();
        assert!(matches!(err, AnalyticError::HypothesisFailure { .. }));
    }
}
