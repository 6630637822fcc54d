//! Quadrature rules and the one special function the canonical-product tails
//! need.

use num_complex::Complex64 as Complex;

/// Hurwitz zeta `ζ(s, a) = Σ_{k≥0} (k + a)^{-s}` for real `s > 1`, `a > 0`.
///
/// Direct summation of the first terms followed by Euler–Maclaurin with six
/// Bernoulli corrections. Relative accuracy is near machine precision for the
/// arguments used in this crate (`s ≥ 1.01`, `a ≥ 1`).
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(s > 1.0 && a > 0.0, "hurwitz_zeta needs s > 1, a > 0");
    const DIRECT: usize = 12;
    // B_{2j} / (2j)!
    const COEF: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
    ];
    let mut sum = 0.0;
    for k in 0..DIRECT {
        sum += (a + k as f64).powf(-s);
    }
    let x = a + DIRECT as f64;
    let xs = x.powf(-s);
    sum += x * xs / (s - 1.0) + 0.5 * xs;
    // rising factorial s(s+1)...(s+2j-2) times x^{-s-2j+1}
    let mut rising = s;
    let mut pow = xs / x;
    for (j, c) in COEF.iter().enumerate() {
        sum += c * rising * pow;
        let m = 2.0 * j as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        pow /= x * x;
    }
    sum
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * p - pm) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> Complex>(f: &F, a: f64, b: f64) -> (Complex, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).norm())
}

/// Error returned when adaptive bisection runs out of depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureExhausted {
    pub estimate: Complex,
    pub error: f64,
}

/// Adaptive Gauss–Kronrod (7/15) quadrature of a complex integrand by
/// recursive bisection until every panel's Kronrod–Gauss difference is below
/// its share of `abs_tol`.
pub fn integrate_adaptive<F: Fn(f64) -> Complex>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
) -> Result<Complex, QuadratureExhausted> {
    const MAX_DEPTH: u32 = 48;
    let mut total = Complex::new(0.0, 0.0);
    let mut err_total = 0.0;
    let mut exhausted = false;
    let mut stack = vec![(a, b, 0u32)];
    let width = (b - a).abs();
    while let Some((lo, hi, depth)) = stack.pop() {
        let (val, err) = gk15(&f, lo, hi);
        let share = abs_tol * ((hi - lo).abs() / width).max(1e-3);
        if err <= share || depth >= MAX_DEPTH {
            if err > share {
                exhausted = true;
            }
            total += val;
            err_total += err;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    if exhausted && err_total > abs_tol {
        return Err(QuadratureExhausted {
            estimate: total,
            error: err_total,
        });
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zeta_matches_basel() {
        assert!((hurwitz_zeta(2.0, 1.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((hurwitz_zeta(4.0, 1.0) - PI.powi(4) / 90.0).abs() < 1e-14);
    }

    #[test]
    fn zeta_tail_matches_brute_force() {
        // Σ_{k≥101} k^{-2.5} by brute force with an integral tail
        let s: f64 = 2.5;
        let mut brute = 0.0;
        for k in 101..2_000_000u64 {
            brute += (k as f64).powf(-s);
        }
        let x = 2_000_000.0f64 - 0.5;
        brute += x.powf(1.0 - s) / (s - 1.0);
        let z = hurwitz_zeta(s, 101.0);
        assert!((z - brute).abs() / z < 1e-10, "{z} vs {brute}");
    }

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let int: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((int - 2.0 / 15.0).abs() < 1e-14);
        let (x, w) = gauss_legendre(5);
        let int: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((int - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        // ∫_{-1}^{1} 1/(x² + 1e-4) dx = 2·100·atan(100)
        let exact = 200.0 * 100f64.atan();
        let got = integrate_adaptive(|x| Complex::new(1.0 / (x * x + 1e-4), 0.0), -1.0, 1.0, 1e-10).unwrap();
        assert!((got.re - exact).abs() < 1e-8);
    }
}
