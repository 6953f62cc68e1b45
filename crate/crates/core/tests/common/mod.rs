//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

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

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    let mut mag = WGK[7] * fc.abs();
    for i in 0..7 {
        let (lo, hi) = (f(c - h * XGK[i]), f(c + h * XGK[i]));
        k += WGK[i] * (lo + hi);
        mag += WGK[i] * (lo.abs() + hi.abs());
        if i % 2 == 1 {
            g += WG[i / 2] * (lo + hi);
        }
    }
    (k * h, ((k - g) * h).abs(), mag * h.abs())
}

/// Adaptive Gauss–Kronrod (7/15) integration to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, e, mag) = kronrod(f, a, b);
        // stop once the error estimate is at roundoff level
        if e <= tol.max(50.0 * f64::EPSILON * mag) || depth == 0 {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, depth - 1) + rec(f, m, b, 0.5 * tol, depth - 1)
    }
    rec(&f, a, b, tol, 30)
}

fn sinc(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        t.sin() / t
    }
}

fn cosm1_over(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        -t / 2.0 + t * t * t / 24.0
    } else {
        (t.cos() - 1.0) / t
    }
}

/// Si(x) by direct quadrature of sin t / t on unit panels.
pub fn si(x: f64) -> f64 {
    panels(x).map(|(a, b)| integrate(sinc, a, b, 1e-16)).sum()
}

/// Ci(x) = γ + ln x + ∫₀ˣ (cos t − 1)/t dt.
pub fn ci(x: f64) -> f64 {
    EULER_GAMMA + x.ln() + panels(x).map(|(a, b)| integrate(cosm1_over, a, b, 1e-16)).sum::<f64>()
}

fn panels(x: f64) -> impl Iterator<Item = (f64, f64)> {
    let n = x.ceil().max(1.0) as usize;
    (0..n).map(move |k| (x * k as f64 / n as f64, x * (k + 1) as f64 / n as f64))
}

/// ∫_ω^∞ sin(πt)/(πt) dt = 1/2 − Si(πω)/π.
pub fn tail(omega: f64) -> f64 {
    0.5 - si(PI * omega) / PI
}

/// R₂ from the oracle Si.
pub fn r2(omega: f64) -> f64 {
    let x = PI * omega;
    let s = x.sin() / x;
    let sp = (x * x.cos() - x.sin()) / (x * omega);
    1.0 - s * s - sp * tail(omega)
}

/// Fifth-order accurate central first derivative.
pub fn derivative5<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

fn integrate_c<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: f64) -> Complex64 {
    Complex64::new(integrate(|x| f(x).re, a, b, tol), integrate(|x| f(x).im, a, b, tol))
}

/// `ẑ₂⁺(ω) = (1/72) ∫∫_{[−1,1]²} (λ−μ)⁴ (1−λ²)(1−μ²) e^{−iπω(λ+μ)}` by
/// nested adaptive quadrature.
pub fn z2_plus_tensor(omega: f64) -> Complex64 {
    let phase = |x: f64| Complex64::from_polar(1.0, -PI * omega * x);
    let inner = |l: f64| {
        integrate_c(|m| phase(m) * ((l - m).powi(4) * (1.0 - m * m)), -1.0, 1.0, 1e-15) * ((1.0 - l * l) * phase(l))
    };
    integrate_c(inner, -1.0, 1.0, 1e-14) / 72.0
}

/// `ẑ₁⁻(ω) = (1/8) ∫∫_{[1,∞)²} |λ−μ| ((λ²−1)(μ²−1))^{−1/2} e^{iπω(λ+μ)/2}`.
///
/// With `μ = λ + g` on the ordered half, both `λ` and `g` are rotated onto
/// the imaginary direction (`λ = 1 + iu²`, `g = iv²`), which turns the
/// oscillation into Gaussian decay and removes the endpoint singularities.
pub fn z1_minus_tensor(omega: f64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let f = |l: Complex64| (l * l - 1.0).sqrt().inv();
    let cutoff = (45.0 / (0.5 * PI * omega)).sqrt();
    let integrand = |u: f64, v: f64| -> Complex64 {
        let (y, h) = (u * u, v * v);
        let l = Complex64::new(1.0, y);
        let m = Complex64::new(1.0, y + h);
        // ∂λ/∂u · ∂g/∂v = (2iu)(2iv); the factor g = ih
        let jac = i * 2.0 * u * (i * 2.0 * v);
        let decay = (-PI * omega * (y + 0.5 * h)).exp();
        if v == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if u == 0.0 {
            // u·f(1+iu²) → (2i)^{−1/2}
            return i * h * (i * 2.0 * v) * 2.0 / (2.0 * i).sqrt() * f(m) * decay;
        }
        i * h * jac * f(l) * f(m) * decay
    };
    let inner = |u: f64| integrate_c(|v| integrand(u, v), 0.0, (2.0f64).sqrt() * cutoff, 1e-13);
    let phase = Complex64::from_polar(1.0, PI * omega);
    integrate_c(inner, 0.0, cutoff, 1e-12) * phase * 2.0 / 8.0
}
