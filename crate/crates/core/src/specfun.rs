//! Scalar special functions: the sine kernel, sine and cosine integrals,
//! log-gamma at half-integer arguments and Barnes-G ratios.
//!
//! Everything here is a pure function of its arguments.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{domain, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this value of |πω| the sine kernel is evaluated by its Taylor series.
pub const KERNEL_SERIES_THRESHOLD: f64 = 1e-2;

/// Switch point between the power series and the auxiliary-function branch
/// of Si/Ci.
pub const SICI_SWITCH: f64 = 8.0;

/// The sine kernel S(ω) = sin(πω)/(πω) and its first derivative in ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub s: f64,
    pub s_prime: f64,
}

pub fn sine_kernel(omega: f64) -> KernelValue {
    let x = PI * omega;
    if x.abs() < KERNEL_SERIES_THRESHOLD {
        let x2 = x * x;
        let s = 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0));
        // dS/dx = -x/3 + x^3/30 - x^5/840 + x^7/45360
        let ds_dx = -x / 3.0 * (1.0 - x2 / 10.0 * (1.0 - x2 / 28.0 * (1.0 - x2 / 54.0)));
        KernelValue {
            s,
            s_prime: PI * ds_dx,
        }
    } else {
        let (sin, cos) = x.sin_cos();
        KernelValue {
            s: sin / x,
            s_prime: (x * cos - sin) / (x * omega),
        }
    }
}

/// Second derivative S''(ω).
pub fn sine_kernel_second(omega: f64) -> f64 {
    let x = PI * omega;
    let d2_dx2 = if x.abs() < KERNEL_SERIES_THRESHOLD {
        let x2 = x * x;
        // -1/3 + x^2/10 - x^4/168 + x^6/6480
        -1.0 / 3.0 + x2 / 10.0 - x2 * x2 / 168.0 + x2 * x2 * x2 / 6480.0
    } else {
        let (sin, cos) = x.sin_cos();
        -sin / x - 2.0 * cos / (x * x) + 2.0 * sin / (x * x * x)
    };
    PI * PI * d2_dx2
}

/// Sine and cosine integrals `(Si(x), Ci(x))` for `x > 0`.
pub fn sin_cos_integrals(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("sin_cos_integrals", format!("x = {x} must be finite and > 0")));
    }
    if x < SICI_SWITCH {
        Ok(sici_series(x))
    } else {
        let (f, g) = auxiliary_cf(x);
        let (sin, cos) = x.sin_cos();
        Ok((FRAC_PI_2 - f * cos - g * sin, f * sin - g * cos))
    }
}

fn sici_series(x: f64) -> (f64, f64) {
    let x2 = x * x;
    // Si
    let mut term = x;
    let mut si = x;
    let mut k = 0u32;
    loop {
        let kk = f64::from(k);
        term *= -x2 / ((2.0 * kk + 2.0) * (2.0 * kk + 3.0));
        let contrib = term / (2.0 * kk + 3.0);
        si += contrib;
        k += 1;
        if contrib.abs() < 1e-17 * si.abs() || k > 200 {
            break;
        }
    }
    // Ci
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut k = 1u32;
    loop {
        let kk = f64::from(k);
        term *= -x2 / ((2.0 * kk - 1.0) * (2.0 * kk));
        let contrib = term / (2.0 * kk);
        sum += contrib;
        k += 1;
        if contrib.abs() < 1e-17 * (sum.abs() + 1.0) || k > 200 {
            break;
        }
    }
    (si, EULER_GAMMA + x.ln() + sum)
}

/// Auxiliary functions f(x), g(x) via the continued fraction for E1(ix).
fn auxiliary_cf(x: f64) -> (f64, f64) {
    const TINY: f64 = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 2..1000 {
        let a = -f64::from((i - 1) * (i - 1));
        b += 2.0;
        d = (d * a + b).inv();
        c = b + c.inv() * a;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    // h = e^{ix} E1(ix) = g - i f
    (-h.im, h.re)
}

/// Auxiliary functions `(f(x), g(x))` with Si = π/2 − f cos x − g sin x and
/// Ci = f sin x − g cos x.
pub fn auxiliary_fg(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("auxiliary_fg", format!("x = {x} must be finite and > 0")));
    }
    if x >= SICI_SWITCH {
        return Ok(auxiliary_cf(x));
    }
    let (si, ci) = sici_series(x);
    let (sin, cos) = x.sin_cos();
    let rest = FRAC_PI_2 - si;
    Ok((ci * sin + rest * cos, -ci * cos + rest * sin))
}

/// ∫ₓ^∞ e^{it}/t dt = −Ci(x) + i(π/2 − Si(x)) = e^{ix}(g(x) + i f(x)).
pub fn oscillatory_exp_integral(x: f64) -> Result<Complex64> {
    let (f, g) = auxiliary_fg(x)?;
    Ok(Complex64::from_polar(1.0, x) * Complex64::new(g, f))
}

/// ∫_ω^∞ S(t) dt = 1/2 − Si(πω)/π.
pub fn tail_sine_integral(omega: f64) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(domain("tail_sine_integral", format!("omega = {omega} must be >= 0")));
    }
    if omega == 0.0 {
        return Ok(0.5);
    }
    if omega.is_infinite() {
        return Ok(0.0);
    }
    let x = PI * omega;
    if x >= SICI_SWITCH {
        // avoids cancellation in 1/2 - Si/π
        let (f, g) = auxiliary_cf(x);
        let (sin, cos) = x.sin_cos();
        Ok((f * cos + g * sin) / PI)
    } else {
        let (si, _) = sici_series(x);
        Ok(0.5 - si / PI)
    }
}

/// ln Γ(k/2) for a positive integer `k`, by exact recursion from Γ(1) and Γ(1/2).
pub fn ln_gamma_half(k: u32) -> f64 {
    assert!(k >= 1, "ln_gamma_half needs k >= 1");
    if k.is_multiple_of(2) {
        (1..k / 2).map(|j| f64::from(j).ln()).sum()
    } else {
        0.5 * PI.ln() + (0..(k - 1) / 2).map(|j| (f64::from(j) + 0.5).ln()).sum::<f64>()
    }
}

/// ln[G(2m+3/2) / G(1/2)] = Σ_{j=0}^{2m} ln Γ(j + 1/2), using only the
/// recursion G(z+1) = Γ(z) G(z).
pub fn barnes_g_log_ratio(m: u32) -> Result<f64> {
    if m == 0 {
        return Err(domain("barnes_g_log_ratio", "m must be >= 1"));
    }
    Ok((0..=2 * m).map(|j| ln_gamma_half(2 * j + 1)).sum())
}
