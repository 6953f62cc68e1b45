//! Two-point density–density correlation of the infinite GOE: the exact
//! sine-kernel form, its large-ω asymptotics and the replica-factorized
//! route through `g′(ω)`.
//!
//! Curves hold the smooth part only; the `δ(ω)` self-correlation is excluded.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::partition::{z1_closed_form_derivatives, z1_closed_forms};
use crate::quadrature::gauss_legendre_rule;
use crate::specfun::{sine_kernel, sine_kernel_second, tail_sine_integral};

fn check_omega(func: &'static str, omega: f64) -> Result<()> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(domain(func, format!("omega = {omega} must be finite and > 0")));
    }
    Ok(())
}

/// `R₂(ω) = 1 − S(ω)² − S′(ω) ∫_ω^∞ S(t) dt`.
pub fn r2_exact(omega: f64) -> Result<f64> {
    check_omega("r2_exact", omega)?;
    let k = sine_kernel(omega);
    Ok(1.0 - k.s * k.s - k.s_prime * tail_sine_integral(omega)?)
}

/// `R₂′(ω) = −S S′ − S″ ∫_ω^∞ S`.
pub fn r2_exact_derivative(omega: f64) -> Result<f64> {
    check_omega("r2_exact_derivative", omega)?;
    let k = sine_kernel(omega);
    Ok(-k.s * k.s_prime - sine_kernel_second(omega) * tail_sine_integral(omega)?)
}

/// `1 − 1/(πω)² + 2Γ²(3) cos(2πω)/(2πω)⁴`, meaningful for `ω ≳ 1`.
pub fn r2_asymptotic(omega: f64) -> Result<f64> {
    check_omega("r2_asymptotic", omega)?;
    let x = PI * omega;
    Ok(1.0 - 1.0 / (x * x) + 8.0 * (2.0 * x).cos() / (2.0 * x).powi(4))
}

/// Size of the oscillatory term of the asymptotic form at `ω`, used as the
/// closure error estimate.
pub fn asymptotic_envelope(omega: f64) -> f64 {
    8.0 / (2.0 * PI * omega).powi(4)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenFunctionDerivative {
    pub omega: f64,
    pub g_prime: Complex64,
}

/// `g′(ω) = −2iπ/ω² + π⁴ω² (ẑ₁⁺ ∂ẑ₁⁻ − ẑ₁⁻ ∂ẑ₁⁺)` from the one-flavor closed
/// forms; the logarithmic derivative is cleared so zeros of `ẑ₁⁺` are
/// regular points.
pub fn g_prime_factorized(omega: f64) -> Result<GreenFunctionDerivative> {
    check_omega("g_prime_factorized", omega)?;
    let (zp, zm) = z1_closed_forms(omega)?;
    let (dp, dm) = z1_closed_form_derivatives(omega)?;
    let w2 = omega * omega;
    let g = Complex64::new(0.0, -2.0 * PI / w2) + (zp * dm - zm * dp) * (PI.powi(4) * w2);
    Ok(GreenFunctionDerivative { omega, g_prime: g })
}

/// `R₂′(ω) = Re g′(ω) / (2π²)`. The distributional term
/// `(1/π)∂_ω Re[i/(ω+i0)]` vanishes for `ω > 0`.
pub fn r2_derivative_factorized(omega: f64) -> Result<f64> {
    Ok(g_prime_factorized(omega)?.g_prime.re / (2.0 * PI * PI))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveSource {
    Exact,
    Asymptotic,
    Factorized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCurve {
    pub omega: Vec<f64>,
    pub r2: Vec<f64>,
    pub source: CurveSource,
    /// Point beyond which the asymptotic form closes the integral.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closure_point: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closure_error: Option<f64>,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(domain("correlation grid", "grid is empty"));
    }
    if grid.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
        return Err(domain("correlation grid", "grid points must be finite and > 0"));
    }
    if grid.windows(2).any(|p| p[0] >= p[1]) {
        return Err(domain("correlation grid", "grid must be strictly ascending"));
    }
    Ok(())
}

pub fn r2_exact_curve(grid: &[f64]) -> Result<CorrelationCurve> {
    check_grid(grid)?;
    Ok(CorrelationCurve {
        omega: grid.to_vec(),
        r2: grid.iter().map(|&w| r2_exact(w)).collect::<Result<_>>()?,
        source: CurveSource::Exact,
        closure_point: None,
        closure_error: None,
    })
}

pub fn r2_asymptotic_curve(grid: &[f64]) -> Result<CorrelationCurve> {
    check_grid(grid)?;
    Ok(CorrelationCurve {
        omega: grid.to_vec(),
        r2: grid.iter().map(|&w| r2_asymptotic(w)).collect::<Result<_>>()?,
        source: CurveSource::Asymptotic,
        closure_point: None,
        closure_error: None,
    })
}

/// Settings of the factorized route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FactorizationSettings {
    /// Tolerated size of the asymptotic tail beyond the closure point.
    pub closure_tolerance: f64,
    /// Longest integration panel; `R₂′` oscillates with period 1.
    pub panel_width: f64,
    pub nodes_per_panel: usize,
}

impl Default for FactorizationSettings {
    fn default() -> Self {
        Self {
            closure_tolerance: 1e-11,
            panel_width: 0.25,
            nodes_per_panel: 20,
        }
    }
}

/// Integrates `R₂′ = Re g′/(2π²)` inward from a closure point `Ω ≥ max(grid)`
/// chosen so that the oscillatory asymptotic term at `Ω` is below the
/// closure tolerance, starting from `R₂(Ω) = r2_asymptotic(Ω)`.
pub fn r2_from_factorization(grid: &[f64], settings: &FactorizationSettings) -> Result<CorrelationCurve> {
    check_grid(grid)?;
    if !(settings.closure_tolerance > 0.0 && settings.panel_width > 0.0) {
        return Err(Error::Config("factorization tolerances must be positive".into()));
    }
    let top = *grid.last().expect("nonempty grid");
    // 8/(2πΩ)⁴ ≤ tol
    let needed = (8.0 / settings.closure_tolerance).powf(0.25) / (2.0 * PI);
    let closure = top.max(needed);
    let closure_error = asymptotic_envelope(closure);
    if closure_error > settings.closure_tolerance * (1.0 + 1e-12) {
        return Err(Error::NonConvergence {
            what: "asymptotic tail closure".into(),
            change: closure_error,
            tol: settings.closure_tolerance,
        });
    }
    let rule = gauss_legendre_rule(settings.nodes_per_panel)?;
    let integrate = |a: f64, b: f64| -> Result<f64> {
        if b <= a {
            return Ok(0.0);
        }
        let pieces = ((b - a) / settings.panel_width).ceil().max(1.0) as usize;
        let step = (b - a) / pieces as f64;
        let mut acc = 0.0;
        for p in 0..pieces {
            let lo = a + step * p as f64;
            for (x, w) in rule.mapped(lo, lo + step) {
                acc += w * r2_derivative_factorized(x)?;
            }
        }
        Ok(acc)
    };
    let mut r2 = vec![0.0; grid.len()];
    let mut value = r2_asymptotic(closure)?;
    let mut upper = closure;
    for (k, &w) in grid.iter().enumerate().rev() {
        value -= integrate(w, upper)?;
        r2[k] = value;
        upper = w;
    }
    Ok(CorrelationCurve {
        omega: grid.to_vec(),
        r2,
        source: CurveSource::Factorized,
        closure_point: Some(closure),
        closure_error: Some(closure_error),
    })
}
