//! Replica partition functions `ẑ_m^{(±)}(ω)`, their constants, the
//! supersymmetric dispatcher and the deformed tau functions `τ̂_{2m}(s; t)`.
//!
//! Both flavors are evaluated through de Bruijn reductions:
//!
//! * `∫_{[−1,1]^m} Δ⁴ Π w = m! · Pf[(j−i) μ_{i+j−3}]`, `μ_k = ∫ λ^k w`,
//! * `∫_{[1,∞)^{2m}} |Δ| Π w = (2m)! · Pf[K_{ij}]` with the sign kernel `K`.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::{bosonic_kernel_matrix, fermionic_moments, gauss_legendre_rule, ExponentialWeight, PathSettings};
use crate::skewlinalg::{pfaffian, LogScaledComplex, SkewMatrix};
use crate::specfun::{barnes_g_log_ratio, ln_gamma_half, oscillatory_exp_integral, sine_kernel, sine_kernel_second};

pub const MAX_FERMIONIC_M: usize = 3;
pub const MAX_BOSONIC_M: usize = 2;
/// Longest supported deformation vector `(t_1, …, t_K)`.
pub const MAX_DEFORMATION: usize = 8;

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|j| (j as f64).ln()).sum()
}

fn factorial(k: usize) -> f64 {
    (2..=k).map(|j| j as f64).product()
}

/// `ln c_m^{(+)}`, built from `Γ` at integer and half-integer points only.
pub fn log_constant_fermionic(m: usize) -> Result<f64> {
    if !(1..=MAX_FERMIONIC_M).contains(&m) {
        return Err(domain("constant_fermionic", format!("m = {m} outside [1, {MAX_FERMIONIC_M}]")));
    }
    let mu = m as u32;
    let mf = m as f64;
    let products: f64 = (1..=mu)
        .map(|j| ln_gamma_half(2 * (2 * mu + 2 * j)) - 3.0 * ln_gamma_half(2 * (2 * j)))
        .sum();
    Ok(mf * (2.0 * PI).ln() - barnes_g_log_ratio(mu)? + ln_gamma_half(2 * mu + 1)
        - 4.0 * mf * mf * LN_2
        - ln_factorial(m)
        + products)
}

/// `c_m^{(+)} = (2π)^m G(1/2) Γ(m+1/2) / (2^{4m²} m! G(2m+3/2)) · Π_j Γ(2m+2j)/Γ³(2j)`.
pub fn constant_fermionic(m: usize) -> Result<f64> {
    log_constant_fermionic(m).map(f64::exp)
}

/// `ln c_m^{(−)}`.
pub fn log_constant_bosonic(m: usize) -> Result<f64> {
    if !(1..=MAX_BOSONIC_M).contains(&m) {
        return Err(domain("constant_bosonic", format!("m = {m} outside [1, {MAX_BOSONIC_M}]")));
    }
    let mf = m as f64;
    let gammas: f64 = (1..=2 * m as u32).map(ln_gamma_half).sum();
    Ok(mf * PI.ln() - 2.0 * mf * mf * LN_2 - ln_factorial(2 * m) - 2.0 * gammas)
}

/// `c_m^{(−)} = π^m / (2^{2m²} (2m)! Π_{j=1}^{2m} Γ²(j/2))`.
pub fn constant_bosonic(m: usize) -> Result<f64> {
    log_constant_bosonic(m).map(f64::exp)
}

/// Integration parameters shared by every partition-function evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartitionSettings {
    /// Gauss–Legendre order on `[−1, 1]`; the check run uses twice this.
    pub finite_order: usize,
    pub finite_tolerance: f64,
    pub path: PathSettings,
}

impl Default for PartitionSettings {
    fn default() -> Self {
        Self {
            finite_order: 48,
            finite_tolerance: 1e-10,
            path: PathSettings::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Pfaffian,
    TensorOracle,
    ClosedForm,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Pfaffian => "pfaffian",
            Method::TensorOracle => "tensor-oracle",
            Method::ClosedForm => "closed-form",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionValue {
    pub value: LogScaledComplex,
    /// Absolute error estimate of `value`.
    pub error_estimate: f64,
    pub method: Method,
}

impl PartitionValue {
    pub fn one() -> Self {
        Self {
            value: LogScaledComplex::ONE,
            error_estimate: 0.0,
            method: Method::ClosedForm,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        self.value.to_complex()
    }

    fn scaled(self, log_factor: f64) -> Self {
        let f = log_factor.exp();
        Self {
            value: self.value * LogScaledComplex::new(log_factor, 0.0),
            error_estimate: self.error_estimate * f,
            method: self.method,
        }
    }
}

/// Replica index `n ∈ [−3, 3]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct ReplicaIndex(i32);

impl ReplicaIndex {
    pub const RANGE: i32 = 3;

    pub fn new(n: i32) -> Result<Self> {
        if n.abs() > Self::RANGE {
            return Err(domain("ReplicaIndex", format!("n = {n} outside [-3, 3]")));
        }
        Ok(Self(n))
    }

    pub fn get(self) -> i32 {
        self.0
    }
}

impl TryFrom<i32> for ReplicaIndex {
    type Error = Error;
    fn try_from(n: i32) -> Result<Self> {
        Self::new(n)
    }
}

impl From<ReplicaIndex> for i32 {
    fn from(n: ReplicaIndex) -> i32 {
        n.0
    }
}

/// Spectral parameter `s` and truncated deformation `(t_1, …, t_K)`.
///
/// Coordinates are complex so that finite-difference steps can follow a
/// rotated integration path; the physical deformations are real.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformationPoint {
    pub s: Complex64,
    pub t: Vec<Complex64>,
}

impl DeformationPoint {
    /// `t = 0` with `K = MAX_DEFORMATION` slots.
    pub fn new(s: Complex64) -> Self {
        Self {
            s,
            t: vec![Complex64::new(0.0, 0.0); MAX_DEFORMATION],
        }
    }

    /// The projection point `s = −iπω/2`, `t = 0`.
    pub fn projection(omega: f64) -> Self {
        Self::new(Complex64::new(0.0, -0.5 * PI * omega))
    }

    /// `t_j` (1-based); zero beyond the stored slots.
    pub fn t(&self, j: usize) -> Complex64 {
        if j == 0 {
            return Complex64::new(0.0, 0.0);
        }
        self.t.get(j - 1).copied().unwrap_or_default()
    }

    /// Copy with `t_j += delta` (1-based).
    pub fn shifted(&self, j: usize, delta: Complex64) -> Self {
        let mut p = self.clone();
        if p.t.len() < j {
            p.t.resize(j, Complex64::new(0.0, 0.0));
        }
        p.t[j - 1] += delta;
        p
    }

    fn validate(&self) -> Result<()> {
        if self.t.len() > MAX_DEFORMATION && self.t[MAX_DEFORMATION..].iter().any(|z| z.norm() > 0.0) {
            return Err(domain(
                "DeformationPoint",
                format!("deformation truncated at K = {MAX_DEFORMATION}"),
            ));
        }
        if !(self.s.re.is_finite() && self.s.im.is_finite()) {
            return Err(domain("DeformationPoint", "s must be finite"));
        }
        Ok(())
    }
}

fn fermionic_pfaffian_with<F>(m: usize, exponent: F, settings: &PartitionSettings) -> Result<PartitionValue>
where
    F: Fn(f64) -> Complex64 + Copy,
{
    let count = 4 * m - 2;
    let build = |order: usize| -> Result<LogScaledComplex> {
        let rule = gauss_legendre_rule(order)?;
        let mu = fermionic_moments(count, exponent, &rule);
        // (j−i) μ_{i+j−3} with 1-based i < j, i.e. μ_{i+j−1} 0-based
        let a = SkewMatrix::from_upper(2 * m, |i, j| mu[i + j - 1] * (j - i) as f64)?;
        Ok(pfaffian(&a).value)
    };
    let value = build(settings.finite_order)?;
    let check = build((2 * settings.finite_order).min(crate::quadrature::MAX_RULE_ORDER))?;
    let err = (value.to_complex() - check.to_complex()).norm();
    if err > settings.finite_tolerance * value.abs().max(1.0) {
        return Err(Error::NonConvergence {
            what: format!("fermionic moments (m = {m})"),
            change: err,
            tol: settings.finite_tolerance,
        });
    }
    Ok(PartitionValue {
        value,
        error_estimate: err.max(f64::EPSILON * value.abs()),
        method: Method::Pfaffian,
    })
}

fn bosonic_pfaffian_with(m: usize, weight: &ExponentialWeight, settings: &PartitionSettings) -> Result<PartitionValue> {
    let (k, change) = bosonic_kernel_matrix(2 * m, weight, &settings.path)?;
    let a = SkewMatrix::from_rows(&antisymmetrize(&k))?;
    let value = pfaffian(&a).value;
    let rel = change.max(f64::EPSILON);
    Ok(PartitionValue {
        value,
        error_estimate: m as f64 * rel * value.abs(),
        method: Method::Pfaffian,
    })
}

fn antisymmetrize(k: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let n = k.len();
    (0..n)
        .map(|i| (0..n).map(|j| (k[i][j] - k[j][i]) * 0.5).collect())
        .collect()
}

/// `ẑ_m^{(+)}(ω) = c_m^{(+)} · m! · Pf[(j−i) μ_{i+j−3}(ω)]`.
pub fn z_plus(m: usize, omega: f64, settings: &PartitionSettings) -> Result<PartitionValue> {
    let log_c = log_constant_fermionic(m)?;
    if !omega.is_finite() {
        return Err(domain("z_plus", "omega must be finite"));
    }
    let phase = Complex64::new(0.0, -PI * omega);
    let raw = fermionic_pfaffian_with(m, move |l| phase * l, settings)?;
    let mut v = raw.scaled(log_c + ln_factorial(m));
    // real for real ω; drop the rounding-level imaginary part, measured
    // against the O(1) scale of the moment Pfaffian
    let z = v.value.to_complex();
    let roundoff = 1e-14 * (log_c + ln_factorial(m)).exp().max(z.norm());
    if z.im.abs() <= v.error_estimate.max(roundoff) {
        v.value = LogScaledComplex::from_real(z.re);
    }
    Ok(v)
}

/// `ẑ_m^{(−)}(ω) = c_m^{(−)} · (2m)! · Pf[K_{ij}(ω)]`.
pub fn z_minus(m: usize, omega: f64, settings: &PartitionSettings) -> Result<PartitionValue> {
    let log_c = log_constant_bosonic(m)?;
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(domain("z_minus", format!("omega = {omega} must be finite and > 0")));
    }
    let raw = bosonic_pfaffian_with(m, &ExponentialWeight::bosonic(omega), settings)?;
    Ok(raw.scaled(log_c + ln_factorial(2 * m)))
}

/// Closed forms `(ẑ₁⁺(ω), ẑ₁⁻(ω))`:
/// `ẑ₁⁺ = −4 S′(ω)/(π²ω)` and `ẑ₁⁻ = (i/(2πω)) ∫₁^∞ e^{iπωt} dt/t`.
pub fn z1_closed_forms(omega: f64) -> Result<(Complex64, Complex64)> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(domain("z1_closed_forms", format!("omega = {omega} must be finite and > 0")));
    }
    let k = sine_kernel(omega);
    let plus = -4.0 * k.s_prime / (PI * PI * omega);
    let e = oscillatory_exp_integral(PI * omega)?;
    let minus = Complex64::new(0.0, 1.0 / (2.0 * PI * omega)) * e;
    Ok((Complex64::new(plus, 0.0), minus))
}

/// ω-derivatives of the closed forms, `(∂ẑ₁⁺, ∂ẑ₁⁻)`.
pub fn z1_closed_form_derivatives(omega: f64) -> Result<(Complex64, Complex64)> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(domain("z1_closed_form_derivatives", format!("omega = {omega} must be finite and > 0")));
    }
    let k = sine_kernel(omega);
    let s2 = sine_kernel_second(omega);
    let dplus = -4.0 / (PI * PI) * (s2 / omega - k.s_prime / (omega * omega));
    let x = PI * omega;
    let e = oscillatory_exp_integral(x)?;
    let dminus = Complex64::new(0.0, -1.0 / (2.0 * PI * omega * omega)) * (e + Complex64::from_polar(1.0, x));
    Ok((Complex64::new(dplus, 0.0), dminus))
}

/// `ẑ_n(ω)`: `ẑ_{|n|}^{(−)}` for `n < 0`, `1` for `n = 0`, `ẑ_n^{(+)}` for `n > 0`.
pub fn z_super(n: ReplicaIndex, omega: f64, settings: &PartitionSettings) -> Result<PartitionValue> {
    match n.get() {
        0 => Ok(PartitionValue::one()),
        k if k > 0 => z_plus(k as usize, omega, settings),
        k => z_minus(k.unsigned_abs() as usize, omega, settings),
    }
}

/// Deformed tau functions.
///
/// * `m > 0`: `(1/m!) ∫_{[−1,1]^m} Δ⁴ Π (1−λ²) e^{2sλ + 2V(t;λ)}`,
/// * `m < 0`: `(1/(2|m|)!) ∫_{[1,∞)^{2|m|}} |Δ| Π (λ²−1)^{−1/2} e^{−sλ − V(t;λ)}`,
/// * `m = 0`: `1`,
///
/// with `V(t;λ) = Σ_j t_j λ^j`. On the bosonic side the path follows the
/// steepest-descent ray of `e^{−sλ}`, so `Re s ≥ 0` is required and the
/// leading deformation must decay along that ray.
pub fn tau(m: i32, point: &DeformationPoint, settings: &PartitionSettings) -> Result<PartitionValue> {
    point.validate()?;
    if m == 0 {
        return Ok(PartitionValue::one());
    }
    if m.unsigned_abs() as usize > MAX_BOSONIC_M {
        return Err(domain("tau", format!("|m| = {} exceeds {MAX_BOSONIC_M}", m.abs())));
    }
    if m > 0 {
        let s2 = point.s * 2.0;
        let t2: Vec<Complex64> = point.t.iter().map(|z| z * 2.0).collect();
        let exponent = |l: f64| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in t2.iter().rev() {
                acc = (acc + c) * l;
            }
            acc + s2 * l
        };
        fermionic_pfaffian_with(m as usize, exponent, settings)
    } else {
        if point.s.re < 0.0 {
            return Err(Error::Inadmissible(format!(
                "bosonic tau needs Re s >= 0, got s = {}",
                point.s
            )));
        }
        let weight = ExponentialWeight {
            kappa: -point.s,
            poly: point.t.iter().map(|z| -z).collect(),
        };
        bosonic_pfaffian_with(m.unsigned_abs() as usize, &weight, settings)
    }
}

/// The constant relating `ẑ` and `τ̂` at the projection point:
/// `ẑ_m = C · τ̂_{2m}(−iπω/2; 0)` with `C = c_m^{(+)} m!` or `c_m^{(−)} (2m)!`.
pub fn projection_constant(m: i32) -> Result<f64> {
    match m {
        0 => Ok(1.0),
        k if k > 0 => Ok(constant_fermionic(k as usize)? * factorial(k as usize)),
        k => {
            let mm = k.unsigned_abs() as usize;
            Ok(constant_bosonic(mm)? * factorial(2 * mm))
        }
    }
}

/// Measured ratio `ẑ_m(ω) / τ̂_{2m}(−iπω/2; 0)`.
pub fn projection_ratio(m: i32, omega: f64, settings: &PartitionSettings) -> Result<Complex64> {
    let z = z_super(ReplicaIndex::new(m)?, omega, settings)?.to_complex();
    let t = tau(m, &DeformationPoint::projection(omega), settings)?.to_complex();
    Ok(z / t)
}
