//! Independent brute-force evaluations used to check the fast paths.
//!
//! * `tensor_symmetric_oracle` integrates the full symmetrized integrand with
//!   `|Δ|⁴` or `|Δ|` over all `m` (resp. `2m`) variables.
//! * The damped oracles integrate along the real axis with `ω ↦ ω + iη` and
//!   extrapolate `η → 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::gauss::{gauss_legendre_rule, QuadratureRule};
use super::halfline::{kernel_matrix, ExponentialWeight, HalfLineContour, PathSettings};
use crate::error::{domain, Error, Result};
use crate::partition::{constant_bosonic, constant_fermionic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    Fermionic,
    Bosonic,
}

/// An oracle result with its own error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: Complex64,
    pub error: f64,
}

const FERMIONIC_ORDER: usize = 48;
const FERMIONIC_CHECK_ORDER: usize = 40;

/// Brute-force `ẑ_m^{(±)}(ω)` including the constant `c_m^{(±)}`.
///
/// Fermionic: `m`-dimensional Gauss–Legendre product (`m ≤ 3`). Bosonic:
/// `2m` ordered variables on the rotated ray in gap coordinates
/// `λ₁ = 1 + d·scale·v²`, `λ_{k+1} = λ_k + d·scale·σ_k²`, with panels graded
/// towards zero on every axis (`m ≤ 2`).
pub fn tensor_symmetric_oracle(kind: OracleKind, m: usize, omega: f64, settings: &PathSettings) -> Result<OracleValue> {
    match kind {
        OracleKind::Fermionic => {
            if !(1..=3).contains(&m) {
                return Err(domain("tensor_symmetric_oracle", format!("fermionic m = {m} outside [1, 3]")));
            }
            let c = constant_fermionic(m)?;
            let fine = fermionic_tensor(m, omega, &gauss_legendre_rule(FERMIONIC_ORDER)?);
            let coarse = fermionic_tensor(m, omega, &gauss_legendre_rule(FERMIONIC_CHECK_ORDER)?);
            Ok(OracleValue {
                value: fine * c,
                error: c * (fine - coarse).norm(),
            })
        }
        OracleKind::Bosonic => {
            if !(1..=2).contains(&m) {
                return Err(domain("tensor_symmetric_oracle", format!("bosonic m = {m} outside [1, 2]")));
            }
            if !(omega > 0.0) {
                return Err(domain("tensor_symmetric_oracle", format!("omega = {omega} must be > 0")));
            }
            let c = constant_bosonic(m)?;
            let weight = ExponentialWeight::bosonic(omega);
            let (nodes, coarse_nodes) = if m == 1 { (20, 14) } else { (6, 5) };
            let fine = bosonic_tensor(2 * m, &weight, settings, nodes)?;
            let coarse = bosonic_tensor(2 * m, &weight, settings, coarse_nodes)?;
            let fact: f64 = (1..=2 * m).map(|k| k as f64).product();
            let scale = c * fact;
            Ok(OracleValue {
                value: fine * scale,
                error: scale * (fine - coarse).norm(),
            })
        }
    }
}

fn fermionic_tensor(m: usize, omega: f64, rule: &QuadratureRule) -> Complex64 {
    let n = rule.order();
    let phase = Complex64::new(0.0, -PI * omega);
    let single: Vec<Complex64> = rule
        .nodes()
        .iter()
        .zip(rule.weights())
        .map(|(&x, &w)| (phase * x).exp() * ((1.0 - x * x) * w))
        .collect();
    let mut idx = vec![0usize; m];
    let mut total = Complex64::new(0.0, 0.0);
    loop {
        let mut term = Complex64::new(1.0, 0.0);
        let mut vander = 1.0;
        for a in 0..m {
            term *= single[idx[a]];
            for b in 0..a {
                vander *= rule.nodes()[idx[a]] - rule.nodes()[idx[b]];
            }
        }
        let v2 = vander * vander;
        total += term * (v2 * v2);
        // odometer
        let mut k = 0;
        loop {
            if k == m {
                return total;
            }
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Panel edges on `[0, v_max]` refined geometrically towards zero.
fn graded_edges(v_max: f64, uniform: usize, levels: usize) -> Vec<f64> {
    let first = v_max / uniform as f64;
    let mut edges = vec![0.0];
    for l in (1..=levels).rev() {
        edges.push(first * 0.5f64.powi(l as i32));
    }
    for k in 1..=uniform {
        edges.push(first * k as f64);
    }
    edges
}

/// Ordered integral `∫_{λ₁<…<λ_D} Π_{j>k}(λ_j − λ_k) Π w(λ_k)` along the ray.
fn bosonic_tensor(dim: usize, weight: &ExponentialWeight, settings: &PathSettings, order: usize) -> Result<Complex64> {
    let path = HalfLineContour::for_weight(1.0, weight, settings)?;
    let d = path.direction;
    let scale = path.scale;
    let rule = gauss_legendre_rule(order)?;
    let (uniform, levels) = if dim == 2 { (24, 10) } else { (8, 5) };
    // gap variables extend much less far than the first coordinate needs
    let edges = graded_edges(path.v_max, uniform, levels);
    let points: Vec<(f64, f64)> = edges
        .windows(2)
        .flat_map(|e| rule.mapped(e[0], e[1]).collect::<Vec<_>>())
        .collect();

    let first: Vec<(Complex64, Complex64)> = points
        .iter()
        .map(|&(v, w)| {
            let (l, el) = path.sample(weight, v);
            (l, el * w)
        })
        .collect();
    // offsets d·scale·σ² and their Jacobians 2·d·scale·σ
    let gaps: Vec<(Complex64, Complex64)> = points
        .iter()
        .map(|&(s, w)| (d * (scale * s * s), d * (2.0 * scale * s * w)))
        .collect();

    let eval = |lambda: Complex64| -> Complex64 { weight.exponent(lambda).exp() / (lambda * lambda - 1.0).sqrt() };

    let mut total = Complex64::new(0.0, 0.0);
    let mut stack: Vec<Complex64> = Vec::with_capacity(dim);
    fn recurse(
        depth: usize,
        dim: usize,
        acc: Complex64,
        stack: &mut Vec<Complex64>,
        gaps: &[(Complex64, Complex64)],
        eval: &dyn Fn(Complex64) -> Complex64,
        total: &mut Complex64,
    ) {
        if depth == dim {
            *total += acc;
            return;
        }
        let prev = *stack.last().expect("first coordinate set");
        for &(off, jac) in gaps {
            if jac == Complex64::new(0.0, 0.0) {
                continue;
            }
            let lambda = prev + off;
            let mut factor = jac * eval(lambda);
            for &l in stack.iter() {
                factor *= lambda - l;
            }
            let term = acc * factor;
            if term.norm() < 1e-300 {
                continue;
            }
            stack.push(lambda);
            recurse(depth + 1, dim, term, stack, gaps, eval, total);
            stack.pop();
        }
    }
    for &(l1, el) in &first {
        stack.clear();
        stack.push(l1);
        recurse(1, dim, el, &mut stack, &gaps, &eval, &mut total);
    }
    Ok(total)
}

/// Real-axis parameterization for the damped oracle: `λ = 1 + v²` for
/// `λ < 2`, then linear.
struct RealAxisPath {
    edges: Vec<f64>,
}

impl RealAxisPath {
    fn new(start: f64, omega: f64, eta: f64, power: usize) -> Result<Self> {
        let b = 0.5 * PI * eta;
        if !(b > 0.0) {
            return Err(domain("damped oracle", format!("eta = {eta} must be > 0")));
        }
        // e^{-bλ} λ^power below 1e-16 relative
        let mut lmax = 2.0 + 38.0 / b;
        for _ in 0..20 {
            lmax = 2.0 + (38.0 + power as f64 * lmax.ln()) / b;
        }
        let lmax = lmax.max(start + 40.0);
        let mut edges = Vec::new();
        if start < 2.0 {
            let v0 = (start - 1.0).sqrt();
            let parts = 8;
            for k in 0..parts {
                edges.push(v0 + (1.0 - v0) * k as f64 / parts as f64);
            }
            edges.push(1.0);
        } else {
            edges.push(1.0 + (start - 2.0));
        }
        let period = 4.0 / omega.abs().max(1e-12);
        let width = (0.5 * period).min(1.0);
        let begin = start.max(2.0);
        let count = ((lmax - begin) / width).ceil().max(1.0) as usize;
        let step = (lmax - begin) / count as f64;
        let base = *edges.last().expect("nonempty");
        for k in 1..=count {
            edges.push(base + step * k as f64);
        }
        Ok(Self { edges })
    }

    fn lambda(v: f64) -> (f64, f64) {
        if v <= 1.0 {
            (1.0 + v * v, 2.0 * v)
        } else {
            (1.0 + v, 1.0)
        }
    }
}

fn damped_sample(omega: f64, eta: f64) -> impl Fn(f64) -> (Complex64, Complex64) {
    let kappa = Complex64::new(-0.5 * PI * eta, 0.5 * PI * omega);
    move |v| {
        let (l, jac) = RealAxisPath::lambda(v);
        let w = if v <= 1.0 {
            // 2v/√((λ−1)(λ+1)) with λ−1 = v²
            2.0 / (2.0 + v * v).sqrt()
        } else {
            jac / (l * l - 1.0).sqrt()
        };
        (Complex64::new(l, 0.0), (kappa * l).exp() * w)
    }
}

const DAMPED_ORDER: usize = 16;

/// `∫_{λ₀}^∞ λ^j e^{iπ(ω+iη)λ/2} (λ²−1)^{−1/2} dλ` on the real axis.
pub fn damped_half_line_partial(j: usize, omega: f64, eta: f64, start: f64) -> Result<Complex64> {
    if !(start >= 1.0) {
        return Err(domain("damped_half_line_partial", format!("start {start} must be >= 1")));
    }
    let path = RealAxisPath::new(start, omega, eta, j)?;
    let rule = gauss_legendre_rule(DAMPED_ORDER)?;
    let sample = damped_sample(omega, eta);
    Ok(path
        .edges
        .windows(2)
        .map(|e| {
            rule.integrate(e[0], e[1], |v| {
                let (l, w) = sample(v);
                w * l.powu(j as u32)
            })
        })
        .sum())
}

/// Damped de Bruijn kernel `K_{ij}` (1-based) on the real axis.
pub fn damped_debruijn_kernel(i: usize, j: usize, omega: f64, eta: f64) -> Result<Complex64> {
    if i == 0 || j == 0 {
        return Err(domain("damped_debruijn_kernel", "indices are 1-based"));
    }
    let dim = i.max(j);
    let path = RealAxisPath::new(1.0, omega, eta, dim)?;
    let rule = gauss_legendre_rule(DAMPED_ORDER)?;
    let k = kernel_matrix(dim, &path.edges, &rule, damped_sample(omega, eta));
    Ok(k[i - 1][j - 1])
}

/// Richardson extrapolation to `η = 0` from three values on a halving ladder.
///
/// Returns the extrapolated value and the gap to the two-point extrapolation
/// from the two smallest `η` as an error estimate.
pub fn richardson_eta(values: [Complex64; 3]) -> OracleValue {
    let [a, b, c] = values;
    let three = a / 3.0 - b * 2.0 + c * (8.0 / 3.0);
    let two = c * 2.0 - b;
    OracleValue {
        value: three,
        error: (three - two).norm(),
    }
}

fn check_ladder(ladder: &[f64; 3]) -> Result<()> {
    let ok = ladder.iter().all(|&e| e > 0.0)
        && (ladder[1] / ladder[0] - 0.5).abs() < 1e-12
        && (ladder[2] / ladder[1] - 0.5).abs() < 1e-12;
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!("eta ladder {ladder:?} must halve at each step")))
    }
}

/// `F_j(λ₀)` extrapolated from a halving `η` ladder.
pub fn eta_extrapolated_partial(j: usize, omega: f64, start: f64, ladder: &[f64; 3]) -> Result<OracleValue> {
    check_ladder(ladder)?;
    let mut vals = [Complex64::new(0.0, 0.0); 3];
    for (slot, &eta) in vals.iter_mut().zip(ladder) {
        *slot = damped_half_line_partial(j, omega, eta, start)?;
    }
    Ok(richardson_eta(vals))
}

/// `K_{ij}(ω)` extrapolated from a halving `η` ladder.
pub fn eta_extrapolated_kernel(i: usize, j: usize, omega: f64, ladder: &[f64; 3]) -> Result<OracleValue> {
    check_ladder(ladder)?;
    let mut vals = [Complex64::new(0.0, 0.0); 3];
    for (slot, &eta) in vals.iter_mut().zip(ladder) {
        *slot = damped_debruijn_kernel(i, j, omega, eta)?;
    }
    Ok(richardson_eta(vals))
}
