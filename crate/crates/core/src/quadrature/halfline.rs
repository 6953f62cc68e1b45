//! Half-line integrals against `e^{φ(λ)}/√(λ²−1)` on `[λ₀, ∞)`.
//!
//! The integration path is the ray `λ = λ₀ + d·u` with `d` the direction of
//! steepest decay of `e^{κλ}`; for the bosonic weight `κ = iπω/2` this is the
//! vertical ray, which realizes the `ω + i0` prescription exactly. The ray is
//! parameterized by `u = scale·v²`, which absorbs the inverse square root at
//! `λ₀ = 1` and turns the decay into `e^{−v²}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gauss::{gauss_legendre_rule, QuadratureRule};
use crate::error::{domain, Error, Result};

/// Exponent `φ(λ) = κλ + Σ_j c_j λ^j` of a half-line weight.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialWeight {
    pub kappa: Complex64,
    /// `poly[j-1]` multiplies `λ^j`.
    pub poly: Vec<Complex64>,
}

impl ExponentialWeight {
    /// The bosonic replica weight `e^{iπωλ/2}`.
    pub fn bosonic(omega: f64) -> Self {
        Self {
            kappa: Complex64::new(0.0, 0.5 * PI * omega),
            poly: Vec::new(),
        }
    }

    pub fn exponent(&self, lambda: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.poly.iter().rev() {
            acc = (acc + c) * lambda;
        }
        acc + self.kappa * lambda
    }

    /// Highest power carrying a nonzero coefficient, ignoring `κ`.
    fn leading(&self) -> Option<(usize, Complex64)> {
        self.poly
            .iter()
            .enumerate()
            .rev()
            .find(|(_, c)| c.norm() > 0.0)
            .map(|(j, c)| (j + 1, *c))
    }
}

/// Discretization of the rotated ray.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathSettings {
    /// Truncation of the path parameter; the weight has decayed by `e^{−v_max²}`.
    pub v_max: f64,
    pub panels: usize,
    pub nodes_per_panel: usize,
    /// Relative change tolerated when the panel count doubles.
    pub tolerance: f64,
}

impl Default for PathSettings {
    fn default() -> Self {
        Self {
            v_max: 7.0,
            panels: 32,
            nodes_per_panel: 24,
            tolerance: 1e-7,
        }
    }
}

/// The ray `λ = start + direction·u`, `u = scale·v²`, `v ∈ [0, v_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineContour {
    pub start: f64,
    pub direction: Complex64,
    pub scale: f64,
    pub v_max: f64,
    pub panels: usize,
    pub nodes_per_panel: usize,
}

impl HalfLineContour {
    /// Steepest-descent ray for `e^{κλ}` starting at `start >= 1`.
    pub fn for_weight(start: f64, weight: &ExponentialWeight, settings: &PathSettings) -> Result<Self> {
        if !(start >= 1.0) || !start.is_finite() {
            return Err(domain("HalfLineContour", format!("start {start} must be >= 1")));
        }
        let kappa = weight.kappa;
        let mag = kappa.norm();
        if !(mag > 0.0) || !mag.is_finite() {
            return Err(domain("HalfLineContour", "exponent has no linear decay term"));
        }
        let direction = -kappa.conj() / mag;
        // Rotations beyond the imaginary axis would cross the cut of √(λ²−1).
        if direction.re < -1e-14 {
            return Err(domain(
                "HalfLineContour",
                format!("exponent coefficient {kappa} grows on every admissible ray"),
            ));
        }
        let direction = Complex64::new(direction.re.max(0.0), direction.im);
        if let Some((degree, coeff)) = weight.leading() {
            // e^{c λ^K} along λ ≈ d u must not grow
            let lead = coeff * direction.powu(degree as u32);
            if lead.re > 1e-12 * coeff.norm() {
                return Err(Error::Inadmissible(format!(
                    "deformation coefficient {coeff} of λ^{degree} grows along direction {direction}"
                )));
            }
        }
        let scale = 1.0 / mag;
        // keep panels narrower than the distance to the branch point of the
        // regularized integrand, |v| = sqrt(2/scale)
        let limit = 0.5 * (2.0f64.max(start - 1.0) / scale).sqrt();
        let panels = settings
            .panels
            .max((settings.v_max / limit).ceil() as usize);
        Ok(Self {
            start,
            direction,
            scale,
            v_max: settings.v_max,
            panels,
            nodes_per_panel: settings.nodes_per_panel,
        })
    }

    pub fn u_max(&self) -> f64 {
        self.scale * self.v_max * self.v_max
    }

    pub fn refined(&self) -> Self {
        Self {
            panels: 2 * self.panels,
            ..self.clone()
        }
    }

    pub fn edges(&self) -> Vec<f64> {
        (0..=self.panels)
            .map(|k| self.v_max * k as f64 / self.panels as f64)
            .collect()
    }

    /// Point on the path and the weighted line element `e^{φ(λ)} (λ²−1)^{−1/2} dλ/dv`.
    pub fn sample(&self, weight: &ExponentialWeight, v: f64) -> (Complex64, Complex64) {
        let d = self.direction;
        let u = self.scale * v * v;
        let lambda = d * u + self.start;
        let e = weight.exponent(lambda).exp();
        let element = if self.start == 1.0 {
            // λ²−1 = d·scale·v²·(2 + d·u); the factor v cancels the Jacobian
            let root = (d * self.scale * (d * u + 2.0)).sqrt();
            e * d * (2.0 * self.scale) / root
        } else {
            let root = (lambda * lambda - 1.0).sqrt();
            e * d * (2.0 * self.scale * v) / root
        };
        (lambda, element)
    }
}

impl HalfLineContour {
    /// Normalized absolute moments `∫|λ|^k |w| / ∫|w|` for `k ≤ max_power`,
    /// from a trapezoid sweep along the path.
    pub fn absolute_moments(&self, weight: &ExponentialWeight, max_power: usize) -> Vec<f64> {
        const STEPS: usize = 4000;
        let dv = self.v_max / STEPS as f64;
        let mut acc = vec![0.0; max_power + 1];
        for k in 0..=STEPS {
            let v = k as f64 * dv;
            let (l, el) = self.sample(weight, v);
            let w = if k == 0 || k == STEPS { 0.5 } else { 1.0 } * el.norm();
            let r = l.norm();
            let mut p = w;
            for slot in acc.iter_mut() {
                *slot += p;
                p *= r;
            }
        }
        let total = acc[0];
        acc.iter().map(|a| a / total).collect()
    }
}

/// `K_{ij} = ∫∫ sgn(v'−v) λ(v)^i λ(v')^j W(v) W(v') dv dv'` for `i, j < dim`,
/// where `sample(v) = (λ(v), W(v))` and the order is along the path parameter.
///
/// Each inner tail `∫_v^{end}` is integrated exactly on the partial panel
/// with a mapped copy of `rule`, so the result converges spectrally for
/// smooth `W`.
pub fn kernel_matrix<F>(dim: usize, edges: &[f64], rule: &QuadratureRule, sample: F) -> Vec<Vec<Complex64>>
where
    F: Fn(f64) -> (Complex64, Complex64),
{
    let zero = Complex64::new(0.0, 0.0);
    let panels = edges.len() - 1;
    let powers = |lambda: Complex64, w: Complex64| -> Vec<Complex64> {
        let mut out = Vec::with_capacity(dim);
        let mut p = w;
        for _ in 0..dim {
            out.push(p);
            p *= lambda;
        }
        out
    };

    // node values and per-panel integrals
    let mut nodes: Vec<(usize, f64, f64, Vec<Complex64>)> = Vec::with_capacity(panels * rule.order());
    let mut panel_int = vec![vec![zero; dim]; panels];
    for p in 0..panels {
        for (x, w) in rule.mapped(edges[p], edges[p + 1]) {
            let (l, wt) = sample(x);
            let vals = powers(l, wt);
            for j in 0..dim {
                panel_int[p][j] += vals[j] * w;
            }
            nodes.push((p, x, w, vals));
        }
    }
    let mut after = vec![vec![zero; dim]; panels];
    for p in (0..panels.saturating_sub(1)).rev() {
        for j in 0..dim {
            after[p][j] = after[p + 1][j] + panel_int[p + 1][j];
        }
    }
    let total: Vec<Complex64> = (0..dim)
        .map(|j| panel_int.iter().map(|row| row[j]).sum())
        .collect();

    let mut k = vec![vec![zero; dim]; dim];
    for (p, x, w, vals) in &nodes {
        let mut tail = after[*p].clone();
        for (y, wy) in rule.mapped(*x, edges[p + 1]) {
            let (l, wt) = sample(y);
            let inner = powers(l, wt);
            for j in 0..dim {
                tail[j] += inner[j] * wy;
            }
        }
        for i in 0..dim {
            let outer = vals[i] * *w;
            for j in 0..dim {
                k[i][j] += outer * (tail[j] * 2.0 - total[j]);
            }
        }
    }
    k
}

fn max_norm(m: &[Vec<Complex64>]) -> f64 {
    m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Sign-kernel moment matrix `K_{ij}`, `i, j < dim` (powers `λ^i`), for a
/// half-line weight starting at `λ = 1`, with a panel-doubling check.
///
/// Returns the refined matrix and the observed relative change.
pub fn bosonic_kernel_matrix(
    dim: usize,
    weight: &ExponentialWeight,
    settings: &PathSettings,
) -> Result<(Vec<Vec<Complex64>>, f64)> {
    let path = HalfLineContour::for_weight(1.0, weight, settings)?;
    let rule = gauss_legendre_rule(settings.nodes_per_panel)?;
    let coarse = kernel_matrix(dim, &path.edges(), &rule, |v| path.sample(weight, v));
    let fine_path = path.refined();
    let fine = kernel_matrix(dim, &fine_path.edges(), &rule, |v| fine_path.sample(weight, v));
    let scale = max_norm(&fine).max(f64::MIN_POSITIVE);
    let change = coarse
        .iter()
        .flatten()
        .zip(fine.iter().flatten())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
        / scale;
    if change > settings.tolerance {
        return Err(Error::NonConvergence {
            what: "bosonic kernel matrix".into(),
            change,
            tol: settings.tolerance,
        });
    }
    Ok((fine, change))
}

/// De Bruijn kernel entry `K_{ij}(ω)` with 1-based indices (powers
/// `λ^{i−1}`, `μ^{j−1}`) for the bosonic weight.
pub fn bosonic_debruijn_kernel(i: usize, j: usize, omega: f64, settings: &PathSettings) -> Result<Complex64> {
    if i == 0 || j == 0 {
        return Err(domain("bosonic_debruijn_kernel", "indices are 1-based"));
    }
    if !(omega > 0.0) {
        return Err(domain("bosonic_debruijn_kernel", format!("omega = {omega} must be > 0")));
    }
    let (k, _) = bosonic_kernel_matrix(i.max(j), &ExponentialWeight::bosonic(omega), settings)?;
    Ok(k[i - 1][j - 1])
}

/// `F_j(λ₀) = ∫_{λ₀}^∞ λ^j e^{φ(λ)} (λ²−1)^{−1/2} dλ` along the rotated ray.
pub fn bosonic_half_line_partial(
    j: usize,
    weight: &ExponentialWeight,
    start: f64,
    settings: &PathSettings,
) -> Result<Complex64> {
    let path = HalfLineContour::for_weight(start, weight, settings)?;
    let rule = gauss_legendre_rule(settings.nodes_per_panel)?;
    let integrate = |path: &HalfLineContour| -> Complex64 {
        let edges = path.edges();
        edges
            .windows(2)
            .map(|e| {
                rule.integrate(e[0], e[1], |v| {
                    let (l, w) = path.sample(weight, v);
                    w * l.powu(j as u32)
                })
            })
            .sum()
    };
    let coarse = integrate(&path);
    let fine = integrate(&path.refined());
    let change = (coarse - fine).norm() / fine.norm().max(f64::MIN_POSITIVE);
    if change > settings.tolerance && (coarse - fine).norm() > settings.tolerance {
        return Err(Error::NonConvergence {
            what: format!("half-line partial F_{j}({start})"),
            change,
            tol: settings.tolerance,
        });
    }
    Ok(fine)
}
