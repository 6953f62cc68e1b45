use std::f64::consts::PI;
use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::error::{domain, Result};

pub const MAX_RULE_ORDER: usize = 512;

/// Nodes and weights of a quadrature rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Iterator over `(x, w)` mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<T, F>(&self, a: f64, b: f64, mut f: F) -> T
    where
        T: Default + Add<Output = T> + Mul<f64, Output = T>,
        F: FnMut(f64) -> T,
    {
        self.mapped(a, b)
            .fold(T::default(), |acc, (x, w)| acc + f(x) * w)
    }
}

/// Gauss–Legendre rule of the given order on `[-1, 1]`, by Newton iteration
/// on the three-term Legendre recurrence.
pub fn gauss_legendre_rule(order: usize) -> Result<QuadratureRule> {
    if !(2..=MAX_RULE_ORDER).contains(&order) {
        return Err(domain(
            "gauss_legendre_rule",
            format!("order {order} outside [2, {MAX_RULE_ORDER}]"),
        ));
    }
    let n = order;
    let nf = n as f64;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, dpx) = legendre_with_derivative(n, x);
            dp = dpx;
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                dp = legendre_with_derivative(n, x).1;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x from the cosine guess is descending in i
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights })
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// μ_k(ω) = ∫_{-1}^{1} (1−λ²) λ^k e^{−iπωλ} dλ.
pub fn fermionic_moment(k: usize, omega: f64, rule: &QuadratureRule) -> Complex64 {
    let phase = Complex64::new(0.0, -PI * omega);
    fermionic_moments(k + 1, |l| phase * l, rule)[k]
}

/// All moments `∫ (1−λ²) λ^k e^{φ(λ)} dλ`, `k < count`, in a single sweep
/// over the rule.
pub fn fermionic_moments<F>(count: usize, exponent: F, rule: &QuadratureRule) -> Vec<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let mut out = vec![Complex64::new(0.0, 0.0); count];
    for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
        let base = exponent(x).exp() * ((1.0 - x * x) * w);
        let mut power = 1.0;
        for slot in out.iter_mut() {
            *slot += base * power;
            power *= x;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_rule() {
        let r = gauss_legendre_rule(2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((r.nodes()[0] + s).abs() < 1e-15);
        assert!((r.nodes()[1] - s).abs() < 1e-15);
        assert!((r.weights()[0] - 1.0).abs() < 1e-15);
        assert!((r.weights()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn order_bounds() {
        assert!(gauss_legendre_rule(1).is_err());
        assert!(gauss_legendre_rule(513).is_err());
        assert!(gauss_legendre_rule(512).is_ok());
    }

    #[test]
    fn weights_sum_and_nodes_sorted() {
        for n in [2, 3, 7, 16, 64, 129, 512] {
            let r = gauss_legendre_rule(n).unwrap();
            let sum: f64 = r.weights().iter().sum();
            assert!((sum - 2.0).abs() < 1e-13, "n={n} sum={sum}");
            assert!(r.weights().iter().all(|&w| w > 0.0));
            assert!(r.nodes().windows(2).all(|p| p[0] < p[1]));
            assert!(r.nodes()[0] > -1.0 && r.nodes()[n - 1] < 1.0);
        }
    }

    #[test]
    fn exact_for_top_monomials() {
        for n in [2, 5, 10, 20] {
            let r = gauss_legendre_rule(n).unwrap();
            let deg = 2 * n - 2;
            let got: f64 = r.integrate(-1.0, 1.0, |x| x.powi(deg as i32));
            let exact = 2.0 / (deg as f64 + 1.0);
            assert!((got - exact).abs() < 1e-12, "n={n}");
            let odd: f64 = r.integrate(-1.0, 1.0, |x| x.powi(2 * n as i32 - 1));
            assert!(odd.abs() < 1e-12);
        }
    }

    #[test]
    fn parabola_weight() {
        let r = gauss_legendre_rule(64).unwrap();
        let v: f64 = r.integrate(-1.0, 1.0, |x| 1.0 - x * x);
        assert!((v - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn moments_at_zero_frequency() {
        let r = gauss_legendre_rule(32).unwrap();
        assert!((fermionic_moment(0, 0.0, &r) - 4.0 / 3.0).norm() < 1e-14);
        assert!(fermionic_moment(1, 0.0, &r).norm() < 1e-15);
    }
}
