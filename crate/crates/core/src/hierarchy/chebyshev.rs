use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

pub const MAX_FIT_DEGREE: usize = 256;

/// Chebyshev–Lobatto points `ω_k`, `k = 0..=degree`, on `[a, b]` (descending).
pub fn lobatto_nodes(a: f64, b: f64, degree: usize) -> Vec<f64> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (0..=degree)
        .map(|k| mid + half * (PI * k as f64 / degree as f64).cos())
        .collect()
}

/// Chebyshev expansion of a complex function on `[a, b]` with its first
/// three derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevFit {
    a: f64,
    b: f64,
    coeffs: Vec<Complex64>,
    derivs: [Vec<Complex64>; 3],
}

impl ChebyshevFit {
    /// Interpolant through samples at `lobatto_nodes(a, b, samples.len() − 1)`.
    pub fn from_samples(a: f64, b: f64, samples: &[Complex64]) -> Result<Self> {
        if !(0.0 < a && a < b && b.is_finite()) {
            return Err(domain("ChebyshevFit", format!("interval [{a}, {b}] must satisfy 0 < a < b")));
        }
        let n = samples.len().saturating_sub(1);
        if !(1..=MAX_FIT_DEGREE).contains(&n) {
            return Err(domain("ChebyshevFit", format!("degree {n} outside [1, {MAX_FIT_DEGREE}]")));
        }
        let nf = n as f64;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        for (j, c) in coeffs.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, f) in samples.iter().enumerate() {
                let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                acc += f * (w * (PI * (j * k) as f64 / nf).cos());
            }
            *c = acc * (2.0 / nf);
        }
        coeffs[0] *= 0.5;
        coeffs[n] *= 0.5;
        let d1 = differentiate(&coeffs, a, b);
        let d2 = differentiate(&d1, a, b);
        let d3 = differentiate(&d2, a, b);
        Ok(Self {
            a,
            b,
            coeffs,
            derivs: [d1, d2, d3],
        })
    }

    /// Identically zero on `[a, b]`.
    pub fn zero(a: f64, b: f64) -> Self {
        let z = vec![Complex64::new(0.0, 0.0)];
        Self {
            a,
            b,
            coeffs: z.clone(),
            derivs: [z.clone(), z.clone(), z],
        }
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Largest of the last three coefficients relative to the largest one.
    pub fn tail_ratio(&self) -> f64 {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let n = self.coeffs.len();
        self.coeffs[n.saturating_sub(3)..]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
            / scale
    }

    pub fn check_resolved(&self, tol: f64) -> Result<()> {
        let ratio = self.tail_ratio();
        if ratio > tol {
            return Err(Error::Unresolved { ratio, tol });
        }
        Ok(())
    }

    pub fn value(&self, omega: f64) -> Complex64 {
        clenshaw(&self.coeffs, self.map(omega))
    }

    /// `order`-th derivative, `order ≤ 3`.
    pub fn derivative(&self, order: usize, omega: f64) -> Complex64 {
        match order {
            0 => self.value(omega),
            1..=3 => clenshaw(&self.derivs[order - 1], self.map(omega)),
            _ => panic!("derivative order {order} not supported"),
        }
    }

    fn map(&self, omega: f64) -> f64 {
        (2.0 * omega - self.a - self.b) / (self.b - self.a)
    }
}

fn differentiate(c: &[Complex64], a: f64, b: f64) -> Vec<Complex64> {
    let n = c.len() - 1;
    if n == 0 {
        return vec![Complex64::new(0.0, 0.0)];
    }
    let mut d = vec![Complex64::new(0.0, 0.0); n + 1];
    for j in (1..=n).rev() {
        let next = if j < n { d[j + 1] } else { Complex64::new(0.0, 0.0) };
        d[j - 1] = next + c[j] * (2.0 * j as f64);
    }
    d[0] *= 0.5;
    d.truncate(n);
    let scale = 2.0 / (b - a);
    d.iter().map(|z| z * scale).collect()
}

fn clenshaw(c: &[Complex64], x: f64) -> Complex64 {
    let mut b1 = Complex64::new(0.0, 0.0);
    let mut b2 = Complex64::new(0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + b1 * (2.0 * x) - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + b1 * x - b2
}
