//! Dense linear algebra: Pfaffians of complex skew-symmetric matrices in
//! log-scaled form, LU determinants and a real symmetric eigensolver.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Div, Mul, Neg};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A complex number stored as `(ln|z|, arg z)`; zero has `log_magnitude = −∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogScaledComplex {
    pub log_magnitude: f64,
    /// Phase in `(−π, π]`.
    pub phase: f64,
}

fn wrap_phase(p: f64) -> f64 {
    let mut q = p.rem_euclid(2.0 * PI);
    if q > PI {
        q -= 2.0 * PI;
    }
    if q <= -PI {
        q += 2.0 * PI;
    }
    q
}

impl LogScaledComplex {
    pub const ZERO: Self = Self {
        log_magnitude: f64::NEG_INFINITY,
        phase: 0.0,
    };
    pub const ONE: Self = Self {
        log_magnitude: 0.0,
        phase: 0.0,
    };

    pub fn new(log_magnitude: f64, phase: f64) -> Self {
        if log_magnitude == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        Self {
            log_magnitude,
            phase: wrap_phase(phase),
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z == Complex64::new(0.0, 0.0) {
            Self::ZERO
        } else {
            Self::new(z.norm().ln(), z.arg())
        }
    }

    pub fn from_real(x: f64) -> Self {
        Self::from_complex(Complex64::new(x, 0.0))
    }

    pub fn to_complex(self) -> Complex64 {
        let r = self.log_magnitude.exp();
        if self.is_zero() {
            Complex64::new(0.0, 0.0)
        } else if self.phase.abs() == PI {
            // sin(π) is not zero in floating point; keep negative reals real
            Complex64::new(-r, 0.0)
        } else {
            Complex64::from_polar(r, self.phase)
        }
    }

    pub fn is_zero(self) -> bool {
        self.log_magnitude == f64::NEG_INFINITY
    }

    pub fn abs(self) -> f64 {
        self.log_magnitude.exp()
    }

    pub fn powi(self, k: i32) -> Self {
        if self.is_zero() {
            return if k == 0 { Self::ONE } else { Self::ZERO };
        }
        Self::new(self.log_magnitude * f64::from(k), self.phase * f64::from(k))
    }

    pub fn scale(self, factor: f64) -> Self {
        self * Self::from_real(factor)
    }
}

impl Mul for LogScaledComplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.log_magnitude + rhs.log_magnitude, self.phase + rhs.phase)
    }
}

impl Div for LogScaledComplex {
    type Output = Self;
    /// Division by the zero sentinel yields `+∞` magnitude.
    fn div(self, rhs: Self) -> Self {
        if self.is_zero() {
            return Self::ZERO;
        }
        Self::new(self.log_magnitude - rhs.log_magnitude, self.phase - rhs.phase)
    }
}

impl Neg for LogScaledComplex {
    type Output = Self;
    fn neg(self) -> Self {
        if self.is_zero() {
            self
        } else {
            Self::new(self.log_magnitude, self.phase + PI)
        }
    }
}

impl fmt::Display for LogScaledComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.to_complex();
        write!(f, "{:.12e}{:+.12e}i", z.re, z.im)
    }
}

/// Dense complex skew-symmetric matrix of even dimension, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

/// Relative tolerance for `A_ij = −A_ji`.
pub const SKEW_TOLERANCE: f64 = 1e-13;
/// Pivots below this multiple of the largest entry count as zero.
pub const PIVOT_THRESHOLD: f64 = 1e-13;
pub const MAX_PFAFFIAN_DIM: usize = 64;

impl SkewMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim % 2 == 1 {
            return Err(Error::InvalidMatrix(format!("odd dimension {dim}")));
        }
        if dim > MAX_PFAFFIAN_DIM {
            return Err(Error::InvalidMatrix(format!("dimension {dim} exceeds {MAX_PFAFFIAN_DIM}")));
        }
        if entries.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "{} entries for dimension {dim}",
                entries.len()
            )));
        }
        for i in 0..dim {
            if entries[i * dim + i].norm() > 0.0 {
                return Err(Error::InvalidMatrix(format!("nonzero diagonal entry at {i}")));
            }
            for j in 0..i {
                let a = entries[i * dim + j];
                let b = entries[j * dim + i];
                let big = a.norm().max(b.norm());
                if (a + b).norm() > SKEW_TOLERANCE * big {
                    return Err(Error::InvalidMatrix(format!("not skew-symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidMatrix("rows of unequal length".into()));
        }
        Self::new(dim, rows.iter().flatten().copied().collect())
    }

    /// Builds from the strict upper triangle `f(i, j)`, `i < j`.
    pub fn from_upper<F: Fn(usize, usize) -> Complex64>(dim: usize, f: F) -> Result<Self> {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in i + 1..dim {
                let v = f(i, j);
                entries[i * dim + j] = v;
                entries[j * dim + i] = -v;
            }
        }
        Self::new(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Simultaneous swap of rows and columns `a` and `b`.
    pub fn swap_pair(&mut self, a: usize, b: usize) {
        swap_pair(&mut self.entries, self.dim, a, b);
    }
}

fn swap_pair(m: &mut [Complex64], n: usize, a: usize, b: usize) {
    if a == b {
        return;
    }
    for c in 0..n {
        m.swap(a * n + c, b * n + c);
    }
    for r in 0..n {
        m.swap(r * n + a, r * n + b);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pfaffian {
    pub value: LogScaledComplex,
    /// Set when elimination met a pivot below the threshold.
    pub degenerate: bool,
}

/// Pfaffian by skew-symmetric Gaussian elimination with partial pivoting.
pub fn pfaffian(a: &SkewMatrix) -> Pfaffian {
    let n = a.dim;
    if n == 0 {
        return Pfaffian {
            value: LogScaledComplex::ONE,
            degenerate: false,
        };
    }
    let mut m = a.entries.clone();
    let max_entry = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let threshold = PIVOT_THRESHOLD * max_entry;
    let mut log_mag = 0.0;
    let mut phase = 0.0;
    for k in (0..n - 1).step_by(2) {
        let (kp, best) = (k + 1..n)
            .map(|i| (i, m[i * n + k].norm()))
            .fold((k + 1, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if kp != k + 1 {
            swap_pair(&mut m, n, k + 1, kp);
            phase += PI;
        }
        if best <= threshold || best == 0.0 {
            return Pfaffian {
                value: LogScaledComplex::ZERO,
                degenerate: max_entry > 0.0,
            };
        }
        let pivot = m[k * n + k + 1];
        log_mag += pivot.norm().ln();
        phase += pivot.arg();
        if k + 2 < n {
            let tau: Vec<Complex64> = (k + 2..n).map(|c| m[k * n + c] / pivot).collect();
            let col: Vec<Complex64> = (k + 2..n).map(|r| m[r * n + k + 1]).collect();
            for (ri, r) in (k + 2..n).enumerate() {
                for (ci, c) in (k + 2..n).enumerate() {
                    m[r * n + c] += tau[ri] * col[ci] - col[ri] * tau[ci];
                }
            }
        }
    }
    Pfaffian {
        value: LogScaledComplex::new(log_mag, phase),
        degenerate: false,
    }
}

/// Determinant of a dense complex `n × n` matrix by LU with partial pivoting.
pub fn determinant(n: usize, entries: &[Complex64]) -> Result<LogScaledComplex> {
    if entries.len() != n * n {
        return Err(Error::InvalidMatrix(format!("{} entries for dimension {n}", entries.len())));
    }
    let mut m = entries.to_vec();
    let mut det = LogScaledComplex::ONE;
    for k in 0..n {
        let (p, best) = (k..n)
            .map(|i| (i, m[i * n + k].norm()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best == 0.0 {
            return Ok(LogScaledComplex::ZERO);
        }
        if p != k {
            for c in 0..n {
                m.swap(k * n + c, p * n + c);
            }
            det = -det;
        }
        let pivot = m[k * n + k];
        det = det * LogScaledComplex::from_complex(pivot);
        for r in k + 1..n {
            let f = m[r * n + k] / pivot;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in k + 1..n {
                let upper = m[k * n + c];
                m[r * n + c] -= f * upper;
            }
        }
    }
    Ok(det)
}

/// Dense real symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

pub const MAX_EIGEN_DIM: usize = 2048;
const QL_MAX_SWEEPS: usize = 60;

impl SymMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::InvalidMatrix(format!("{} entries for dimension {n}", data.len())));
        }
        for i in 0..n {
            for j in 0..i {
                if data[i * n + j] != data[j * n + i] {
                    return Err(Error::InvalidMatrix(format!("not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut data = vec![0.0; n * n];
        for (i, &v) in values.iter().enumerate() {
            data[i * n + i] = v;
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }
}

/// All eigenvalues in ascending order: Householder reduction to tridiagonal
/// form followed by implicit-shift QL.
pub fn sym_eigenvalues(h: &SymMatrix) -> Result<Vec<f64>> {
    let n = h.n;
    if n > MAX_EIGEN_DIM {
        return Err(Error::InvalidMatrix(format!("dimension {n} exceeds {MAX_EIGEN_DIM}")));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let (mut d, mut e) = tridiagonalize(h.data.clone(), n);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Returns the diagonal and subdiagonal (`e[i]` couples `i−1` and `i`).
fn tridiagonalize(mut a: Vec<f64>, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let row = i * n;
        if l > 0 {
            let scale: f64 = a[row..row + l + 1].iter().map(|x| x.abs()).sum();
            if scale == 0.0 {
                e[i] = a[row + l];
                continue;
            }
            let mut h = 0.0;
            for k in 0..=l {
                a[row + k] /= scale;
                h += a[row + k] * a[row + k];
            }
            let f = a[row + l];
            let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
            e[i] = scale * g;
            h -= f * g;
            a[row + l] = f - g;
            let mut f = 0.0;
            for j in 0..=l {
                let mut g = 0.0;
                for k in 0..=j {
                    g += a[j * n + k] * a[row + k];
                }
                for k in j + 1..=l {
                    g += a[k * n + j] * a[row + k];
                }
                e[j] = g / h;
                f += e[j] * a[row + j];
            }
            let hh = f / (h + h);
            for j in 0..=l {
                let f = a[row + j];
                let g = e[j] - hh * f;
                e[j] = g;
                for k in 0..=j {
                    a[j * n + k] -= f * e[k] + g * a[row + k];
                }
            }
        } else {
            e[i] = a[row + l];
        }
    }
    e[0] = 0.0;
    for i in 0..n {
        d[i] = a[i * n + i];
    }
    (d, e)
}

fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_SWEEPS {
                return Err(Error::EigenNonConvergence(QL_MAX_SWEEPS));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
