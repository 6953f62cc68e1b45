//! The Pfaff–KP recursion linking `ẑ_{n−1}`, `ẑ_n`, `ẑ_{n+1}`:
//!
//! `(∂³ − (2n/ω)∂² + (2n/ω²)∂) log ẑ_n + 2 (∂ log ẑ_n)(∂² log ẑ_n)
//!   = π⁴ n² (2n+1) ω (ẑ_{n−1} ẑ_{n+1} / ẑ_n²) (4n + ω ∂ log(ẑ_{n+1}/ẑ_{n−1}))`.
//!
//! The right-hand side is evaluated with the logarithm cleared, so zeros of
//! the neighbors are regular points.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::chebyshev::{lobatto_nodes, ChebyshevFit};
use super::{EvalPoint, HierarchySettings, Identity, ResidualReport};
use crate::error::{domain, Error, Result};
use crate::partition::{z_super, PartitionSettings, ReplicaIndex};

/// Chebyshev fits of `log ẑ_n` at the coarse degree and at twice that.
#[derive(Debug, Clone)]
pub struct LogZFit {
    pub n: i32,
    pub coarse: ChebyshevFit,
    pub fine: ChebyshevFit,
    /// Largest relative quadrature error estimate over the samples.
    pub max_relative_error: f64,
    /// Largest discrepancy between the fitted first derivative and central
    /// differences at five interior points, relative to `1 + |∂ log ẑ|`.
    pub fd_discrepancy: f64,
}

struct Sampled {
    values: Vec<Complex64>,
    max_relative_error: f64,
}

fn sample(n: ReplicaIndex, nodes: &[f64], settings: &PartitionSettings) -> Result<Sampled> {
    let vals: Vec<(Complex64, f64)> = nodes
        .par_iter()
        .map(|&w| {
            let v = z_super(n, w, settings)?;
            let z = v.to_complex();
            Ok((z, v.error_estimate / z.norm().max(f64::MIN_POSITIVE)))
        })
        .collect::<Result<_>>()?;
    Ok(Sampled {
        max_relative_error: vals.iter().map(|v| v.1).fold(0.0, f64::max),
        values: vals.into_iter().map(|v| v.0).collect(),
    })
}

/// Index pairs of consecutive samples between which the function crosses
/// zero: a sign change for real-valued samples, a phase jump above π/2
/// otherwise.
fn crossings(values: &[Complex64]) -> Vec<usize> {
    let real = values.iter().all(|z| z.im == 0.0);
    (0..values.len().saturating_sub(1))
        .filter(|&k| {
            let (a, b) = (values[k], values[k + 1]);
            if a.norm() == 0.0 || b.norm() == 0.0 {
                return true;
            }
            if real {
                a.re.signum() != b.re.signum()
            } else {
                (b / a).arg().abs() > 0.5 * PI
            }
        })
        .collect()
}

fn unwrapped_log(values: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(values.len());
    let mut phase = values[0].arg();
    out.push(Complex64::new(values[0].norm().ln(), phase));
    for k in 1..values.len() {
        phase += (values[k] / values[k - 1]).arg();
        out.push(Complex64::new(values[k].norm().ln(), phase));
    }
    out
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(0.0 < a && a < b && b.is_finite()) {
        return Err(domain("interval", format!("[{a}, {b}] must satisfy 0 < a < b")));
    }
    Ok(())
}

/// Spectral fit of `log ẑ_n` on `[a, b]` with a degree-doubling refinement
/// and a finite-difference cross-check.
pub fn fit_log_z(
    n: ReplicaIndex,
    interval: (f64, f64),
    degree: usize,
    hs: &HierarchySettings,
    ps: &PartitionSettings,
) -> Result<LogZFit> {
    let (a, b) = interval;
    check_interval(a, b)?;
    if degree < 4 || 2 * degree > super::MAX_FIT_DEGREE {
        return Err(domain("fit_log_z", format!("degree {degree} outside [4, {}]", super::MAX_FIT_DEGREE / 2)));
    }
    if n.get() == 0 {
        return Ok(LogZFit {
            n: 0,
            coarse: ChebyshevFit::zero(a, b),
            fine: ChebyshevFit::zero(a, b),
            max_relative_error: 0.0,
            fd_discrepancy: 0.0,
        });
    }
    let nodes = lobatto_nodes(a, b, 2 * degree);
    let s = sample(n, &nodes, ps)?;
    if let Some(&k) = crossings(&s.values).first() {
        return Err(Error::ZeroCrossing {
            what: format!("z_{}", n.get()),
            omega: 0.5 * (nodes[k] + nodes[k + 1]),
        });
    }
    let logs = unwrapped_log(&s.values);
    let fine = ChebyshevFit::from_samples(a, b, &logs)?;
    let coarse_samples: Vec<Complex64> = logs.iter().step_by(2).copied().collect();
    let coarse = ChebyshevFit::from_samples(a, b, &coarse_samples)?;
    coarse.check_resolved(hs.fit_tail_tolerance)?;

    let h = 1e-3 * (b - a);
    let probes: Vec<f64> = (1..=5).map(|i| a + (b - a) * i as f64 / 6.0).collect();
    let fd_discrepancy = probes
        .par_iter()
        .map(|&w| {
            let up = z_super(n, w + h, ps)?.to_complex();
            let down = z_super(n, w - h, ps)?.to_complex();
            let fd = (up / down).ln() / (2.0 * h);
            Ok((fine.derivative(1, w) - fd).norm() / (1.0 + fd.norm()))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    Ok(LogZFit {
        n: n.get(),
        coarse,
        fine,
        max_relative_error: s.max_relative_error,
        fd_discrepancy,
    })
}

/// Zeros of `ẑ_n` in `[a, b]`, located by sign or phase monitoring on a
/// uniform grid and refined by bisection.
pub fn locate_zeros(n: ReplicaIndex, interval: (f64, f64), grid: usize, ps: &PartitionSettings) -> Result<Vec<f64>> {
    let (a, b) = interval;
    check_interval(a, b)?;
    if n.get() == 0 {
        return Ok(Vec::new());
    }
    let grid = grid.max(2);
    let nodes: Vec<f64> = (0..=grid).map(|k| a + (b - a) * k as f64 / grid as f64).collect();
    let s = sample(n, &nodes, ps)?;
    let mut zeros = Vec::new();
    for k in crossings(&s.values) {
        let (mut lo, mut hi) = (nodes[k], nodes[k + 1]);
        let (mut zlo, _) = (s.values[k], s.values[k + 1]);
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            let zm = z_super(n, mid, ps)?.to_complex();
            if crossings(&[zlo, zm]).is_empty() {
                lo = mid;
                zlo = zm;
            } else {
                hi = mid;
            }
        }
        zeros.push(0.5 * (lo + hi));
    }
    Ok(zeros)
}

/// The longest subinterval of `[a, b]` free of zeros of `ẑ_n`, shrunk by
/// `margin` on every side that borders a zero. Returns it with the zeros.
pub fn zero_free_interval(
    n: ReplicaIndex,
    interval: (f64, f64),
    margin: f64,
    ps: &PartitionSettings,
) -> Result<((f64, f64), Vec<f64>)> {
    let zeros = locate_zeros(n, interval, 200, ps)?;
    let (a, b) = interval;
    let mut cuts = vec![(a, false)];
    cuts.extend(zeros.iter().map(|&z| (z, true)));
    cuts.push((b, false));
    let best = cuts
        .windows(2)
        .map(|w| {
            let lo = if w[0].1 { w[0].0 + margin } else { w[0].0 };
            let hi = if w[1].1 { w[1].0 - margin } else { w[1].0 };
            (lo, hi)
        })
        .filter(|(lo, hi)| hi > lo)
        .max_by(|x, y| (x.1 - x.0).total_cmp(&(y.1 - y.0)))
        .ok_or_else(|| domain("zero_free_interval", "no zero-free subinterval remains"))?;
    Ok((best, zeros))
}

struct ValueFits {
    coarse: ChebyshevFit,
    fine: ChebyshevFit,
    max_relative_error: f64,
}

fn fit_values(n: ReplicaIndex, a: f64, b: f64, degree: usize, ps: &PartitionSettings) -> Result<ValueFits> {
    let nodes = lobatto_nodes(a, b, 2 * degree);
    let s = sample(n, &nodes, ps)?;
    let coarse_samples: Vec<Complex64> = s.values.iter().step_by(2).copied().collect();
    Ok(ValueFits {
        coarse: ChebyshevFit::from_samples(a, b, &coarse_samples)?,
        fine: ChebyshevFit::from_samples(a, b, &s.values)?,
        max_relative_error: s.max_relative_error,
    })
}

/// Prepared fits for checking the recursion at one `n` over an interval.
pub struct RecursionCheck {
    n: i32,
    interval: (f64, f64),
    gauge: f64,
    log_fit: LogZFit,
    neighbors: Option<(ValueFits, ValueFits)>,
    quadrature_error: f64,
    floor: f64,
    budget_factor: f64,
}

impl RecursionCheck {
    /// Fits `log ẑ_n` and the neighbors `ẑ_{n±1}` on `interval`. A gauge
    /// factor `b ≠ 1` rescales both neighbors, which multiplies the
    /// right-hand side by `b²`.
    pub fn prepare(
        n: ReplicaIndex,
        interval: (f64, f64),
        gauge: f64,
        hs: &HierarchySettings,
        ps: &PartitionSettings,
    ) -> Result<Self> {
        let (a, b) = interval;
        let k = n.get();
        let log_fit = fit_log_z(n, interval, hs.fit_degree, hs, ps)?;
        let neighbors = if k == 0 {
            None
        } else {
            let lower = fit_values(ReplicaIndex::new(k - 1)?, a, b, hs.fit_degree, ps)?;
            let upper = fit_values(ReplicaIndex::new(k + 1)?, a, b, hs.fit_degree, ps)?;
            Some((lower, upper))
        };
        let quadrature_error = match &neighbors {
            None => 0.0,
            Some((lo, up)) => log_fit.max_relative_error + lo.max_relative_error + up.max_relative_error,
        };
        Ok(Self {
            n: k,
            interval,
            gauge,
            log_fit,
            neighbors,
            quadrature_error,
            floor: hs.residual_floor,
            budget_factor: hs.budget_factor,
        })
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn log_fit(&self) -> &LogZFit {
        &self.log_fit
    }

    fn sides(&self, omega: f64, fine: bool) -> (Complex64, Complex64) {
        let nf = f64::from(self.n);
        let fit = if fine { &self.log_fit.fine } else { &self.log_fit.coarse };
        let l1 = fit.derivative(1, omega);
        let l2 = fit.derivative(2, omega);
        let l3 = fit.derivative(3, omega);
        let lhs = l3 - l2 * (2.0 * nf / omega) + l1 * (2.0 * nf / (omega * omega)) + l1 * l2 * 2.0;
        let rhs = match &self.neighbors {
            None => Complex64::new(0.0, 0.0),
            Some((lo, up)) => {
                let (lo, up) = if fine { (&lo.fine, &up.fine) } else { (&lo.coarse, &up.coarse) };
                let zl = lo.value(omega) * self.gauge;
                let zu = up.value(omega) * self.gauge;
                let dl = lo.derivative(1, omega) * self.gauge;
                let du = up.derivative(1, omega) * self.gauge;
                let zn2 = (fit.value(omega) * 2.0).exp();
                let pre = PI.powi(4) * nf * nf * (2.0 * nf + 1.0) * omega;
                (zl * zu * (4.0 * nf) + (zl * du - zu * dl) * omega) * pre / zn2
            }
        };
        (lhs, rhs)
    }

    /// Residual at `omega` inside the fitted interval.
    pub fn residual(&self, omega: f64) -> Result<ResidualReport> {
        let (a, b) = self.interval;
        if !(a <= omega && omega <= b) {
            return Err(domain("pfkp_residual", format!("omega = {omega} outside [{a}, {b}]")));
        }
        let (lhs, rhs) = self.sides(omega, true);
        let (lc, rc) = self.sides(omega, false);
        let scale = lhs.norm() + rhs.norm() + self.floor;
        let refinement = ((lhs - lc).norm() + (rhs - rc).norm()) / scale;
        let budget = self.budget_factor * (refinement + self.quadrature_error);
        Ok(ResidualReport::new(
            Identity::PfaffKp,
            EvalPoint {
                n: Some(self.n),
                omega: Some(omega),
                ..EvalPoint::default()
            },
            lhs,
            rhs,
            self.floor,
            budget,
            None,
        ))
    }
}

/// One-point convenience wrapper: fits on `[0.8ω, 1.2ω]`.
pub fn pfkp_residual(
    n: ReplicaIndex,
    omega: f64,
    hs: &HierarchySettings,
    ps: &PartitionSettings,
) -> Result<ResidualReport> {
    if !(omega > 0.0) {
        return Err(domain("pfkp_residual", format!("omega = {omega} must be > 0")));
    }
    RecursionCheck::prepare(n, (0.8 * omega, 1.2 * omega), 1.0, hs, ps)?.residual(omega)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_detection() {
        let c = |x: f64| Complex64::new(x, 0.0);
        assert_eq!(crossings(&[c(1.0), c(0.5), c(-0.2)]), vec![1]);
        let p = |t: f64| Complex64::from_polar(1.0, t);
        assert!(crossings(&[p(0.0), p(0.3), p(0.6)]).is_empty());
        assert_eq!(crossings(&[p(0.0), p(2.0)]), vec![0]);
    }

    #[test]
    fn unwrap_follows_phase() {
        let vals: Vec<Complex64> = (0..20).map(|k| Complex64::from_polar(2.0, 0.5 * k as f64)).collect();
        let logs = unwrapped_log(&vals);
        assert!((logs[19].im - 9.5).abs() < 1e-12);
    }

    #[test]
    fn replica_zero_is_trivial() {
        let r = pfkp_residual(
            ReplicaIndex::new(0).unwrap(),
            0.7,
            &HierarchySettings::default(),
            &PartitionSettings::default(),
        )
        .unwrap();
        assert_eq!(r.lhs, Complex64::new(0.0, 0.0));
        assert_eq!(r.rhs, Complex64::new(0.0, 0.0));
        assert_eq!(r.normalized_residual, 0.0);
        assert!(r.pass);
    }
}
