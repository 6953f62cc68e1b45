//! Pfaff–KP equations and Virasoro constraints for `τ̂_{2m}(s; t)` at `t = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fd::{stencil, FdSampler, LEVELS};
use super::{EvalPoint, HierarchySettings, Identity, ResidualReport};
use crate::error::{domain, Error, Result};
use crate::partition::{tau, DeformationPoint, PartitionSettings};

/// Which Virasoro operator to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VirasoroForm {
    /// `L̂_{q+2} − L̂_q + s(∂_{q+3} − ∂_{q+1}) − (q+2)∂_{q+2}`.
    AsPrinted,
    /// The same plus `(q+1)∂_{t_q}`, which is what the change of variables
    /// `λ ↦ λ + ε(λ^{q+3} − λ^{q+1})` produces once the Jacobian of the
    /// weight is included.
    Reparametrization,
}

/// Roundoff in `log τ̂` assumed for the noise part of the budget.
const LOG_TAU_NOISE: f64 = 1e-15;

/// Two sides of an identity evaluated at every step level, coarsest first.
struct Levels {
    lhs: Vec<Complex64>,
    rhs: Vec<Complex64>,
}

fn evaluate_levels<F>(mut sides: F) -> Result<Levels>
where
    F: FnMut(u32) -> Result<(Complex64, Complex64)>,
{
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for level in (0..LEVELS).rev() {
        let (l, r) = sides(level)?;
        lhs.push(l);
        rhs.push(r);
    }
    Ok(Levels { lhs, rhs })
}

fn richardson(coarse: Complex64, fine: Complex64) -> Complex64 {
    (fine * 4.0 - coarse) / 3.0
}

/// Extrapolates, checks the step and builds the report.
fn finish(
    identity: Identity,
    point: EvalPoint,
    lv: Levels,
    max_order: u32,
    finest_step: f64,
    noise: f64,
    hs: &HierarchySettings,
) -> Result<ResidualReport> {
    let floor = hs.residual_floor;
    // level indices: 0 = h, 1 = h/2, 2 = h/4
    let scale1 = lv.lhs[1].norm() + lv.rhs[1].norm() + floor;
    let change = ((lv.lhs[0] - lv.lhs[1]).norm() + (lv.rhs[0] - lv.rhs[1]).norm()) / scale1;
    if change > hs.fd_step_tolerance {
        return Err(Error::StepTooLarge {
            change,
            tol: hs.fd_step_tolerance,
        });
    }
    let la = richardson(lv.lhs[0], lv.lhs[1]);
    let ra = richardson(lv.rhs[0], lv.rhs[1]);
    let lhs = richardson(lv.lhs[1], lv.lhs[2]);
    let rhs = richardson(lv.rhs[1], lv.rhs[2]);
    let scale = lhs.norm() + rhs.norm() + floor;
    let extrapolation = ((lhs - la).norm() + (rhs - ra).norm()) / scale;
    let abs_sum: f64 = stencil(max_order).iter().map(|c| c.1.abs()).sum();
    let roundoff = 2.0 * noise * abs_sum / finest_step.powi(max_order as i32) * (1.0 + lhs.norm()) / scale;
    let budget = hs.budget_factor * (extrapolation + roundoff);

    let raw_h = (lv.lhs[0] - lv.rhs[0]).norm();
    let raw_h2 = (lv.lhs[1] - lv.rhs[1]).norm();
    let order = if raw_h > 0.0 && raw_h2 > 0.0 {
        Some((raw_h / raw_h2).log2())
    } else {
        None
    };
    Ok(ResidualReport::new(identity, point, lhs, rhs, floor, budget, order))
}

fn check_m(m: i32) -> Result<()> {
    if m.abs() > 1 {
        return Err(domain("tau identity", format!("|m| = {} exceeds 1", m.abs())));
    }
    Ok(())
}

fn noise_for(m: i32, base: &DeformationPoint, ps: &PartitionSettings) -> Result<f64> {
    let v = tau(m, base, ps)?;
    Ok((v.error_estimate / v.to_complex().norm().max(f64::MIN_POSITIVE)).max(LOG_TAU_NOISE))
}

/// First Pfaff–KP equation
/// `(∂⁴₁ + 3∂²₂ − 4∂₁∂₃) log τ̂_{2m} + 6(∂²₁ log τ̂_{2m})² = 12 τ̂_{2m−2} τ̂_{2m+2} / τ̂²_{2m}`.
pub fn pfkp1_residual(m: i32, s: Complex64, hs: &HierarchySettings, ps: &PartitionSettings) -> Result<ResidualReport> {
    check_m(m)?;
    let base = DeformationPoint::new(s);
    let mut fd = FdSampler::new(m, base.clone(), hs.fd_step_pfkp, ps)?;
    let t0 = fd.tau0();
    let lower = tau(m - 1, &base, ps)?.to_complex();
    let upper = tau(m + 1, &base, ps)?.to_complex();
    let rhs = lower * upper / (t0 * t0) * 12.0;
    let lv = evaluate_levels(|l| {
        let f1111 = fd.derivative(&[(1, 4)], l)?;
        let f22 = fd.derivative(&[(2, 2)], l)?;
        let f13 = fd.derivative(&[(1, 1), (3, 1)], l)?;
        let f11 = fd.derivative(&[(1, 2)], l)?;
        Ok((f1111 + f22 * 3.0 - f13 * 4.0 + f11 * f11 * 6.0, rhs))
    })?;
    let noise = noise_for(m, &base, ps)?;
    let finest = fd.step(1, 0).norm();
    finish(
        Identity::PfKp1,
        EvalPoint {
            m: Some(m),
            s: Some(s),
            ..EvalPoint::default()
        },
        lv,
        4,
        finest,
        noise,
        hs,
    )
}

/// Second Pfaff–KP equation
/// `(∂³₁∂₂ − 3∂₁∂₄ + 2∂₂∂₃) log τ̂ + 6(∂²₁ log τ̂)(∂₁∂₂ log τ̂)
///   = 6 (τ̂_{2m−2} τ̂_{2m+2}/τ̂²_{2m}) ∂₁ log(τ̂_{2m+2}/τ̂_{2m−2})`.
pub fn pfkp2_residual(m: i32, s: Complex64, hs: &HierarchySettings, ps: &PartitionSettings) -> Result<ResidualReport> {
    check_m(m)?;
    let base = DeformationPoint::new(s);
    let mut fd = FdSampler::new(m, base.clone(), hs.fd_step_pfkp, ps)?;
    let mut fd_lo = FdSampler::new(m - 1, base.clone(), hs.fd_step_pfkp, ps)?;
    let mut fd_up = FdSampler::new(m + 1, base.clone(), hs.fd_step_pfkp, ps)?;
    let t0 = fd.tau0();
    let ratio = fd_lo.tau0() * fd_up.tau0() / (t0 * t0);
    let lv = evaluate_levels(|l| {
        let f1112 = fd.derivative(&[(1, 3), (2, 1)], l)?;
        let f14 = fd.derivative(&[(1, 1), (4, 1)], l)?;
        let f23 = fd.derivative(&[(2, 1), (3, 1)], l)?;
        let f11 = fd.derivative(&[(1, 2)], l)?;
        let f12 = fd.derivative(&[(1, 1), (2, 1)], l)?;
        let lhs = f1112 - f14 * 3.0 + f23 * 2.0 + f11 * f12 * 6.0;
        let d_up = fd_up.derivative(&[(1, 1)], l)?;
        let d_lo = fd_lo.derivative(&[(1, 1)], l)?;
        Ok((lhs, ratio * (d_up - d_lo) * 6.0))
    })?;
    let noise = noise_for(m, &base, ps)?;
    let finest = fd.step(1, 0).norm();
    finish(
        Identity::PfKp2,
        EvalPoint {
            m: Some(m),
            s: Some(s),
            ..EvalPoint::default()
        },
        lv,
        4,
        finest,
        noise,
        hs,
    )
}

/// Derivatives of `τ̂` divided by `τ̂` at one step level, with `∂_{t₀} = 2m`.
struct TauDerivatives<'s, 'a> {
    fd: &'s mut FdSampler<'a>,
    level: u32,
    two_m: f64,
}

impl TauDerivatives<'_, '_> {
    fn d1(&mut self, j: i32) -> Result<Complex64> {
        match j {
            j if j < 0 => Ok(Complex64::new(0.0, 0.0)),
            0 => Ok(Complex64::new(self.two_m, 0.0)),
            j => self.fd.derivative(&[(j as usize, 1)], self.level),
        }
    }

    fn d2(&mut self, j: i32, k: i32) -> Result<Complex64> {
        if j < 0 || k < 0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if j == 0 {
            return Ok(self.d1(k)? * self.two_m);
        }
        if k == 0 {
            return Ok(self.d1(j)? * self.two_m);
        }
        let fjk = if j == k {
            self.fd.derivative(&[(j as usize, 2)], self.level)?
        } else {
            self.fd.derivative(&[(j as usize, 1), (k as usize, 1)], self.level)?
        };
        Ok(fjk + self.d1(j)? * self.d1(k)?)
    }

    /// `L̂_p τ̂ / τ̂` at `t = 0`.
    fn virasoro_l(&mut self, p: i32) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..=p {
            acc += self.d2(j, p - j)?;
        }
        Ok(acc * 0.5 + self.d1(p)? * (0.5 * f64::from(p + 1)))
    }
}

/// Virasoro constraint `q ∈ {−1, 0, 1}` applied to `τ̂_{2m}` at `t = 0`,
/// reported as `lhs = [L̂_{q+2} − L̂_q (+ (q+1)∂_q)] τ̂/τ̂` against
/// `rhs = −[s(∂_{q+3} − ∂_{q+1}) − (q+2)∂_{q+2}] τ̂/τ̂`.
pub fn virasoro_residual(
    m: i32,
    q: i32,
    s: Complex64,
    form: VirasoroForm,
    hs: &HierarchySettings,
    ps: &PartitionSettings,
) -> Result<ResidualReport> {
    check_m(m)?;
    if !(-1..=1).contains(&q) {
        return Err(domain("virasoro_residual", format!("q = {q} outside [-1, 1]")));
    }
    let base = DeformationPoint::new(s);
    let mut fd = FdSampler::new(m, base.clone(), hs.fd_step_virasoro, ps)?;
    let two_m = 2.0 * f64::from(m);
    let lv = evaluate_levels(|level| {
        let mut d = TauDerivatives {
            fd: &mut fd,
            level,
            two_m,
        };
        let mut lhs = d.virasoro_l(q + 2)? - d.virasoro_l(q)?;
        if form == VirasoroForm::Reparametrization {
            lhs += d.d1(q)? * f64::from(q + 1);
        }
        let rhs = -(s * (d.d1(q + 3)? - d.d1(q + 1)?) - d.d1(q + 2)? * f64::from(q + 2));
        Ok((lhs, rhs))
    })?;
    let noise = noise_for(m, &base, ps)?;
    let finest = fd.step(1, 0).norm();
    let identity = match form {
        VirasoroForm::AsPrinted => Identity::Virasoro,
        VirasoroForm::Reparametrization => Identity::VirasoroReparametrized,
    };
    finish(
        identity,
        EvalPoint {
            m: Some(m),
            q: Some(q),
            s: Some(s),
            ..EvalPoint::default()
        },
        lv,
        2,
        finest,
        noise,
        hs,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_flavor_has_zero_virasoro_residual() {
        let hs = HierarchySettings::default();
        let ps = PartitionSettings::default();
        for q in -1..=1 {
            for form in [VirasoroForm::AsPrinted, VirasoroForm::Reparametrization] {
                let r = virasoro_residual(0, q, Complex64::new(0.0, -0.8), form, &hs, &ps).unwrap();
                assert_eq!(r.lhs, Complex64::new(0.0, 0.0));
                assert_eq!(r.rhs, Complex64::new(0.0, 0.0));
                assert!(r.pass);
            }
        }
    }

    #[test]
    fn rejects_out_of_range() {
        let hs = HierarchySettings::default();
        let ps = PartitionSettings::default();
        let s = Complex64::new(0.0, -0.8);
        assert!(virasoro_residual(2, 0, s, VirasoroForm::AsPrinted, &hs, &ps).is_err());
        assert!(virasoro_residual(1, 2, s, VirasoroForm::AsPrinted, &hs, &ps).is_err());
    }
}
