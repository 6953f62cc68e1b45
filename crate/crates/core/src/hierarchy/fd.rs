//! Central finite differences of `log τ̂_{2m}` in the deformation times.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::quadrature::{ExponentialWeight, HalfLineContour};
use crate::partition::{tau, DeformationPoint, PartitionSettings, MAX_DEFORMATION};

/// Second-order central stencil for the `k`-th derivative as
/// `(offset, weight)` pairs in units of the step.
pub fn stencil(k: u32) -> &'static [(i32, f64)] {
    match k {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        _ => panic!("no stencil for derivative order {k}"),
    }
}

/// Number of step levels: `h`, `h/2`, `h/4`.
pub const LEVELS: u32 = 3;

/// Evaluates `log(τ̂_{2m}(t)/τ̂_{2m}(t₀))` on a lattice around `t₀` and forms
/// mixed partial derivatives at step `h/2^level`.
///
/// On the bosonic side the step in `t_j` is `i·h·conj(d)^j / ρ_j`, where `d`
/// is the direction of the integration ray, so `e^{−t_j λ^j}` stays a pure
/// phase along the path, and `ρ_j = ⟨|λ|^{2j}⟩^{1/2}` under the undeformed
/// weight keeps `δ_j λ^j` of order `h` where the weight lives.
pub struct FdSampler<'a> {
    m: i32,
    base: DeformationPoint,
    unit: f64,
    dirs: Vec<Complex64>,
    tau0: Complex64,
    settings: &'a PartitionSettings,
    cache: HashMap<[i32; MAX_DEFORMATION], Complex64>,
}

impl<'a> FdSampler<'a> {
    pub fn new(m: i32, base: DeformationPoint, h: f64, settings: &'a PartitionSettings) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(domain("FdSampler", format!("step h = {h} must be finite and > 0")));
        }
        let tau0 = tau(m, &base, settings)?.to_complex();
        if tau0.norm() == 0.0 {
            return Err(domain("FdSampler", "tau vanishes at the base point"));
        }
        let d = if m < 0 {
            let s = base.s;
            if s.norm() == 0.0 {
                return Err(domain("FdSampler", "bosonic path needs s != 0"));
            }
            s.conj() / s.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let dirs = if m < 0 {
            let weight = ExponentialWeight {
                kappa: -base.s,
                poly: base.t.iter().map(|z| -z).collect(),
            };
            let path = HalfLineContour::for_weight(1.0, &weight, &settings.path)?;
            let moments = path.absolute_moments(&weight, 2 * MAX_DEFORMATION);
            (0..=MAX_DEFORMATION)
                .map(|j| Complex64::i() * d.conj().powu(j as u32) / moments[2 * j].sqrt().max(1.0))
                .collect()
        } else {
            vec![Complex64::new(1.0, 0.0); MAX_DEFORMATION + 1]
        };
        Ok(Self {
            m,
            base,
            unit: h / f64::from(1u32 << (LEVELS - 1)),
            dirs,
            tau0,
            settings,
            cache: HashMap::new(),
        })
    }

    pub fn tau0(&self) -> Complex64 {
        self.tau0
    }

    pub fn m(&self) -> i32 {
        self.m
    }

    /// Step in `t_j` at `level` (0 = finest).
    pub fn step(&self, j: usize, level: u32) -> Complex64 {
        self.dirs[j] * (self.unit * f64::from(1u32 << level))
    }

    fn log_ratio(&mut self, key: [i32; MAX_DEFORMATION]) -> Result<Complex64> {
        if self.m == 0 || key.iter().all(|&k| k == 0) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if let Some(v) = self.cache.get(&key) {
            return Ok(*v);
        }
        let mut p = self.base.clone();
        for (j, &k) in key.iter().enumerate() {
            if k != 0 {
                p = p.shifted(j + 1, self.dirs[j + 1] * (self.unit * f64::from(k)));
            }
        }
        let v = (tau(self.m, &p, self.settings)?.to_complex() / self.tau0).ln();
        self.cache.insert(key, v);
        Ok(v)
    }

    /// `∂^α log τ̂` with `alpha = [(j, k_j)]` (1-based times, distinct `j`).
    pub fn derivative(&mut self, alpha: &[(usize, u32)], level: u32) -> Result<Complex64> {
        if alpha.iter().any(|&(j, _)| j == 0 || j > MAX_DEFORMATION) {
            return Err(domain("FdSampler", "derivative index outside [1, K]"));
        }
        let spacing = 1i32 << level;
        let stencils: Vec<&[(i32, f64)]> = alpha.iter().map(|&(_, k)| stencil(k)).collect();
        let mut idx = vec![0usize; alpha.len()];
        let mut acc = Complex64::new(0.0, 0.0);
        'outer: loop {
            let mut key = [0i32; MAX_DEFORMATION];
            let mut w = 1.0;
            for (a, &(j, _)) in alpha.iter().enumerate() {
                let (off, c) = stencils[a][idx[a]];
                key[j - 1] += off * spacing;
                w *= c;
            }
            acc += self.log_ratio(key)? * w;
            for a in 0..alpha.len() {
                idx[a] += 1;
                if idx[a] < stencils[a].len() {
                    continue 'outer;
                }
                idx[a] = 0;
            }
            break;
        }
        let mut denom = Complex64::new(1.0, 0.0);
        for &(j, k) in alpha {
            denom *= self.step(j, level).powu(k);
        }
        Ok(acc / denom)
    }
}
