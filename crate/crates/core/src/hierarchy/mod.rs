//! Residual verifiers for the integrable structure of the replica family:
//! the Pfaff–KP recursion in `n`, the first two Pfaff–KP equations in the
//! deformation times and the Virasoro constraints.
//!
//! ω-derivatives come from Chebyshev fits of `log ẑ_n`; t-derivatives come
//! from central finite differences of `log τ̂` with Richardson extrapolation.

mod chebyshev;
mod fd;
mod recursion;
mod tau_identities;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use chebyshev::{lobatto_nodes, ChebyshevFit, MAX_FIT_DEGREE};
pub use fd::{stencil, FdSampler};
pub use recursion::{fit_log_z, locate_zeros, pfkp_residual, zero_free_interval, LogZFit, RecursionCheck};
pub use tau_identities::{pfkp1_residual, pfkp2_residual, virasoro_residual, VirasoroForm};

/// Numerical parameters of the hierarchy checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HierarchySettings {
    /// Chebyshev degree of the coarse fit; the refinement uses twice this.
    pub fit_degree: usize,
    /// Largest tolerated trailing-coefficient ratio.
    pub fit_tail_tolerance: f64,
    /// Base step of the Pfaff–KP finite differences; levels `h, h/2, h/4`.
    pub fd_step_pfkp: f64,
    /// Base step of the Virasoro finite differences.
    pub fd_step_virasoro: f64,
    /// Relative change between levels `h` and `h/2` above which the step is
    /// rejected as too large.
    pub fd_step_tolerance: f64,
    /// Safety factor applied to every error estimate.
    pub budget_factor: f64,
    /// Additive floor in the residual normalization.
    pub residual_floor: f64,
}

impl Default for HierarchySettings {
    fn default() -> Self {
        Self {
            fit_degree: 40,
            fit_tail_tolerance: 1e-10,
            fd_step_pfkp: 0.02,
            fd_step_virasoro: 1e-3,
            fd_step_tolerance: 0.05,
            budget_factor: 10.0,
            residual_floor: 1e-14,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    /// Recursion in the replica index.
    PfaffKp,
    PfKp1,
    PfKp2,
    /// Virasoro constraint with the operator exactly as printed.
    Virasoro,
    /// Virasoro constraint with the `(q+1)∂_{t_q}` reparametrization term.
    VirasoroReparametrized,
}

/// Where an identity was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalPoint {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub identity: Identity,
    pub point: EvalPoint,
    pub lhs: Complex64,
    pub rhs: Complex64,
    /// `|lhs − rhs| / (|lhs| + |rhs| + floor)`.
    pub normalized_residual: f64,
    pub error_budget: f64,
    /// `normalized_residual <= error_budget`.
    pub pass: bool,
    /// Finite-difference order measured from the raw residual at `h` and `h/2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence_order: Option<f64>,
    /// Ratio `rhs / lhs`, useful for gauge diagnostics.
    pub rhs_over_lhs: Complex64,
}

impl ResidualReport {
    pub(crate) fn new(
        identity: Identity,
        point: EvalPoint,
        lhs: Complex64,
        rhs: Complex64,
        floor: f64,
        error_budget: f64,
        convergence_order: Option<f64>,
    ) -> Self {
        let normalized_residual = normalized(lhs, rhs, floor);
        let rhs_over_lhs = if lhs.norm() > 0.0 { rhs / lhs } else { Complex64::new(f64::NAN, f64::NAN) };
        Self {
            identity,
            point,
            lhs,
            rhs,
            normalized_residual,
            error_budget,
            pass: normalized_residual <= error_budget,
            convergence_order,
            rhs_over_lhs,
        }
    }
}

pub(crate) fn normalized(lhs: Complex64, rhs: Complex64, floor: f64) -> f64 {
    let diff = (lhs - rhs).norm();
    if diff == 0.0 {
        return 0.0;
    }
    diff / (lhs.norm() + rhs.norm() + floor)
}
