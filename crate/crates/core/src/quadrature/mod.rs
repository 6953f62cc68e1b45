//! Integration engines.
//!
//! * Gauss–Legendre rules on `[-1, 1]` for the fermionic moments.
//! * Rotated half-line paths for the bosonic weight `e^{iπωλ/2}/√(λ²−1)` on
//!   `[1, ∞)`, including ordered (sign-kernel) double integrals.
//! * Brute-force tensor oracles and damped real-axis oracles that check the
//!   fast paths.

mod gauss;
mod halfline;
mod oracle;

pub use gauss::{
    fermionic_moment, fermionic_moments, gauss_legendre_rule, QuadratureRule, MAX_RULE_ORDER,
};
pub use halfline::{
    bosonic_debruijn_kernel, bosonic_half_line_partial, bosonic_kernel_matrix, kernel_matrix,
    ExponentialWeight, HalfLineContour, PathSettings,
};
pub use oracle::{
    damped_debruijn_kernel, damped_half_line_partial, eta_extrapolated_kernel,
    eta_extrapolated_partial, richardson_eta, tensor_symmetric_oracle, OracleKind, OracleValue,
};
