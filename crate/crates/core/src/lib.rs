//! Numerical laboratory for β = 1 replica partition functions, their tau
//! functions and integrable-hierarchy identities, together with the exact and
//! Monte Carlo two-point correlation functions of the Gaussian orthogonal
//! ensemble.

// domain guards are written `!(x > 0.0)` on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod correlation;
pub mod error;
pub mod goemc;
pub mod hierarchy;
pub mod partition;
pub mod quadrature;
pub mod skewlinalg;
pub mod specfun;

pub use error::{Error, Result};
