//! Holomorphic Hermite functions and Bargmann-type transforms.
//!
//! The crate evaluates, by Gauss-Hermite quadrature over the real line and the
//! complex plane, the objects that make up the weighted holomorphic spaces
//! `X_s(C)` (0 < s < 1), the standard Segal-Bargmann space `H_B(C)` and the
//! spaces `H_Phi(C)` attached to a quadratic phase `(a, b, c)`:
//!
//! * [`quadrature`]: Gauss-Hermite rules, Gaussian envelopes and tensor grids.
//! * [`hermite`]: Hermite polynomials at complex arguments, the normalized
//!   functions `psi_n^s` and the elliptic systems `Psi_n^{alpha,beta}`.
//! * [`spaces`]: weights, inner products, Gram matrices and reproducing kernels.
//! * [`transforms`]: the Bargmann transform, Bargmann-type transforms `T`,
//!   their adjoints, the `X_s -> H_B` isomorphisms and the composite kernels.
//!
//! Every integral is computed with an explicit node count and a Gaussian
//! envelope supplied (or derived) by the caller, so results are reproducible
//! bit for bit regardless of the execution mode.

pub mod error;
pub mod func;
pub mod hermite;
pub mod phase;
pub mod quadrature;
pub mod spaces;
pub mod transforms;

pub use error::{Error, Result};
pub use func::{LineFn, PlaneFn};
pub use num_complex::Complex64;
pub use phase::PhaseParams;

/// Default number of Gauss-Hermite nodes per axis.
pub const DEFAULT_NODES: usize = 201;
