//! Numerical toolkit for recovery thresholds of lq-minimization.
//!
//! For an under-determined Gaussian linear system `y = A x` with `A` of size
//! `m x n` (aspect ratio `alpha = m/n`) and unknowns whose support size `k`
//! scales as `beta_half = k/n`, this crate computes lower bounds on the
//! aspect ratio above which lq-minimization (`0 <= q <= 1`) succeeds, in
//! three senses:
//!
//! * **sectional** - all signals on one fixed support are recovered;
//! * **strong** - all signals on all supports of the given size are
//!   recovered;
//! * **weak** - a fixed signal is recovered.
//!
//! The bounds come from bounding the Gaussian mean width of the descent-cone
//! sections of the lq ball and applying the escape-through-the-mesh bound.
//! Each width bound is a two-dimensional dual minimization (`nu`, `gamma`)
//! of an expectation of per-coordinate maxima that are solved in closed form
//! or by a guarded Newton iteration.
//!
//! Modules:
//!
//! * [`special_math`] - error functions and Gauss-Legendre expectations;
//! * [`inner_opt`] - per-coordinate inner maximizations;
//! * [`width_bound`] - dual objectives, threshold curves, and the escape
//!   probability bound;
//! * [`nullspace_check`] - desk-scale Monte Carlo verification of the
//!   underlying null-space success conditions;
//! * [`reference`] - bundled reference threshold tables used as regression
//!   anchors.

pub mod error;
pub mod inner_opt;
pub mod nullspace_check;
mod optim;
pub mod reference;
pub mod special_math;
pub mod width_bound;

pub use error::{Error, Result};
