//! Sharp weighted Hardy and conjugate Hardy inequalities on homogeneous
//! groups: closed-form constants, quadrature and Monte Carlo evaluation of
//! the Hardy quotients, and numerical sharpness experiments.
//!
//! ```
//! use hardy_lab::constants::sharp_constant_group;
//! let c = sharp_constant_group(2.0, 2.0, 2.0, 0.0, 2.0 * std::f64::consts::PI).unwrap();
//! assert!((c - 2.0 * std::f64::consts::PI).abs() < 1e-12);
//! ```

// `!(a < b)` is used on purpose so that NaN fails admissibility tests.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod error;
pub mod geometry;
pub mod operators;
pub mod optimize;
pub mod oracle;
pub mod parallel;
pub mod profile;
pub mod quadrature;
pub mod report;
pub mod sharpness;

pub use error::{Error, Result};
pub use parallel::{Execution, MonteCarlo};
pub use report::VerificationReport;
