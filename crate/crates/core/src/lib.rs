//! Scaling of fluctuation operators `A_R = R^{-α} ∫ A(x) f(|x|/R) dx` in
//! translation-invariant states, their truncated correlators, the
//! quasi-free limit state they define, and the Goldstone-mode bounds that
//! constrain the choice of `α`.

pub mod config;
pub mod cumulants;
pub mod error;
pub mod exec;
pub mod limit;
pub mod model;
pub mod partition;
pub mod quadrature;
pub mod report;
pub mod run;
pub mod scaling;
pub mod special;
pub mod ssb;
pub mod window;

pub use error::{Error, Result};
