//! Quantum causal inference: channels, instruments and process matrices, a
//! gate-level quantum switch simulator, and checkers for the four
//! do-calculus rules on the resulting conditional distributions.

pub mod channels;
pub mod diagnostics;
pub mod error;
pub mod gates;
pub mod process;
pub mod random;
pub mod sim;
pub mod tensor;

pub use error::{Error, Result};
