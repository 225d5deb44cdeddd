//! Online dynamic minimization of submodular set functions: greedy and
//! projected-subgradient update rules, Lovász-extension tools, regret
//! accounting, and two power-system simulators built on them.

// `!(x > 0.0)` style checks deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algorithms;
pub mod apps;
pub mod error;
pub mod lovasz;
pub mod oracle;
pub mod rng;
pub mod rounding;
pub mod sets;
pub mod signals;
pub mod synthetic;

pub use error::{Error, Result};
