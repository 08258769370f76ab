//! Genuine tripartite nonlocality of three-qubit pure states.
//!
//! The crate computes entanglement measures (pair concurrences, three-tangle,
//! monogamy residual), evaluates and maximizes the Svetlichny and Mermin
//! operators over local spin measurements, checks the closed-form maxima of
//! the GHZ-class and W-class families against numeric search, and estimates
//! Svetlichny values from simulated finite-shot experiments.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod entanglement;
mod ascent;
pub mod bell;
pub mod cli;
pub mod montecarlo;
pub mod optimize;
pub mod qcore;

pub use error::{Error, Result};
