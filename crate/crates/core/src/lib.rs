//! Design calculations for rare-variant association studies.
//!
//! The crate models rare-variant discovery with the three-parameter beta
//! process (3BP) and its hierarchical extension, thins observations through a
//! read-count variant-calling rule, and turns predicted or simulated k-ton
//! counts into burden-test power. Everything here is pure computation: no
//! file system, no threads, no global state. The `rvas-design` crate carries
//! configuration, CSV output and parallel orchestration.
//!
//! Module map:
//!
//! * [`numerics`]: special functions, the central and noncentral t laws,
//!   Gauss–Jacobi expectations under a Beta law.
//! * [`seqmodel`]: sequencing configuration, detection probability, thinning
//!   and the cost model.
//! * [`predictive`]: analytic k-ton predictions and excess-variant ratios.
//! * [`simulate`]: Indian-buffet and hierarchical samplers, count statistics
//!   and Monte Carlo summaries.
//! * [`power`]: burden-test statistics, power, fixed-design and fixed-budget
//!   curves.

#![no_std]
// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
pub mod numerics;
pub mod power;
pub mod predictive;
pub mod seqmodel;
pub mod simulate;
mod stream;

pub use error::{Error, Result};
pub use stream::RandomStream;
