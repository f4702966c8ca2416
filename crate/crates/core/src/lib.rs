//! Goodness-of-fit and two-sample tests for continuous and histogram data,
//! with simulation, permutation and asymptotic p-values, a min-p combiner for
//! running several tests at once, and a power-study harness.

pub mod cases;
pub mod chisq;
pub mod cli;
pub mod combiner;
pub mod error;
pub mod gof;
pub mod harness;
pub mod inference;
pub mod models;
pub mod rng;
pub mod sample;
pub mod special;
pub mod twosample;

pub use error::{Error, Result};
