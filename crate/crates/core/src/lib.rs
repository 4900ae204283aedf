//! Exact probability space of randomized QuickSort runs.
//!
//! - [`prob_core`]: finite probability spaces over exact rationals, with
//!   product and conditional composition and the expectation laws they obey.
//! - [`quicksort_space`]: the space of QuickSort runs on `n` elements and
//!   the comparison count on it.
//! - [`recurrence`]: the expected-comparison recurrence, its `2 n ln n`
//!   bound, and the indicator-variable sum.
//! - [`splitter`]: first-splitter probabilities of rank intervals.
//! - [`simulator`]: instrumented randomized and deterministic QuickSort.
//! - [`cli`]: the `quickspace` command line.

pub mod cli;
pub mod error;
pub mod exec;
pub mod prob_core;
pub mod quicksort_space;
pub mod recurrence;
pub mod simulator;
pub mod splitter;

pub use error::{Error, Result};
pub use exec::Execution;
pub use prob_core::ExactRational;
