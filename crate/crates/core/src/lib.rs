//! Memory-budgeted streaming linear classifiers that can also report their
//! heaviest weights: the Weight-Median Sketch, its active-set variant, the
//! usual baselines, and the metrics and applications built on them.

// `!(x > 0.0)` style checks are meant to reject NaN too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod apps;
pub mod awm;
pub mod data;
pub mod baselines;
pub mod cli;
pub mod error;
pub mod eval;
pub mod hashing;
pub mod heap;
pub mod learner;
pub mod model;
pub mod seed;
pub mod sizing;
pub mod sketch;
mod snapshot;
pub mod sparse;
pub mod wm;

pub use awm::AwmSketch;
pub use error::{Error, Result};
pub use learner::{Learner, LearnerConfig, TopKEstimate};
pub use sparse::{Label, LabeledExample, SparseVector};
pub use wm::WmSketch;
