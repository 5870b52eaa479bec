//! Memory-budgeted baselines and the unconstrained reference learner.
//!
//! Every model here keeps weights as `alpha * raw` with one global scale, so
//! l2 decay of all stored weights costs O(1) per step and matches explicit
//! per-step decay exactly.

mod cm_frequent;
mod dense;
mod hashed;
mod space_saving;
mod truncation;

pub use cm_frequent::CountMinFrequentModel;
pub use dense::DenseModel;
pub use hashed::HashedModel;
pub use space_saving::SpaceSavingModel;
pub use truncation::{reservoir_key, updated_reservoir_key, ProbTruncatedModel, TruncatedModel};

use crate::model::OptimizerConfig;
use crate::sparse::Label;

/// `(eta, coef)` for one OGD step at margin `tau`: every touched feature
/// moves by `coef * x_i`.
#[inline]
pub(crate) fn ogd_step(opt: &OptimizerConfig, t: u64, tau: f64, y: Label) -> (f64, f64) {
    let eta = opt.schedule.rate(t);
    let y = y.value();
    (eta, -eta * y * opt.loss.grad_unchecked(y * tau))
}
