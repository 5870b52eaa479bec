//! The interface shared by every online learner, and a factory over method configs.

use serde::{Deserialize, Serialize};

use crate::awm::AwmSketch;
use crate::baselines::{
    CountMinFrequentModel, DenseModel, HashedModel, ProbTruncatedModel, SpaceSavingModel,
    TruncatedModel,
};
use crate::error::{Error, Result};
use crate::eval::{MethodConfig, MethodKind};
use crate::hashing::FeatureId;
use crate::model::OptimizerConfig;
use crate::seed::{derive_seed, Stream};
use crate::sparse::{Label, SparseVector};
use crate::wm::WmSketch;

/// Ranked `(feature, weight)` list: `|weight|` descending, feature id ascending on ties.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TopKEstimate {
    pub entries: Vec<(FeatureId, f64)>,
}

impl TopKEstimate {
    /// Sorts `entries` into rank order and keeps the first `k`.
    pub fn ranked(mut entries: Vec<(FeatureId, f64)>, k: usize) -> Self {
        entries.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0)));
        entries.truncate(k);
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = FeatureId> + '_ {
        self.entries.iter().map(|&(id, _)| id)
    }

    pub fn get(&self, feature: FeatureId) -> Option<f64> {
        self.entries.iter().find(|&&(id, _)| id == feature).map(|&(_, w)| w)
    }
}

/// A memory-budgeted (or reference) online linear classifier.
pub trait Learner {
    /// Linear score used for prediction.
    fn margin(&self, x: &SparseVector) -> f64;

    /// One online gradient step on `(x, y)`. Returns the margin computed
    /// before the update, so callers can score the prediction online.
    fn update(&mut self, x: &SparseVector, y: Label) -> f64;

    /// Current estimate of one feature's weight.
    fn weight(&self, feature: FeatureId) -> f64;

    /// The `k` heaviest weights the learner can name.
    fn top_k(&self, k: usize) -> Result<TopKEstimate>;

    /// Number of updates applied.
    fn steps(&self) -> u64;

    /// Bytes charged under the 4-bytes-per-id/weight/aux cost model.
    fn memory_cost(&self) -> usize;

    /// Binary snapshot, for learners that have one.
    fn snapshot(&self) -> Option<Result<Vec<u8>>> {
        None
    }
}

/// Everything needed to construct a learner reproducibly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub method: MethodConfig,
    pub optimizer: OptimizerConfig,
    pub seed: u64,
}

impl LearnerConfig {
    pub fn new(method: MethodConfig, optimizer: OptimizerConfig, seed: u64) -> Self {
        Self {
            method,
            optimizer,
            seed,
        }
    }

    pub fn build(&self) -> Result<Box<dyn Learner>> {
        let m = &self.method;
        let opt = self.optimizer;
        let hash_seed = derive_seed(self.seed, Stream::Hashing);
        Ok(match m.kind {
            MethodKind::Wm => Box::new(WmSketch::new(m.width * m.depth, m.depth, m.heap_capacity, hash_seed, opt)?),
            MethodKind::Awm => Box::new(AwmSketch::new(m.width * m.depth, m.depth, m.heap_capacity, hash_seed, opt)?),
            MethodKind::Trunc => Box::new(TruncatedModel::new(m.heap_capacity, opt)?),
            MethodKind::Ptrunc => Box::new(ProbTruncatedModel::new(
                m.heap_capacity,
                opt,
                derive_seed(self.seed, Stream::ReservoirKeys),
            )?),
            MethodKind::SpaceSaving => Box::new(SpaceSavingModel::new(m.heap_capacity, opt)?),
            MethodKind::Hash => Box::new(HashedModel::new(m.width, m.heap_capacity, hash_seed, opt)?),
            MethodKind::CmFrequent => Box::new(CountMinFrequentModel::new(
                m.heap_capacity,
                m.width,
                m.depth,
                hash_seed,
                opt,
            )?),
            MethodKind::Dense => Box::new(DenseModel::new(opt)?),
        })
    }
}

pub(crate) fn check_top_k(k: usize, capacity: usize) -> Result<()> {
    if k > capacity {
        Err(Error::usage(format!("requested top-{k} exceeds heap capacity {capacity}")))
    } else {
        Ok(())
    }
}

/// Global multiplier for lazily applied l2 decay: stored values are `raw`,
/// true values are `alpha * raw`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Scale {
    pub alpha: f64,
}

/// Below this the scale is folded back into the stored values.
pub(crate) const FOLD_THRESHOLD: f64 = 1e-12;

impl Scale {
    pub fn unit() -> Self {
        Self { alpha: 1.0 }
    }

    #[inline]
    pub fn decay(&mut self, eta: f64, lambda: f64) {
        if lambda > 0.0 {
            self.alpha *= 1.0 - eta * lambda;
        }
    }

    pub fn needs_fold(&self) -> bool {
        self.alpha < FOLD_THRESHOLD
    }
}
