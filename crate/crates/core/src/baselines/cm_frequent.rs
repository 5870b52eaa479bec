use super::ogd_step;
use crate::error::Result;
use crate::hashing::FeatureId;
use crate::heap::IndexedHeap;
use crate::learner::{check_top_k, Learner, Scale, TopKEstimate};
use crate::model::OptimizerConfig;
use crate::sketch::CountMin;
use crate::sparse::{Label, SparseVector};

/// Tracks the features with the largest Count-Min frequency estimates and
/// learns OGD weights for those only.
#[derive(Debug, Clone)]
pub struct CountMinFrequentModel {
    cm: CountMin,
    /// key = estimated count, item = raw weight
    heap: IndexedHeap<f64>,
    scale: Scale,
    opt: OptimizerConfig,
    capacity: usize,
    t: u64,
}

impl CountMinFrequentModel {
    pub fn new(capacity: usize, width: usize, depth: usize, seed: u64, opt: OptimizerConfig) -> Result<Self> {
        opt.validate()?;
        Ok(Self {
            cm: CountMin::new(width, depth, seed)?,
            heap: IndexedHeap::with_capacity(capacity),
            scale: Scale::unit(),
            opt,
            capacity,
            t: 0,
        })
    }

    pub fn contains(&self, feature: FeatureId) -> bool {
        self.heap.contains(feature)
    }

    pub fn count_estimate(&self, feature: FeatureId) -> f64 {
        self.cm.query(feature)
    }
}

impl Learner for CountMinFrequentModel {
    fn margin(&self, x: &SparseVector) -> f64 {
        let dot: f64 = x
            .iter()
            .filter_map(|(f, v)| self.heap.get(f).map(|e| e.item * v))
            .sum();
        self.scale.alpha * dot
    }

    fn update(&mut self, x: &SparseVector, y: Label) -> f64 {
        let tau = self.margin(x);
        let (eta, coef) = ogd_step(&self.opt, self.t, tau, y);
        self.scale.decay(eta, self.opt.lambda);
        let a = self.scale.alpha;
        for (f, v) in x.iter() {
            self.cm.update(f, 1.0).expect("unit increment");
            let count = self.cm.query(f);
            let raw = match self.heap.get(f) {
                Some(e) => e.item,
                None if self.heap.len() < self.capacity => 0.0,
                None if self.heap.peek_min().is_some_and(|m| count > m.key) => {
                    self.heap.pop_min();
                    0.0
                }
                None => continue,
            };
            self.heap.upsert(f, count, raw + coef * v / a);
        }
        if self.scale.needs_fold() {
            self.heap.rekey_all(|e| e.item *= a);
            self.scale = Scale::unit();
        }
        self.t += 1;
        tau
    }

    fn weight(&self, feature: FeatureId) -> f64 {
        self.heap.get(feature).map_or(0.0, |e| self.scale.alpha * e.item)
    }

    fn top_k(&self, k: usize) -> Result<TopKEstimate> {
        check_top_k(k, self.capacity)?;
        let a = self.scale.alpha;
        Ok(TopKEstimate::ranked(
            self.heap.iter().filter(|e| e.item != 0.0).map(|e| (e.id, a * e.item)).collect(),
            k,
        ))
    }

    fn steps(&self) -> u64 {
        self.t
    }

    fn memory_cost(&self) -> usize {
        4 * self.cm.width() * self.cm.depth() + 8 * self.capacity
    }
}
