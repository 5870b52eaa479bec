use super::ogd_step;
use crate::error::Result;
use crate::hashing::FeatureId;
use crate::heap::IndexedHeap;
use crate::learner::{check_top_k, Learner, Scale, TopKEstimate};
use crate::model::OptimizerConfig;
use crate::sparse::{Label, SparseVector};

/// Space-Saving frequent-feature tracking with an OGD weight per counter.
/// A newcomer replaces the min-count counter, inheriting `count + 1` but
/// starting from weight 0.
#[derive(Debug, Clone)]
pub struct SpaceSavingModel {
    /// key = count, item = raw weight
    heap: IndexedHeap<f64>,
    scale: Scale,
    opt: OptimizerConfig,
    capacity: usize,
    t: u64,
}

impl SpaceSavingModel {
    pub fn new(capacity: usize, opt: OptimizerConfig) -> Result<Self> {
        opt.validate()?;
        Ok(Self {
            heap: IndexedHeap::with_capacity(capacity),
            scale: Scale::unit(),
            opt,
            capacity,
            t: 0,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn count(&self, feature: FeatureId) -> Option<u64> {
        self.heap.get(feature).map(|e| e.key as u64)
    }

    pub fn counts(&self) -> Vec<(FeatureId, u64)> {
        let mut out: Vec<_> = self.heap.iter().map(|e| (e.id, e.key as u64)).collect();
        out.sort();
        out
    }
}

impl Learner for SpaceSavingModel {
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
        if self.capacity > 0 {
            for (f, v) in x.iter() {
                let (count, raw) = match self.heap.get(f) {
                    Some(e) => (e.key + 1.0, e.item),
                    None if self.heap.len() < self.capacity => (1.0, 0.0),
                    None => {
                        let min = self.heap.pop_min().expect("full heap");
                        (min.key + 1.0, 0.0)
                    }
                };
                self.heap.upsert(f, count, raw + coef * v / a);
            }
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
        12 * self.capacity
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Zipf};

    use super::super::testutil::{close, stream, NaiveOgd};
    use super::*;

    #[test]
    fn textbook_trace() {
        let mut m = SpaceSavingModel::new(2, OptimizerConfig::default()).unwrap();
        for f in [10u32, 11, 12] {
            m.update(&SparseVector::indicator(f), Label::Positive);
        }
        // 10 and 11 tie at count 1; the larger id is replaced
        assert_eq!(m.counts(), vec![(10, 1), (12, 2)]);
    }

    #[test]
    fn exact_counts_when_capacity_suffices() {
        let mut m = SpaceSavingModel::new(100, OptimizerConfig::default()).unwrap();
        let mut truth: HashMap<u32, u64> = HashMap::new();
        for (x, y) in stream(1000, 37) {
            for (f, _) in x.iter() {
                *truth.entry(f).or_default() += 1;
            }
            m.update(&x, y);
        }
        for (f, c) in truth {
            assert_eq!(m.count(f), Some(c));
        }
    }

    #[test]
    fn counts_monotone_and_overestimate_bounded() {
        let k = 20;
        let mut m = SpaceSavingModel::new(k, OptimizerConfig::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let zipf = Zipf::new(500.0, 1.1).unwrap();
        let mut truth: HashMap<u32, u64> = HashMap::new();
        let mut total = 0u64;
        let mut prev: HashMap<u32, u64> = HashMap::new();
        for _ in 0..5000 {
            let f = zipf.sample(&mut rng) as u32;
            *truth.entry(f).or_default() += 1;
            total += 1;
            m.update(&SparseVector::indicator(f), Label::Positive);
            for (id, c) in m.counts() {
                if let Some(&p) = prev.get(&id) {
                    assert!(c >= p);
                }
            }
            prev = m.counts().into_iter().collect();
        }
        for (f, c) in m.counts() {
            let t = truth[&f];
            assert!(c >= t);
            assert!(c - t <= total / k as u64);
        }
    }

    #[test]
    fn vacuous_capacity_equals_dense() {
        let opt = OptimizerConfig::new(
            crate::model::Loss::Logistic,
            crate::model::LrSchedule::inverse_sqrt(0.2),
            1e-2,
        );
        let mut m = SpaceSavingModel::new(64, opt).unwrap();
        let mut naive = NaiveOgd::new(opt);
        for (x, y) in stream(2000, 50) {
            assert!(close(m.update(&x, y), naive.update(&x, y)));
        }
        for f in 0..50 {
            assert!(close(m.weight(f), naive.weight(f)));
        }
    }
}
