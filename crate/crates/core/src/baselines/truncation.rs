use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ogd_step;
use crate::error::Result;
use crate::hashing::FeatureId;
use crate::heap::IndexedHeap;
use crate::learner::{check_top_k, Learner, Scale, TopKEstimate};
use crate::model::OptimizerConfig;
use crate::sparse::{Label, SparseVector};

/// OGD on the tracked set plus newly touched features, then truncation to
/// the `K` largest magnitudes.
#[derive(Debug, Clone)]
pub struct TruncatedModel {
    /// item = raw weight, key = `|raw|`
    heap: IndexedHeap<f64>,
    scale: Scale,
    opt: OptimizerConfig,
    capacity: usize,
    t: u64,
}

impl TruncatedModel {
    pub fn new(capacity: usize, opt: OptimizerConfig) -> Result<Self> {
        opt.validate()?;
        Ok(Self {
            heap: IndexedHeap::with_capacity(capacity + 1),
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

    pub fn contains(&self, feature: FeatureId) -> bool {
        self.heap.contains(feature)
    }
}

impl Learner for TruncatedModel {
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
            let raw = self.heap.get(f).map_or(0.0, |e| e.item) + coef * v / a;
            self.heap.upsert(f, raw.abs(), raw);
        }
        while self.heap.len() > self.capacity {
            self.heap.pop_min();
        }
        if self.scale.needs_fold() {
            self.heap.rekey_all(|e| {
                e.item *= a;
                e.key = e.item.abs();
            });
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
        8 * self.capacity
    }
}

/// Reservoir key of a fresh entry: `r^(1/|w|)`.
pub fn reservoir_key(r: f64, weight: f64) -> f64 {
    r.powf(1.0 / weight.abs())
}

/// Key after the weight moves from `old` to `new`: `W^(|old/new|)`.
pub fn updated_reservoir_key(key: f64, old: f64, new: f64) -> f64 {
    key.powf((old / new).abs())
}

#[derive(Debug, Clone, Copy)]
struct Tracked {
    raw: f64,
    /// `ln r` of the entry's uniform draw
    log_r: f64,
}

/// Truncation by weighted reservoir sampling: each tracked feature carries
/// the key `W = r^(1/|w|)` and the `K` largest keys survive.
///
/// Both key rules keep `ln W = ln r / |w|`, so the key is stored through
/// `ln r` and recomputed from the current weight. The global scale divides
/// every `ln W` by the same positive factor, which leaves the order intact.
#[derive(Debug, Clone)]
pub struct ProbTruncatedModel {
    /// key = `ln r / |raw|`
    heap: IndexedHeap<Tracked>,
    scale: Scale,
    opt: OptimizerConfig,
    capacity: usize,
    t: u64,
    rng: ChaCha8Rng,
}

impl ProbTruncatedModel {
    pub fn new(capacity: usize, opt: OptimizerConfig, seed: u64) -> Result<Self> {
        opt.validate()?;
        Ok(Self {
            heap: IndexedHeap::with_capacity(capacity + 1),
            scale: Scale::unit(),
            opt,
            capacity,
            t: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
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

    pub fn contains(&self, feature: FeatureId) -> bool {
        self.heap.contains(feature)
    }

    /// Current reservoir key `W` in (0, 1].
    pub fn key(&self, feature: FeatureId) -> Option<f64> {
        self.heap
            .get(feature)
            .map(|e| (e.item.log_r / (self.scale.alpha * e.item.raw.abs())).exp())
    }

    fn set(&mut self, f: FeatureId, tr: Tracked) {
        if tr.raw == 0.0 {
            self.heap.remove(f);
        } else {
            self.heap.upsert(f, tr.log_r / tr.raw.abs(), tr);
        }
    }
}

impl Learner for ProbTruncatedModel {
    fn margin(&self, x: &SparseVector) -> f64 {
        let dot: f64 = x
            .iter()
            .filter_map(|(f, v)| self.heap.get(f).map(|e| e.item.raw * v))
            .sum();
        self.scale.alpha * dot
    }

    fn update(&mut self, x: &SparseVector, y: Label) -> f64 {
        let tau = self.margin(x);
        let (eta, coef) = ogd_step(&self.opt, self.t, tau, y);
        self.scale.decay(eta, self.opt.lambda);
        let a = self.scale.alpha;
        for (f, v) in x.iter() {
            let delta = coef * v / a;
            let tr = match self.heap.get(f) {
                Some(e) => Tracked {
                    raw: e.item.raw + delta,
                    log_r: e.item.log_r,
                },
                None => {
                    if delta == 0.0 {
                        continue;
                    }
                    let r = 1.0 - self.rng.random::<f64>();
                    Tracked { raw: delta, log_r: r.ln() }
                }
            };
            self.set(f, tr);
        }
        while self.heap.len() > self.capacity {
            self.heap.pop_min();
        }
        if self.scale.needs_fold() {
            self.heap.rekey_all(|e| {
                e.item.raw *= a;
                e.key = e.item.log_r / e.item.raw.abs();
            });
            self.scale = Scale::unit();
        }
        self.t += 1;
        tau
    }

    fn weight(&self, feature: FeatureId) -> f64 {
        self.heap.get(feature).map_or(0.0, |e| self.scale.alpha * e.item.raw)
    }

    fn top_k(&self, k: usize) -> Result<TopKEstimate> {
        check_top_k(k, self.capacity)?;
        let a = self.scale.alpha;
        Ok(TopKEstimate::ranked(
            self.heap.iter().map(|e| (e.id, a * e.item.raw)).collect(),
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
