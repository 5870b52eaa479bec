//! Active-Set Weight-Median Sketch.
//!
//! The heaviest weights live exactly in a bounded heap (the active set); the
//! remaining tail is learned in a WM-style sketch. A feature outside the heap
//! is promoted when its candidate weight beats the heap minimum, and the
//! evicted feature's weight is written back into the sketch as a residual
//! against its current sketch estimate.
//!
//! Heap weights share the sketch's global scale `alpha`, which is valid
//! because both receive the same `1 - eta * lambda` decay every step.

use crate::error::{Error, Result};
use crate::hashing::{FeatureId, HashFamily};
use crate::heap::IndexedHeap;
use crate::learner::{check_top_k, Learner, TopKEstimate};
use crate::model::OptimizerConfig;
use crate::sketch::CountSketch;
use crate::snapshot::{Decoder, Encoder};
use crate::sparse::{Label, SparseVector};
use crate::wm::{decode_sketch, ConfigBlock, SketchCore};

#[derive(Debug, Clone)]
pub struct AwmSketch {
    core: SketchCore,
    opt: OptimizerConfig,
    t: u64,
    /// item = raw weight (true weight is `alpha * raw`), key = `|raw|`
    heap: IndexedHeap<f64>,
    capacity: usize,
    evictions: u64,
}

const AWM_MAGIC: &[u8; 4] = b"AWM1";

impl AwmSketch {
    pub fn new(k: usize, depth: usize, capacity: usize, seed: u64, opt: OptimizerConfig) -> Result<Self> {
        Self::from_sketch(CountSketch::new(k, depth, seed)?, capacity, opt)
    }

    pub fn with_family(family: HashFamily, capacity: usize, opt: OptimizerConfig) -> Result<Self> {
        Self::from_sketch(CountSketch::from_family(family), capacity, opt)
    }

    fn from_sketch(sketch: CountSketch, capacity: usize, opt: OptimizerConfig) -> Result<Self> {
        opt.validate()?;
        Ok(Self {
            core: SketchCore::new(sketch),
            opt,
            t: 0,
            heap: IndexedHeap::with_capacity(capacity),
            capacity,
            evictions: 0,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn alpha(&self) -> f64 {
        self.core.scale.alpha
    }

    pub fn sketch(&self) -> &CountSketch {
        &self.core.sketch
    }

    pub fn heap_len(&self) -> usize {
        self.heap.len()
    }

    pub fn evictions(&self) -> u64 {
        self.evictions
    }

    pub fn in_heap(&self, feature: FeatureId) -> bool {
        self.heap.contains(feature)
    }

    /// Exact heap weight when present.
    pub fn heap_weight(&self, feature: FeatureId) -> Option<f64> {
        self.heap.get(feature).map(|e| self.core.scale.alpha * e.item)
    }

    /// Weight estimate from the sketch alone, ignoring the heap.
    pub fn sketch_estimate(&self, feature: FeatureId) -> f64 {
        self.core.query(feature)
    }

    pub fn heap_entries(&self) -> Vec<(FeatureId, f64)> {
        let a = self.core.scale.alpha;
        self.heap.iter().map(|e| (e.id, a * e.item)).collect()
    }

    pub fn query(&self, feature: FeatureId) -> f64 {
        self.heap_weight(feature)
            .unwrap_or_else(|| self.core.query(feature))
    }

    fn set_heap(&mut self, feature: FeatureId, raw: f64) {
        self.heap.upsert(feature, raw.abs(), raw);
    }

    fn fold(&mut self) {
        let a = self.core.fold();
        self.heap.rekey_all(|e| {
            e.item *= a;
            e.key = e.item.abs();
        });
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut enc = Encoder::new(AWM_MAGIC);
        ConfigBlock {
            k: self.core.sketch.size() as u64,
            s: self.core.sketch.depth() as u64,
            seed: self.core.sketch.family().seed(),
            opt: self.opt,
            t: self.t,
            alpha: self.core.scale.alpha,
        }
        .encode(&mut enc);
        enc.u64(self.capacity as u64)
            .u64(self.evictions)
            .u64(self.heap.len() as u64);
        for e in self.heap.iter() {
            enc.u32(e.id).f64(e.item);
        }
        enc.bytes(&self.core.sketch.to_bytes()?);
        Ok(enc.finish())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut dec = Decoder::new(bytes, AWM_MAGIC)?;
        let cfg = ConfigBlock::decode(&mut dec)?;
        let capacity = dec.usize()?;
        let evictions = dec.u64()?;
        let n = dec.usize()?;
        if n > capacity {
            return Err(Error::Snapshot(format!("{n} heap entries exceed capacity {capacity}")));
        }
        let mut heap = IndexedHeap::with_capacity(capacity);
        for _ in 0..n {
            let id = dec.u32()?;
            let raw = dec.f64()?;
            if heap.contains(id) {
                return Err(Error::Snapshot(format!("duplicate heap entry {id}")));
            }
            heap.upsert(id, raw.abs(), raw);
        }
        let sketch = decode_sketch(&mut dec)?;
        if sketch.size() as u64 != cfg.k || sketch.depth() as u64 != cfg.s || sketch.family().seed() != cfg.seed {
            return Err(Error::Snapshot("sketch block disagrees with config block".into()));
        }
        let mut out = Self::from_sketch(sketch, capacity, cfg.opt)?;
        out.core.scale.alpha = cfg.alpha;
        out.t = cfg.t;
        out.heap = heap;
        out.evictions = evictions;
        Ok(out)
    }
}

impl Learner for AwmSketch {
    fn margin(&self, x: &SparseVector) -> f64 {
        let mut heap_dot = 0.0;
        let mut sketch_dot = 0.0;
        for (f, v) in x.iter() {
            match self.heap.get(f) {
                Some(e) => heap_dot += e.item * v,
                None => sketch_dot += v * self.core.sketch.signed_sum(f),
            }
        }
        self.core.scale.alpha * heap_dot + self.core.margin_from_dot(sketch_dot)
    }

    fn update(&mut self, x: &SparseVector, y: Label) -> f64 {
        let tau = self.margin(x);
        let eta = self.opt.schedule.rate(self.t);
        let y = y.value();
        let grad = self.opt.loss.grad_unchecked(y * tau);
        let coef = -eta * y * grad;

        // Partition against the heap as it stood when the margin was computed.
        let (in_heap, outside): (Vec<_>, Vec<_>) = x.iter().partition(|&(f, _)| self.heap.contains(f));

        // Decays heap and sketch together.
        self.core.scale.decay(eta, self.opt.lambda);
        let alpha = self.core.scale.alpha;

        for (f, v) in in_heap {
            let raw = self.heap.get(f).expect("partitioned into heap").item + coef * v / alpha;
            self.set_heap(f, raw);
        }

        let mut evicted: Vec<(FeatureId, f64)> = Vec::new();
        for (f, v) in outside {
            let candidate = self.core.query(f) + coef * v;
            let raw = candidate / alpha;
            if self.heap.len() < self.capacity && candidate != 0.0 {
                self.set_heap(f, raw);
            } else if self.heap.peek_min().is_some_and(|min| raw.abs() > min.key) {
                let min = self.heap.pop_min().expect("nonempty heap");
                evicted.push((min.id, min.item));
                self.set_heap(f, raw);
            } else {
                self.core.add_weight(f, coef * v);
            }
        }

        // Residual write-back after all gradient writes of this step.
        for (f, raw) in evicted {
            let residual = alpha * raw - self.core.query(f);
            self.core.add_weight(f, residual);
            self.evictions += 1;
        }

        if self.core.scale.needs_fold() {
            self.fold();
        }
        self.t += 1;
        tau
    }

    fn weight(&self, feature: FeatureId) -> f64 {
        self.query(feature)
    }

    fn top_k(&self, k: usize) -> Result<TopKEstimate> {
        check_top_k(k, self.capacity)?;
        Ok(TopKEstimate::ranked(self.heap_entries(), k))
    }

    fn steps(&self) -> u64 {
        self.t
    }

    fn memory_cost(&self) -> usize {
        8 * self.capacity + 4 * self.core.sketch.size()
    }

    fn snapshot(&self) -> Option<Result<Vec<u8>>> {
        Some(self.to_bytes())
    }
}
