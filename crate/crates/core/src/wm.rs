//! Weight-Median Sketch.
//!
//! Online gradient descent runs directly on a Count-Sketch-shaped array `z`
//! of `depth` rows by `width` buckets. The projection is `R = A / sqrt(s)`
//! where `A` is the signed bucket matrix implied by the hash family, so the
//! prediction is `z^T R x` and a weight estimate is the median over rows of
//! `sqrt(s) * sigma_j(i) * z[j][h_j(i)]`.
//!
//! l2 decay is carried by a global scale `alpha` (true sketch = `alpha * z`),
//! keeping each update at `O(s * nnz(x))`. A passive min-heap remembers the
//! features with the largest estimates seen so far.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashing::{FeatureId, HashFamily};
use crate::heap::IndexedHeap;
use crate::learner::{check_top_k, Learner, Scale, TopKEstimate};
use crate::model::{Loss, LrSchedule, OptimizerConfig, ScheduleKind};
use crate::sketch::{CountSketch, CSK_MAGIC};
use crate::snapshot::{Decoder, Encoder};
use crate::sparse::{Label, SparseVector};

/// Sketch array plus global scale; shared by the WM and AWM sketches so both
/// perform bit-identical arithmetic on the sketched part of the model.
#[derive(Debug, Clone)]
pub(crate) struct SketchCore {
    pub sketch: CountSketch,
    pub scale: Scale,
    sqrt_s: f64,
    bucket_writes: u64,
}

impl SketchCore {
    pub fn new(sketch: CountSketch) -> Self {
        let sqrt_s = (sketch.depth() as f64).sqrt();
        Self {
            sketch,
            scale: Scale::unit(),
            sqrt_s,
            bucket_writes: 0,
        }
    }

    /// `sum_i x_i * sum_j sigma_j(i) z[j][h_j(i)]` over the given entries.
    #[inline]
    pub fn raw_dot(&self, entries: impl Iterator<Item = (FeatureId, f64)>) -> f64 {
        entries.map(|(f, v)| v * self.sketch.signed_sum(f)).sum()
    }

    /// `alpha * z^T R x` for a raw dot product.
    #[inline]
    pub fn margin_from_dot(&self, dot: f64) -> f64 {
        self.scale.alpha * (dot / self.sqrt_s)
    }

    #[inline]
    pub fn query(&self, feature: FeatureId) -> f64 {
        self.sqrt_s * self.scale.alpha * self.sketch.query(feature)
    }

    /// Shifts the estimate of `feature` by `delta` in every row.
    #[inline]
    pub fn add_weight(&mut self, feature: FeatureId, delta: f64) {
        self.sketch
            .add_signed(feature, delta / (self.sqrt_s * self.scale.alpha));
        self.bucket_writes += self.sketch.depth() as u64;
    }

    /// Multiplies `alpha` into the accumulators and resets it to 1. Returns the folded factor.
    pub fn fold(&mut self) -> f64 {
        let a = self.scale.alpha;
        for v in self.sketch.values_mut() {
            *v *= a;
        }
        self.scale = Scale::unit();
        a
    }

    pub fn bucket_writes(&self) -> u64 {
        self.bucket_writes
    }
}

/// Fixed-size header shared by the `WMS1` and `AWM1` snapshot formats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ConfigBlock {
    pub k: u64,
    pub s: u64,
    pub seed: u64,
    pub opt: OptimizerConfig,
    pub t: u64,
    pub alpha: f64,
}

impl ConfigBlock {
    pub fn encode(&self, enc: &mut Encoder) {
        let (loss_id, half_width) = match self.opt.loss {
            Loss::Logistic => (0, 0.0),
            Loss::SmoothedHinge { half_width } => (1, half_width),
        };
        enc.u64(self.k)
            .u64(self.s)
            .u64(self.seed)
            .f64(self.opt.lambda)
            .u64(self.opt.schedule.kind.id())
            .f64(self.opt.schedule.eta0)
            .u64(self.t)
            .f64(self.alpha)
            .f64(self.opt.schedule.lambda)
            .u64(loss_id)
            .f64(half_width);
    }

    pub fn decode(dec: &mut Decoder<'_>) -> Result<Self> {
        let k = dec.u64()?;
        let s = dec.u64()?;
        let seed = dec.u64()?;
        let lambda = dec.f64()?;
        let kind = ScheduleKind::from_id(dec.u64()?)?;
        let eta0 = dec.f64()?;
        let t = dec.u64()?;
        let alpha = dec.f64()?;
        let sched_lambda = dec.f64()?;
        let loss = match dec.u64()? {
            0 => {
                dec.f64()?;
                Loss::Logistic
            }
            1 => Loss::SmoothedHinge {
                half_width: dec.f64()?,
            },
            id => return Err(Error::Snapshot(format!("unknown loss id {id}"))),
        };
        let opt = OptimizerConfig::new(
            loss,
            LrSchedule {
                kind,
                eta0,
                lambda: sched_lambda,
            },
            lambda,
        );
        Ok(Self {
            k,
            s,
            seed,
            opt,
            t,
            alpha,
        })
    }
}

pub(crate) fn decode_sketch(dec: &mut Decoder<'_>) -> Result<CountSketch> {
    let rest = dec.rest();
    if rest.len() < 4 || &rest[..4] != CSK_MAGIC {
        return Err(Error::Snapshot("missing CSK1 sketch block".into()));
    }
    CountSketch::from_bytes(rest)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WmStats {
    pub bucket_writes: u64,
}

#[derive(Debug, Clone)]
pub struct WmSketch {
    core: SketchCore,
    opt: OptimizerConfig,
    t: u64,
    heap: IndexedHeap<()>,
    heap_capacity: usize,
}

const WMS_MAGIC: &[u8; 4] = b"WMS1";

impl WmSketch {
    /// Sketch of total size `k` in `depth` rows, tabulation-hashed from `seed`.
    pub fn new(k: usize, depth: usize, heap_capacity: usize, seed: u64, opt: OptimizerConfig) -> Result<Self> {
        Self::from_sketch(CountSketch::new(k, depth, seed)?, heap_capacity, opt)
    }

    pub fn with_family(family: HashFamily, heap_capacity: usize, opt: OptimizerConfig) -> Result<Self> {
        Self::from_sketch(CountSketch::from_family(family), heap_capacity, opt)
    }

    fn from_sketch(sketch: CountSketch, heap_capacity: usize, opt: OptimizerConfig) -> Result<Self> {
        opt.validate()?;
        Ok(Self {
            core: SketchCore::new(sketch),
            opt,
            t: 0,
            heap: IndexedHeap::with_capacity(heap_capacity),
            heap_capacity,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.core.scale.alpha
    }

    pub fn sketch(&self) -> &CountSketch {
        &self.core.sketch
    }

    pub fn heap_capacity(&self) -> usize {
        self.heap_capacity
    }

    pub fn optimizer(&self) -> &OptimizerConfig {
        &self.opt
    }

    pub fn stats(&self) -> WmStats {
        WmStats {
            bucket_writes: self.core.bucket_writes(),
        }
    }

    pub fn query(&self, feature: FeatureId) -> f64 {
        self.core.query(feature)
    }

    /// Offers a feature's current raw-scale estimate to the passive heap.
    fn offer(&mut self, feature: FeatureId) {
        if self.heap_capacity == 0 {
            return;
        }
        let key = self.core.sketch.query(feature).abs();
        if self.heap.contains(feature) || (key > 0.0 && self.heap.len() < self.heap_capacity) {
            self.heap.upsert(feature, key, ());
        } else if key > self.heap.peek_min().map_or(0.0, |e| e.key) {
            self.heap.pop_min();
            self.heap.upsert(feature, key, ());
        }
    }

    fn fold(&mut self) {
        let a = self.core.fold();
        self.heap.rekey_all(|e| e.key *= a);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut enc = Encoder::new(WMS_MAGIC);
        ConfigBlock {
            k: self.core.sketch.size() as u64,
            s: self.core.sketch.depth() as u64,
            seed: self.core.sketch.family().seed(),
            opt: self.opt,
            t: self.t,
            alpha: self.core.scale.alpha,
        }
        .encode(&mut enc);
        enc.u64(self.heap_capacity as u64).u64(self.heap.len() as u64);
        for e in self.heap.iter() {
            enc.u32(e.id).f64(e.key);
        }
        enc.bytes(&self.core.sketch.to_bytes()?);
        Ok(enc.finish())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut dec = Decoder::new(bytes, WMS_MAGIC)?;
        let cfg = ConfigBlock::decode(&mut dec)?;
        let heap_capacity = dec.usize()?;
        let n = dec.usize()?;
        let mut heap = IndexedHeap::with_capacity(heap_capacity);
        for _ in 0..n {
            let id = dec.u32()?;
            let key = dec.f64()?;
            heap.upsert(id, key, ());
        }
        let sketch = decode_sketch(&mut dec)?;
        if sketch.size() as u64 != cfg.k || sketch.depth() as u64 != cfg.s || sketch.family().seed() != cfg.seed {
            return Err(Error::Snapshot("sketch block disagrees with config block".into()));
        }
        let mut out = Self::from_sketch(sketch, heap_capacity, cfg.opt)?;
        out.core.scale.alpha = cfg.alpha;
        out.t = cfg.t;
        out.heap = heap;
        Ok(out)
    }
}

impl Learner for WmSketch {
    fn margin(&self, x: &SparseVector) -> f64 {
        self.core.margin_from_dot(self.core.raw_dot(x.iter()))
    }

    fn update(&mut self, x: &SparseVector, y: Label) -> f64 {
        let tau = self.margin(x);
        let eta = self.opt.schedule.rate(self.t);
        let y = y.value();
        let grad = self.opt.loss.grad_unchecked(y * tau);
        self.core.scale.decay(eta, self.opt.lambda);
        let coef = -eta * y * grad;
        for (f, v) in x.iter() {
            self.core.add_weight(f, coef * v);
        }
        for (f, _) in x.iter() {
            self.offer(f);
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

    /// Heap members re-queried against the current sketch.
    fn top_k(&self, k: usize) -> Result<TopKEstimate> {
        check_top_k(k, self.heap_capacity)?;
        let entries = self.heap.iter().map(|e| (e.id, self.query(e.id))).collect();
        Ok(TopKEstimate::ranked(entries, k))
    }

    fn steps(&self) -> u64 {
        self.t
    }

    fn memory_cost(&self) -> usize {
        4 * self.core.sketch.size() + 8 * self.heap_capacity
    }

    fn snapshot(&self) -> Option<Result<Vec<u8>>> {
        Some(self.to_bytes())
    }
}
