use std::collections::HashMap;

use super::ogd_step;
use crate::error::{Error, Result};
use crate::hashing::FeatureId;
use crate::learner::{Learner, Scale, TopKEstimate};
use crate::model::OptimizerConfig;
use crate::snapshot::{Decoder, Encoder};
use crate::sparse::{Label, SparseVector};
use crate::wm::ConfigBlock;

const DENSE_MAGIC: &[u8; 4] = b"DNS1";

/// Uncompressed logistic regression; the ground truth for recovery metrics.
#[derive(Debug, Clone)]
pub struct DenseModel {
    raw: HashMap<FeatureId, f64>,
    scale: Scale,
    opt: OptimizerConfig,
    t: u64,
}

impl DenseModel {
    pub fn new(opt: OptimizerConfig) -> Result<Self> {
        opt.validate()?;
        Ok(Self {
            raw: HashMap::new(),
            scale: Scale::unit(),
            opt,
            t: 0,
        })
    }

    pub fn optimizer(&self) -> &OptimizerConfig {
        &self.opt
    }

    /// All nonzero weights.
    pub fn weights(&self) -> HashMap<FeatureId, f64> {
        let a = self.scale.alpha;
        self.raw
            .iter()
            .filter(|(_, &r)| r != 0.0)
            .map(|(&f, &r)| (f, a * r))
            .collect()
    }

    pub fn nnz(&self) -> usize {
        self.raw.values().filter(|&&r| r != 0.0).count()
    }

    fn fold(&mut self) {
        let a = self.scale.alpha;
        for r in self.raw.values_mut() {
            *r *= a;
        }
        self.scale = Scale::unit();
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut enc = Encoder::new(DENSE_MAGIC);
        ConfigBlock {
            k: 0,
            s: 0,
            seed: 0,
            opt: self.opt,
            t: self.t,
            alpha: self.scale.alpha,
        }
        .encode(&mut enc);
        let mut entries: Vec<_> = self.raw.iter().map(|(&f, &r)| (f, r)).collect();
        entries.sort_by_key(|e| e.0);
        enc.u64(entries.len() as u64);
        for (f, r) in entries {
            enc.u32(f).f64(r);
        }
        Ok(enc.finish())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut dec = Decoder::new(bytes, DENSE_MAGIC)?;
        let cfg = ConfigBlock::decode(&mut dec)?;
        let n = dec.usize()?;
        let mut raw = HashMap::with_capacity(n.min(1 << 20));
        for _ in 0..n {
            let f = dec.u32()?;
            let r = dec.f64()?;
            if !r.is_finite() || raw.insert(f, r).is_some() {
                return Err(Error::Snapshot(format!("bad or duplicate weight for feature {f}")));
            }
        }
        dec.finish()?;
        let mut out = Self::new(cfg.opt)?;
        out.raw = raw;
        out.scale.alpha = cfg.alpha;
        out.t = cfg.t;
        Ok(out)
    }
}

impl Learner for DenseModel {
    fn margin(&self, x: &SparseVector) -> f64 {
        let dot: f64 = x
            .iter()
            .map(|(f, v)| self.raw.get(&f).copied().unwrap_or(0.0) * v)
            .sum();
        self.scale.alpha * dot
    }

    fn update(&mut self, x: &SparseVector, y: Label) -> f64 {
        let tau = self.margin(x);
        let (eta, coef) = ogd_step(&self.opt, self.t, tau, y);
        self.scale.decay(eta, self.opt.lambda);
        let a = self.scale.alpha;
        for (f, v) in x.iter() {
            *self.raw.entry(f).or_default() += coef * v / a;
        }
        if self.scale.needs_fold() {
            self.fold();
        }
        self.t += 1;
        tau
    }

    fn weight(&self, feature: FeatureId) -> f64 {
        self.scale.alpha * self.raw.get(&feature).copied().unwrap_or(0.0)
    }

    /// No capacity limit: any `k` is allowed.
    fn top_k(&self, k: usize) -> Result<TopKEstimate> {
        Ok(TopKEstimate::ranked(self.weights().into_iter().collect(), k))
    }

    fn steps(&self) -> u64 {
        self.t
    }

    /// Actual footprint (id + weight per stored feature); dense models have no budget.
    fn memory_cost(&self) -> usize {
        8 * self.raw.len()
    }

    fn snapshot(&self) -> Option<Result<Vec<u8>>> {
        Some(self.to_bytes())
    }
}
