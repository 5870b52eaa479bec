//! Seeded synthetic classification streams with a known weight vector.
//!
//! Sparse mode: each example holds `planted_per_example` features drawn from
//! the planted (nonzero-weight) set plus Zipf-distributed background
//! features, all with value `1/sqrt(m)`. Dense mode (`sparsity >= dim`):
//! every feature is present with value uniform in [-1, 1].
//! Labels are `sign(w_true . x)` (0 counts as +1), flipped with probability `noise`.

use std::collections::HashMap;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashing::FeatureId;
use crate::model::predict_label;
use crate::seed::{derive_seed, Stream};
use crate::sparse::{LabeledExample, SparseVector};

/// Largest dimension the generator will materialize a permutation for.
const MAX_DIM: u64 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum WeightLaw {
    /// `count` random features with weights `±U(low, high)`.
    Planted { count: usize, low: f64, high: f64 },
    /// `w_true[i]` for feature `i`.
    Explicit { weights: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub dim: u64,
    /// nonzeros per example
    pub sparsity: usize,
    pub weights: WeightLaw,
    /// planted features per example (sparse mode)
    pub planted_per_example: usize,
    /// Zipf exponent of the background features
    pub zipf_exponent: f64,
    pub noise: f64,
    pub length: u64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            dim: 1 << 16,
            sparsity: 20,
            weights: WeightLaw::Planted {
                count: 50,
                low: 1.0,
                high: 2.0,
            },
            planted_per_example: 1,
            zipf_exponent: 1.1,
            noise: 0.05,
            length: 100_000,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn dense(&self) -> bool {
        self.sparsity as u64 >= self.dim
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.dim > MAX_DIM {
            return Err(Error::usage(format!("dimension must be in [1, {MAX_DIM}]")));
        }
        if self.sparsity == 0 || self.sparsity as u64 > self.dim {
            return Err(Error::usage("sparsity must be in [1, dim]"));
        }
        if !(0.0..0.5).contains(&self.noise) {
            return Err(Error::usage(format!("noise must be in [0, 0.5), got {}", self.noise)));
        }
        match &self.weights {
            WeightLaw::Planted { count, low, high } => {
                if *count == 0 || *count as u64 > self.dim {
                    return Err(Error::usage("planted count must be in [1, dim]"));
                }
                if !(0.0 < *low && low <= high && high.is_finite()) {
                    return Err(Error::usage("planted magnitudes need 0 < low <= high"));
                }
                if !self.dense() && (self.planted_per_example == 0 || self.planted_per_example > (*count).min(self.sparsity)) {
                    return Err(Error::usage("planted_per_example must be in [1, min(count, sparsity)]"));
                }
            }
            WeightLaw::Explicit { weights } => {
                if weights.len() as u64 != self.dim || weights.iter().any(|w| !w.is_finite()) {
                    return Err(Error::usage("explicit weights need one finite value per dimension"));
                }
                if !self.dense() {
                    return Err(Error::usage("explicit weights are only supported in dense mode"));
                }
            }
        }
        if !(self.zipf_exponent > 0.0) {
            return Err(Error::usage("zipf exponent must be positive"));
        }
        Ok(())
    }
}

/// Iterator over the examples of a [`SyntheticSpec`].
#[derive(Debug, Clone)]
pub struct SyntheticStream {
    spec: SyntheticSpec,
    rng: ChaCha8Rng,
    w_true: HashMap<FeatureId, f64>,
    planted: Vec<FeatureId>,
    /// dense copy of `w_true` for dense mode
    dense_w: Vec<f64>,
    perm: Vec<FeatureId>,
    zipf: Option<Zipf<f64>>,
    emitted: u64,
    flips: u64,
}

impl SyntheticStream {
    pub fn new(spec: SyntheticSpec) -> Result<Self> {
        spec.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, Stream::Data));
        let d = spec.dim as usize;
        let mut w_true = HashMap::new();
        let mut planted = Vec::new();
        let mut dense_w = Vec::new();
        match &spec.weights {
            WeightLaw::Planted { count, low, high } => {
                let mut ids: Vec<FeatureId> = index::sample(&mut rng, d, *count).into_iter().map(|i| i as FeatureId).collect();
                ids.sort_unstable();
                for &id in &ids {
                    let mag = rng.random_range(*low..=*high);
                    let w = if rng.random::<bool>() { mag } else { -mag };
                    w_true.insert(id, w);
                }
                planted = ids;
            }
            WeightLaw::Explicit { weights } => {
                for (i, &w) in weights.iter().enumerate() {
                    if w != 0.0 {
                        w_true.insert(i as FeatureId, w);
                    }
                }
            }
        }
        let (perm, zipf) = if spec.dense() {
            dense_w = (0..d).map(|i| w_true.get(&(i as FeatureId)).copied().unwrap_or(0.0)).collect();
            (Vec::new(), None)
        } else {
            let mut perm: Vec<FeatureId> = (0..spec.dim as FeatureId).collect();
            perm.shuffle(&mut rng);
            let z = Zipf::new(spec.dim as f64, spec.zipf_exponent).map_err(|e| Error::usage(e.to_string()))?;
            (perm, Some(z))
        };
        Ok(Self {
            spec,
            rng,
            w_true,
            planted,
            dense_w,
            perm,
            zipf,
            emitted: 0,
            flips: 0,
        })
    }

    pub fn spec(&self) -> &SyntheticSpec {
        &self.spec
    }

    /// The generating weight vector.
    pub fn w_true(&self) -> &HashMap<FeatureId, f64> {
        &self.w_true
    }

    /// Labels flipped by noise so far.
    pub fn flips(&self) -> u64 {
        self.flips
    }

    fn draw_features(&mut self) -> Vec<(FeatureId, f64)> {
        let d = self.spec.dim as usize;
        if self.spec.dense() {
            return (0..d).map(|i| (i as FeatureId, self.rng.random_range(-1.0..=1.0))).collect();
        }
        let m = self.spec.sparsity;
        let v = 1.0 / (m as f64).sqrt();
        let mut ids: Vec<FeatureId> = index::sample(&mut self.rng, self.planted.len(), self.spec.planted_per_example)
            .into_iter()
            .map(|i| self.planted[i])
            .collect();
        let zipf = self.zipf.expect("sparse mode");
        // background draws that collide with an existing id are redrawn, up to a bound
        let mut attempts = 0;
        while ids.len() < m && attempts < 64 * m {
            attempts += 1;
            let rank = zipf.sample(&mut self.rng) as usize;
            let id = self.perm[rank.clamp(1, d) - 1];
            if !ids.contains(&id) {
                ids.push(id);
            }
        }
        ids.into_iter().map(|id| (id, v)).collect()
    }

    fn score(&self, x: &SparseVector) -> f64 {
        if self.spec.dense() {
            x.iter().map(|(f, v)| self.dense_w[f as usize] * v).sum()
        } else {
            x.iter().map(|(f, v)| self.w_true.get(&f).copied().unwrap_or(0.0) * v).sum()
        }
    }
}

impl Iterator for SyntheticStream {
    type Item = LabeledExample;

    fn next(&mut self) -> Option<LabeledExample> {
        if self.emitted >= self.spec.length {
            return None;
        }
        self.emitted += 1;
        let pairs = self.draw_features();
        let features = SparseVector::from_pairs(pairs).expect("finite values");
        let mut label = predict_label(self.score(&features));
        if self.spec.noise > 0.0 && self.rng.random::<f64>() < self.spec.noise {
            label = label.flip();
            self.flips += 1;
        }
        Some(LabeledExample { label, features })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.spec.length - self.emitted) as usize;
        (left, Some(left))
    }
}
