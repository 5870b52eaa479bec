//! Relative deltoids: items whose occurrence ratio between two concurrent
//! streams (or its reciprocal) is at least `phi`.
//!
//! Items of stream A become `(e_i, +1)` examples and items of B become
//! `(e_i, -1)`, so a logistic learner's weight for `i` tracks
//! `ln(n_A(i) / n_B(i))`.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashing::FeatureId;
use crate::heap::IndexedHeap;
use crate::learner::{check_top_k, Learner, TopKEstimate};
use crate::seed::{derive_seed, Stream};
use crate::sketch::CountMin;
use crate::sparse::{Label, SparseVector};

/// Position-by-position merge of the two streams. When both have an item
/// at a position the smaller id goes first, so swapping the streams yields
/// the same order with labels negated. The same item at the same position
/// in both streams is a cancelling pair and is skipped: no order of its two
/// examples survives the swap.
pub fn interleave(a: &[FeatureId], b: &[FeatureId]) -> Vec<(FeatureId, Label)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    for i in 0..a.len().max(b.len()) {
        match (a.get(i), b.get(i)) {
            (Some(&x), Some(&y)) if x == y => {}
            (Some(&x), Some(&y)) => {
                if x < y {
                    out.push((x, Label::Positive));
                    out.push((y, Label::Negative));
                } else {
                    out.push((y, Label::Negative));
                    out.push((x, Label::Positive));
                }
            }
            (Some(&x), None) => out.push((x, Label::Positive)),
            (None, Some(&y)) => out.push((y, Label::Negative)),
            (None, None) => unreachable!(),
        }
    }
    out
}

fn counts(s: &[FeatureId]) -> HashMap<FeatureId, u64> {
    let mut m = HashMap::new();
    for &i in s {
        *m.entry(i).or_default() += 1;
    }
    m
}

/// Items whose exact ratio or reciprocal is at least `phi` (present in one stream only counts as infinite).
pub fn true_deltoids(a: &[FeatureId], b: &[FeatureId], phi: f64) -> HashSet<FeatureId> {
    let (ca, cb) = (counts(a), counts(b));
    ca.keys()
        .chain(cb.keys())
        .copied()
        .filter(|i| {
            let x = ca.get(i).copied().unwrap_or(0) as f64;
            let y = cb.get(i).copied().unwrap_or(0) as f64;
            let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
            lo == 0.0 || hi / lo >= phi
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltoidReport {
    /// top-k items, weight positive for A-heavy
    pub detected: Vec<(FeatureId, f64)>,
    pub true_deltoids: usize,
    pub true_positives: usize,
    /// `true_positives / true_deltoids`; `None` without true deltoids
    pub recall: Option<f64>,
}

fn report(detected: Vec<(FeatureId, f64)>, truth: &HashSet<FeatureId>) -> DeltoidReport {
    let tp = detected.iter().filter(|(i, _)| truth.contains(i)).count();
    DeltoidReport {
        true_deltoids: truth.len(),
        true_positives: tp,
        recall: (!truth.is_empty()).then(|| tp as f64 / truth.len() as f64),
        detected,
    }
}

/// Trains `learner` on the interleaved streams, reports its top `k`.
pub fn deltoid_detect(
    a: &[FeatureId],
    b: &[FeatureId],
    learner: &mut dyn Learner,
    k: usize,
    phi: f64,
) -> Result<DeltoidReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::usage("deltoid detection needs two nonempty streams"));
    }
    for (item, label) in interleave(a, b) {
        learner.update(&SparseVector::indicator(item), label);
    }
    let top = learner.top_k(k)?;
    Ok(report(top.entries, &true_deltoids(a, b, phi)))
}

/// Baseline: one Count-Min per stream, plus a candidate heap keyed by the
/// estimated log ratio `|ln((n_A + 1) / (n_B + 1))|` at the item's last arrival.
#[derive(Debug, Clone)]
pub struct PairedCountMin {
    a: CountMin,
    b: CountMin,
    /// item = signed log ratio
    heap: IndexedHeap<f64>,
    capacity: usize,
}

impl PairedCountMin {
    pub fn new(capacity: usize, width: usize, depth: usize, seed: u64) -> Result<Self> {
        Ok(Self {
            a: CountMin::new(width, depth, seed)?,
            b: CountMin::new(width, depth, seed ^ 0x5bd1_e995)?,
            heap: IndexedHeap::with_capacity(capacity),
            capacity,
        })
    }

    /// Heap plus two `width x depth` arrays under the 4-byte cost model.
    pub fn memory_cost(&self) -> usize {
        8 * self.capacity + 2 * 4 * self.a.width() * self.a.depth()
    }

    pub fn observe(&mut self, item: FeatureId, label: Label) {
        match label {
            Label::Positive => self.a.update(item, 1.0),
            Label::Negative => self.b.update(item, 1.0),
        }
        .expect("unit increment");
        let r = ((self.a.query(item) + 1.0) / (self.b.query(item) + 1.0)).ln();
        if self.heap.contains(item) || self.heap.len() < self.capacity {
            self.heap.upsert(item, r.abs(), r);
        } else if self.heap.peek_min().is_some_and(|m| r.abs() > m.key) {
            self.heap.pop_min();
            self.heap.upsert(item, r.abs(), r);
        }
    }

    pub fn top_k(&self, k: usize) -> Result<TopKEstimate> {
        check_top_k(k, self.capacity)?;
        Ok(TopKEstimate::ranked(self.heap.iter().map(|e| (e.id, e.item)).collect(), k))
    }

    pub fn detect(&mut self, a: &[FeatureId], b: &[FeatureId], k: usize, phi: f64) -> Result<DeltoidReport> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::usage("deltoid detection needs two nonempty streams"));
        }
        for (item, label) in interleave(a, b) {
            self.observe(item, label);
        }
        Ok(report(self.top_k(k)?.entries, &true_deltoids(a, b, phi)))
    }
}

/// Two shuffled streams: `noise_items` items occurring `noise_occurrences`
/// times in each, plus `planted` deltoids occurring `major` times in one
/// stream and `minor` in the other (alternating which stream is heavy).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltoidSpec {
    pub noise_items: u32,
    pub noise_occurrences: u32,
    pub planted: u32,
    pub major: u32,
    pub minor: u32,
    pub seed: u64,
}

impl Default for DeltoidSpec {
    fn default() -> Self {
        Self {
            noise_items: 2000,
            noise_occurrences: 50,
            planted: 20,
            major: 100,
            minor: 10,
            seed: 0,
        }
    }
}

impl DeltoidSpec {
    /// Planted items are `noise_items .. noise_items + planted`.
    pub fn planted_ids(&self) -> impl Iterator<Item = FeatureId> {
        self.noise_items..self.noise_items + self.planted
    }

    pub fn generate(&self) -> (Vec<FeatureId>, Vec<FeatureId>) {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.seed, Stream::Data));
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 0..self.noise_items {
            for _ in 0..self.noise_occurrences {
                a.push(i);
                b.push(i);
            }
        }
        for (j, i) in self.planted_ids().enumerate() {
            let (heavy, light) = if j % 2 == 0 { (&mut a, &mut b) } else { (&mut b, &mut a) };
            heavy.extend(std::iter::repeat_n(i, self.major as usize));
            light.extend(std::iter::repeat_n(i, self.minor as usize));
        }
        a.shuffle(&mut rng);
        b.shuffle(&mut rng);
        (a, b)
    }
}
