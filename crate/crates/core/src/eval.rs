//! Metrics, the 4-byte cost model, and budget-constrained configurations.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashing::FeatureId;
use crate::learner::TopKEstimate;
use crate::model::predict_label;
use crate::sparse::Label;

/// Bytes charged per feature id, weight and auxiliary value (count, key).
pub const BYTES_PER_ID: usize = 4;
pub const BYTES_PER_WEIGHT: usize = 4;
pub const BYTES_PER_AUX: usize = 4;

/// Largest sketch depth considered.
pub const MAX_DEPTH: usize = 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodKind {
    Wm,
    Awm,
    Trunc,
    Ptrunc,
    #[serde(rename = "ss")]
    SpaceSaving,
    Hash,
    #[serde(rename = "cmf")]
    CmFrequent,
    Dense,
}

impl MethodKind {
    pub const ALL: [MethodKind; 8] = [
        MethodKind::Wm,
        MethodKind::Awm,
        MethodKind::Trunc,
        MethodKind::Ptrunc,
        MethodKind::SpaceSaving,
        MethodKind::Hash,
        MethodKind::CmFrequent,
        MethodKind::Dense,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MethodKind::Wm => "wm",
            MethodKind::Awm => "awm",
            MethodKind::Trunc => "trunc",
            MethodKind::Ptrunc => "ptrunc",
            MethodKind::SpaceSaving => "ss",
            MethodKind::Hash => "hash",
            MethodKind::CmFrequent => "cmf",
            MethodKind::Dense => "dense",
        }
    }

    /// Whether the method has a sketch (width/depth) component.
    pub fn has_sketch(self) -> bool {
        matches!(self, MethodKind::Wm | MethodKind::Awm | MethodKind::Hash | MethodKind::CmFrequent)
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MethodKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::usage(format!("unknown method {s:?}")))
    }
}

/// Shape of one learner. `width` is per row; the sketch holds `width * depth` weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MethodConfig {
    pub kind: MethodKind,
    pub heap_capacity: usize,
    pub width: usize,
    pub depth: usize,
    pub budget_bytes: usize,
}

impl MethodConfig {
    pub fn new(kind: MethodKind, heap_capacity: usize, width: usize, depth: usize) -> Self {
        let mut cfg = Self {
            kind,
            heap_capacity,
            width,
            depth,
            budget_bytes: 0,
        };
        cfg.budget_bytes = memory_cost(&cfg).unwrap_or(0);
        cfg
    }

    pub fn with_budget(mut self, budget_bytes: usize) -> Self {
        self.budget_bytes = budget_bytes;
        self
    }

    pub fn cost(&self) -> Option<usize> {
        memory_cost(self)
    }
}

/// Bytes under the cost model; `None` for the unbudgeted dense model.
pub fn memory_cost(cfg: &MethodConfig) -> Option<usize> {
    let heap = cfg.heap_capacity;
    let entry = BYTES_PER_ID + BYTES_PER_WEIGHT;
    let sketch = BYTES_PER_WEIGHT * cfg.width * cfg.depth;
    Some(match cfg.kind {
        MethodKind::Trunc => entry * heap,
        MethodKind::Ptrunc | MethodKind::SpaceSaving => (entry + BYTES_PER_AUX) * heap,
        MethodKind::Hash => BYTES_PER_WEIGHT * cfg.width + entry * heap,
        MethodKind::Wm | MethodKind::Awm | MethodKind::CmFrequent => sketch + entry * heap,
        MethodKind::Dense => return None,
    })
}

/// Bounds of the configuration grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridConstraints {
    pub max_depth: usize,
    /// Heap capacities and widths are `2^0 ..= 2^max_log2`.
    pub max_log2: u32,
}

impl Default for GridConstraints {
    fn default() -> Self {
        Self {
            max_depth: MAX_DEPTH,
            max_log2: 24,
        }
    }
}

fn powers(max_log2: u32) -> impl Iterator<Item = usize> {
    (0..=max_log2).map(|e| 1usize << e)
}

/// Candidate (heap, width, depth) triples for a method, before the budget filter.
fn grid(kind: MethodKind, g: GridConstraints) -> Vec<(usize, usize, usize)> {
    let heaps_with_zero: Vec<usize> = std::iter::once(0).chain(powers(g.max_log2)).collect();
    let heaps: Vec<usize> = powers(g.max_log2).collect();
    let widths: Vec<usize> = powers(g.max_log2).collect();
    let mut out = Vec::new();
    match kind {
        MethodKind::Trunc | MethodKind::Ptrunc | MethodKind::SpaceSaving => {
            out.extend(heaps.iter().map(|&h| (h, 0, 0)));
        }
        MethodKind::Hash => {
            for &h in &heaps_with_zero {
                out.extend(widths.iter().map(|&w| (h, w, 1)));
            }
        }
        MethodKind::Wm | MethodKind::Awm | MethodKind::CmFrequent => {
            let hs = if kind == MethodKind::CmFrequent { &heaps } else { &heaps_with_zero };
            for &h in hs {
                for &w in &widths {
                    out.extend((1..=g.max_depth).map(|d| (h, w, d)));
                }
            }
        }
        MethodKind::Dense => {}
    }
    out
}

fn config_order(a: &MethodConfig, b: &MethodConfig) -> std::cmp::Ordering {
    b.cost()
        .cmp(&a.cost())
        .then(b.heap_capacity.cmp(&a.heap_capacity))
        .then(b.width.cmp(&a.width))
        .then(a.depth.cmp(&b.depth))
}

/// Every grid point within `budget`, most expensive first.
pub fn enumerate_configs(kind: MethodKind, budget: usize, g: GridConstraints) -> Vec<MethodConfig> {
    let mut out: Vec<MethodConfig> = grid(kind, g)
        .into_iter()
        // prune before building: costs only grow along each axis
        .filter(|&(h, w, _)| 8 * h <= budget && 4 * w <= budget)
        .map(|(h, w, d)| MethodConfig::new(kind, h, w, d).with_budget(budget))
        .filter(|c| c.cost().is_some_and(|cost| cost <= budget))
        .collect();
    out.sort_by(config_order);
    out
}

fn largest_pow2_at_most(x: usize) -> usize {
    if x == 0 {
        0
    } else {
        1 << (usize::BITS - 1 - x.leading_zeros())
    }
}

/// Fixed shape for a budget, without any data-dependent search.
///
/// * `awm`: half the budget to the heap (power of two), the rest to one row.
/// * `wm`: heap 128, width 128, as many rows as fit; width doubles while depth exceeds 31.
/// * `trunc`: `K = budget / 8`; `ptrunc`, `ss`: `K = budget / 12`.
/// * `hash`: `budget / 4` weights, no heap.
/// * `cmf`: half to the heap, the rest to a depth-2 Count-Min.
pub fn preset(kind: MethodKind, budget: usize) -> Result<MethodConfig> {
    let split_heap = |b: usize| largest_pow2_at_most(b / 2 / 8);
    let cfg = match kind {
        MethodKind::Awm => {
            let h = split_heap(budget);
            let w = largest_pow2_at_most((budget - 8 * h) / 4);
            MethodConfig::new(kind, h, w, 1)
        }
        MethodKind::Wm => {
            let (h, mut w) = (128usize, 128usize);
            if budget < 8 * h + 4 * w {
                let h = split_heap(budget);
                let w = largest_pow2_at_most((budget - 8 * h) / 4);
                MethodConfig::new(kind, h, w, 1)
            } else {
                let rest = budget - 8 * h;
                while rest / (4 * w) > MAX_DEPTH {
                    w *= 2;
                }
                MethodConfig::new(kind, h, w, rest / (4 * w))
            }
        }
        MethodKind::Trunc => MethodConfig::new(kind, budget / 8, 0, 0),
        MethodKind::Ptrunc | MethodKind::SpaceSaving => MethodConfig::new(kind, budget / 12, 0, 0),
        MethodKind::Hash => MethodConfig::new(kind, 0, budget / 4, 1),
        MethodKind::CmFrequent => {
            let h = split_heap(budget);
            let w = largest_pow2_at_most((budget - 8 * h) / 8);
            MethodConfig::new(kind, h, w, 2)
        }
        MethodKind::Dense => MethodConfig::new(kind, 0, 0, 0),
    };
    let invalid = match kind {
        MethodKind::Dense => false,
        MethodKind::Trunc | MethodKind::Ptrunc | MethodKind::SpaceSaving => cfg.heap_capacity == 0,
        MethodKind::Hash => cfg.width == 0,
        _ => cfg.width == 0 || cfg.depth == 0,
    };
    if invalid {
        return Err(Error::usage(format!("budget of {budget} B is too small for {kind}")));
    }
    Ok(cfg.with_budget(budget))
}

/// Scores a candidate config; lower is better.
pub type Scorer<'a> = &'a mut dyn FnMut(&MethodConfig) -> Result<f64>;

/// Picks a configuration for `budget`: the preset, or, given a scorer, the
/// lowest-scoring grid point among those using more than half the budget
/// (ties go to the earlier, more expensive config).
pub fn select_config(
    kind: MethodKind,
    budget: usize,
    scorer: Option<Scorer<'_>>,
) -> Result<MethodConfig> {
    let Some(score) = scorer else {
        return preset(kind, budget);
    };
    let mut best: Option<(f64, MethodConfig)> = None;
    for cfg in enumerate_configs(kind, budget, GridConstraints::default())
        .into_iter()
        .filter(|c| c.cost().unwrap_or(0) * 2 > budget)
    {
        let s = score(&cfg)?;
        if best.as_ref().is_none_or(|(b, _)| s < *b) {
            best = Some((s, cfg));
        }
    }
    best.map(|(_, c)| c)
        .ok_or_else(|| Error::usage(format!("no {kind} configuration fits in {budget} B")))
}

/// Nonzero entries of `w` ranked by `|w|` descending, id ascending.
fn ranked(w: &HashMap<FeatureId, f64>) -> Vec<(FeatureId, f64)> {
    TopKEstimate::ranked(w.iter().filter(|(_, &v)| v != 0.0).map(|(&f, &v)| (f, v)).collect(), usize::MAX).entries
}

/// The true top-`k` of a weight map.
pub fn true_top_k(w_star: &HashMap<FeatureId, f64>, k: usize) -> TopKEstimate {
    TopKEstimate::ranked(w_star.iter().filter(|(_, &v)| v != 0.0).map(|(&f, &v)| (f, v)).collect(), k)
}

/// `‖w^K − w*‖₂ / ‖w*^K − w*‖₂` with both top-K vectors taken as sparse
/// vectors in the full space. Only the first `k` entries of `estimate` count.
///
/// Zero denominator: 1 when the numerator is also zero, else infinity.
pub fn rel_err(estimate: &TopKEstimate, w_star: &HashMap<FeatureId, f64>, k: usize) -> f64 {
    let est: HashMap<FeatureId, f64> = estimate.entries.iter().take(k).copied().collect();
    let truth = ranked(w_star);
    // Summing both norms in the same order makes the true top-K give exactly 1.
    let mut num = 0.0;
    let mut den = 0.0;
    for (rank, &(f, w)) in truth.iter().enumerate() {
        if rank >= k {
            den += w * w;
        }
        let d = est.get(&f).map_or(w, |&e| e - w);
        num += d * d;
    }
    let mut extra: Vec<(FeatureId, f64)> = est
        .iter()
        .filter(|(f, _)| w_star.get(f).is_none_or(|&w| w == 0.0))
        .map(|(&f, &e)| (f, e))
        .collect();
    extra.sort_by_key(|e| e.0);
    for (_, e) in extra {
        num += e * e;
    }
    if den == 0.0 {
        return if num == 0.0 { 1.0 } else { f64::INFINITY };
    }
    // the true top-K minimizes the numerator; guard against rounding below 1
    (num / den).sqrt().max(1.0)
}

/// Cumulative mistakes over examples, each predicted before its update.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorTracker {
    pub mistakes: u64,
    pub examples: u64,
}

impl ErrorTracker {
    pub fn record(&mut self, margin: f64, label: Label) {
        self.examples += 1;
        if predict_label(margin) != label {
            self.mistakes += 1;
        }
    }

    pub fn rate(&self) -> Result<f64> {
        if self.examples == 0 {
            return Err(Error::usage("error rate of an empty stream"));
        }
        Ok(self.mistakes as f64 / self.examples as f64)
    }
}

/// Online error rate of `(pre-update margin, label)` pairs.
pub fn online_error_rate(stream: impl IntoIterator<Item = (f64, Label)>) -> Result<f64> {
    let mut t = ErrorTracker::default();
    for (m, y) in stream {
        t.record(m, y);
    }
    t.rate()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cost_model_examples() {
        assert_eq!(MethodConfig::new(MethodKind::Trunc, 128, 0, 0).cost(), Some(1024));
        assert_eq!(MethodConfig::new(MethodKind::Awm, 128, 256, 1).cost(), Some(2048));
        assert_eq!(MethodConfig::new(MethodKind::Trunc, 0, 0, 0).cost(), Some(0));
        assert_eq!(MethodConfig::new(MethodKind::Wm, 0, 0, 0).cost(), Some(0));
        assert_eq!(MethodConfig::new(MethodKind::Ptrunc, 10, 0, 0).cost(), Some(120));
        assert_eq!(MethodConfig::new(MethodKind::SpaceSaving, 10, 0, 0).cost(), Some(120));
        assert_eq!(MethodConfig::new(MethodKind::Hash, 0, 512, 1).cost(), Some(2048));
        assert_eq!(MethodConfig::new(MethodKind::Dense, 0, 0, 0).cost(), None);
    }

    #[test]
    fn cost_monotone_in_each_field() {
        for kind in MethodKind::ALL.into_iter().filter(|&k| k != MethodKind::Dense) {
            let base = MethodConfig::new(kind, 4, 8, 2).cost().unwrap();
            assert!(MethodConfig::new(kind, 5, 8, 2).cost().unwrap() >= base);
            assert!(MethodConfig::new(kind, 4, 9, 2).cost().unwrap() >= base);
            assert!(MethodConfig::new(kind, 4, 8, 3).cost().unwrap() >= base);
        }
    }

    /// Independent grid walk: every combination, filtered after the fact.
    fn brute_force(kind: MethodKind, budget: usize) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        let pows: Vec<usize> = (0..=24).map(|e| 1usize << e).collect();
        let zero_and_pows: Vec<usize> = std::iter::once(0).chain(pows.iter().copied()).collect();
        for &h in &zero_and_pows {
            for &w in &zero_and_pows {
                for d in 0..=31 {
                    let ok = match kind {
                        MethodKind::Trunc | MethodKind::Ptrunc | MethodKind::SpaceSaving => h > 0 && w == 0 && d == 0,
                        MethodKind::Hash => w > 0 && d == 1,
                        MethodKind::Wm | MethodKind::Awm => w > 0 && d > 0,
                        MethodKind::CmFrequent => h > 0 && w > 0 && d > 0,
                        MethodKind::Dense => false,
                    };
                    if !ok {
                        continue;
                    }
                    let cost = match kind {
                        MethodKind::Trunc => 8 * h,
                        MethodKind::Ptrunc | MethodKind::SpaceSaving => 12 * h,
                        MethodKind::Hash => 4 * w + 8 * h,
                        _ => 4 * w * d + 8 * h,
                    };
                    if cost <= budget {
                        out.push((h, w, d));
                    }
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn enumeration_equals_brute_force() {
        for kind in MethodKind::ALL {
            for budget in [1, 7, 64, 1000, 2048, 8192] {
                let got = enumerate_configs(kind, budget, GridConstraints::default());
                for w in got.windows(2) {
                    assert!(w[0].cost() >= w[1].cost());
                }
                let mut triples: Vec<_> = got.iter().map(|c| (c.heap_capacity, c.width, c.depth)).collect();
                triples.sort();
                assert_eq!(triples, brute_force(kind, budget), "{kind} @ {budget}");
            }
        }
    }

    #[test]
    fn enumeration_includes_table_row_and_respects_budget() {
        let got = enumerate_configs(MethodKind::Awm, 2048, GridConstraints::default());
        assert!(got.iter().any(|c| (c.heap_capacity, c.width, c.depth) == (128, 256, 1)));
        assert!(got.iter().all(|c| c.cost().unwrap() <= 2048));
        assert!(enumerate_configs(MethodKind::Trunc, 7, GridConstraints::default()).is_empty());
    }

    #[test]
    fn presets() {
        let shape = |c: MethodConfig| (c.heap_capacity, c.width, c.depth);
        assert_eq!(shape(preset(MethodKind::Awm, 2048).unwrap()), (128, 256, 1));
        assert_eq!(shape(preset(MethodKind::Wm, 2048).unwrap()), (128, 128, 2));
        assert_eq!(shape(preset(MethodKind::Wm, 8192).unwrap()), (128, 128, 14));
        assert_eq!(shape(preset(MethodKind::Wm, 32768).unwrap()), (128, 256, 31));
        assert_eq!(shape(preset(MethodKind::Trunc, 8192).unwrap()), (1024, 0, 0));
        assert_eq!(shape(preset(MethodKind::SpaceSaving, 8192).unwrap()), (682, 0, 0));
        for kind in MethodKind::ALL {
            for budget in [512, 2048, 8192, 32768] {
                let c = preset(kind, budget).unwrap();
                assert!(c.cost().unwrap_or(0) <= budget, "{kind} {budget}");
            }
        }
        assert!(preset(MethodKind::Trunc, 4).is_err());
    }

    #[test]
    fn grid_search_picks_lowest_score() {
        let mut scorer = |c: &MethodConfig| -> Result<f64> { Ok((c.heap_capacity as f64 - 128.0).abs() + (c.width as f64 - 256.0).abs() + c.depth as f64) };
        let c = select_config(MethodKind::Awm, 2048, Some(&mut scorer)).unwrap();
        assert_eq!((c.heap_capacity, c.width, c.depth), (128, 256, 1));
    }

    fn wmap(v: &[(u32, f64)]) -> HashMap<u32, f64> {
        v.iter().copied().collect()
    }

    #[test]
    fn rel_err_examples() {
        let w = wmap(&[(1, 3.0), (2, 2.0), (3, 1.0)]);
        assert_eq!(rel_err(&true_top_k(&w, 2), &w, 2), 1.0);
        let e = rel_err(&TopKEstimate::default(), &w, 2);
        assert!((e - 14f64.sqrt()).abs() < 1e-12);
        assert!((e - 3.7417).abs() < 1e-4);
        // exactly K-sparse truth
        let w2 = wmap(&[(1, 3.0), (2, 2.0)]);
        assert_eq!(rel_err(&true_top_k(&w2, 2), &w2, 2), 1.0);
        assert_eq!(rel_err(&TopKEstimate::default(), &w2, 2), f64::INFINITY);
    }

    #[test]
    fn rel_err_counts_spurious_entries() {
        let w = wmap(&[(1, 3.0), (2, 2.0), (3, 1.0)]);
        let est = TopKEstimate::ranked(vec![(1, 3.0), (9, 2.0)], 2);
        // (0, 2, 1, 2) against denominator 1
        assert!((rel_err(&est, &w, 2) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn error_rate() {
        let p = Label::Positive;
        let n = Label::Negative;
        assert_eq!(online_error_rate(vec![(1.0, p), (-1.0, n)]).unwrap(), 0.0);
        assert_eq!(online_error_rate(vec![(1.0, n), (-1.0, p)]).unwrap(), 1.0);
        let mixed: Vec<_> = (0..10).map(|i| (1.0, if i < 3 { n } else { p })).collect();
        assert!((online_error_rate(mixed).unwrap() - 0.3).abs() < 1e-15);
        assert!(matches!(online_error_rate(Vec::new()), Err(Error::Usage(_))));
        // margin 0 predicts positive
        assert_eq!(online_error_rate(vec![(0.0, p)]).unwrap(), 0.0);
    }
}
