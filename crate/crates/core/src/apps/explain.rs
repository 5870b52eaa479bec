//! Explaining outliers: train on one 1-sparse example per observed
//! attribute, labelled by whether the row is an outlier, and report the
//! heaviest attributes next to their exact relative risks.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::risk::RiskTable;
use crate::error::{Error, Result};
use crate::hashing::{hash_string, FeatureId};
use crate::learner::Learner;
use crate::seed::{derive_seed, Stream};
use crate::sparse::{Label, SparseVector};

/// One observation: its categorical attributes and whether it is an outlier.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeRow {
    pub attributes: Vec<FeatureId>,
    pub label: Label,
}

impl AttributeRow {
    /// Attribute ids from `column=value` strings.
    pub fn from_named(pairs: &[(&str, &str)], label: Label) -> Self {
        Self {
            attributes: pairs.iter().map(|(c, v)| attribute_id(c, v)).collect(),
            label,
        }
    }
}

/// `hash_string("column=value")`.
pub fn attribute_id(column: &str, value: &str) -> FeatureId {
    hash_string(format!("{column}={value}").as_bytes())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplainEntry {
    pub feature: FeatureId,
    pub weight: f64,
    /// exact, from full counts; `None` when undefined
    pub relative_risk: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplainReport {
    pub rows: u64,
    pub entries: Vec<ExplainEntry>,
    /// Pearson correlation of weight against ln(relative risk) over entries
    /// with a finite, positive relative risk.
    pub correlation: Option<f64>,
}

/// Trains `learner` (examples in row order, attributes in row order) and
/// reports its top `k` attributes.
pub fn explain_stream(
    rows: impl IntoIterator<Item = AttributeRow>,
    learner: &mut dyn Learner,
    k: usize,
) -> Result<ExplainReport> {
    let mut table = RiskTable::new();
    for row in rows {
        table.observe(&row.attributes, row.label);
        for &a in &row.attributes {
            learner.update(&SparseVector::indicator(a), row.label);
        }
    }
    if table.rows() == 0 {
        return Err(Error::usage("explain needs at least one row"));
    }
    let top = learner.top_k(k)?;
    let entries: Vec<ExplainEntry> = top
        .entries
        .iter()
        .map(|&(feature, weight)| ExplainEntry {
            feature,
            weight,
            relative_risk: table.relative_risk(feature),
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = entries
        .iter()
        .filter_map(|e| e.relative_risk.filter(|r| r.is_finite() && *r > 0.0).map(|r| (e.weight, r.ln())))
        .unzip();
    Ok(ExplainReport {
        rows: table.rows(),
        correlation: pearson(&xs, &ys),
        entries,
    })
}

/// Sample Pearson correlation; `None` with fewer than two points or zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Synthetic rows: `columns` categorical columns with `values` equally
/// likely values each. A row is an outlier with probability
/// `base_rate * prod(multiplier)` over its attributes (capped at 0.95),
/// where `planted` attributes get multipliers log-uniform in
/// `[1/max_multiplier, max_multiplier]` and every other attribute has 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub columns: usize,
    pub values: usize,
    pub planted: usize,
    pub base_rate: f64,
    pub max_multiplier: f64,
    pub rows: u64,
    pub seed: u64,
}

impl Default for AttributeSpec {
    fn default() -> Self {
        Self {
            columns: 5,
            values: 20,
            planted: 20,
            base_rate: 0.2,
            max_multiplier: 4.0,
            rows: 50_000,
            seed: 0,
        }
    }
}

impl AttributeSpec {
    /// Id of `value` in `column`.
    pub fn attribute(&self, column: usize, value: usize) -> FeatureId {
        (column * self.values + value) as FeatureId
    }

    /// The planted multipliers, and a row iterator.
    pub fn generate(&self) -> Result<(Vec<(FeatureId, f64)>, impl Iterator<Item = AttributeRow> + '_)> {
        if self.columns == 0 || self.values == 0 || self.planted > self.columns * self.values {
            return Err(Error::usage("attribute spec needs columns, values and planted <= columns * values"));
        }
        if !(self.base_rate > 0.0 && self.base_rate < 1.0) || !(self.max_multiplier >= 1.0) {
            return Err(Error::usage("base rate must be in (0, 1) and max multiplier >= 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.seed, Stream::Data));
        let n = self.columns * self.values;
        let mut multipliers = vec![1.0; n];
        let ln_max = self.max_multiplier.ln();
        let mut planted: Vec<(FeatureId, f64)> = index::sample(&mut rng, n, self.planted)
            .into_iter()
            .map(|i| {
                let m = rng.random_range(-ln_max..=ln_max).exp();
                multipliers[i] = m;
                (i as FeatureId, m)
            })
            .collect();
        planted.sort_by_key(|p| p.0);
        let rows = (0..self.rows).map(move |_| {
            let mut p = self.base_rate;
            let attributes: Vec<FeatureId> = (0..self.columns)
                .map(|c| {
                    let a = self.attribute(c, rng.random_range(0..self.values));
                    p *= multipliers[a as usize];
                    a
                })
                .collect();
            let label = if rng.random::<f64>() < p.min(0.95) {
                Label::Positive
            } else {
                Label::Negative
            };
            AttributeRow { attributes, label }
        });
        Ok((planted, rows))
    }
}
