use std::collections::HashMap;

use crate::hashing::FeatureId;
use crate::sparse::Label;

/// Exact counts for one binary attribute against a binary outcome.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RiskCounts {
    /// `n(x=1, y=1)`
    pub exposed_pos: u64,
    /// `n(x=1)`
    pub exposed: u64,
    /// `n(x=0, y=1)`
    pub unexposed_pos: u64,
    /// `n(x=0)`
    pub unexposed: u64,
}

/// `p(y=1|x=1) / p(y=1|x=0)`. Infinity when nothing unexposed was
/// positive; `None` when the ratio is undefined (attribute never seen, or 0/0).
pub fn relative_risk(c: &RiskCounts) -> Option<f64> {
    if c.exposed == 0 {
        return None;
    }
    let exposed = c.exposed_pos as f64 / c.exposed as f64;
    if c.unexposed == 0 || c.unexposed_pos == 0 {
        return (exposed > 0.0).then_some(f64::INFINITY);
    }
    Some(exposed / (c.unexposed_pos as f64 / c.unexposed as f64))
}

/// Full per-attribute counts over rows of attributes (the exact oracle).
#[derive(Debug, Clone, Default)]
pub struct RiskTable {
    exposed: HashMap<FeatureId, (u64, u64)>,
    rows: u64,
    positives: u64,
}

impl RiskTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records one row; repeated attributes within a row count once.
    pub fn observe(&mut self, attributes: &[FeatureId], label: Label) {
        self.rows += 1;
        let pos = label == Label::Positive;
        self.positives += pos as u64;
        let mut seen: Vec<FeatureId> = attributes.to_vec();
        seen.sort_unstable();
        seen.dedup();
        for a in seen {
            let e = self.exposed.entry(a).or_default();
            e.0 += pos as u64;
            e.1 += 1;
        }
    }

    pub fn rows(&self) -> u64 {
        self.rows
    }

    pub fn counts(&self, attribute: FeatureId) -> RiskCounts {
        let (exposed_pos, exposed) = self.exposed.get(&attribute).copied().unwrap_or((0, 0));
        RiskCounts {
            exposed_pos,
            exposed,
            unexposed_pos: self.positives - exposed_pos,
            unexposed: self.rows - exposed,
        }
    }

    pub fn relative_risk(&self, attribute: FeatureId) -> Option<f64> {
        relative_risk(&self.counts(attribute))
    }

    pub fn attributes(&self) -> impl Iterator<Item = FeatureId> + '_ {
        self.exposed.keys().copied()
    }
}
