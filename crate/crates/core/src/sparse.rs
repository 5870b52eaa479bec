use crate::error::{Error, Result};
use crate::hashing::FeatureId;

/// Sparse feature vector: strictly increasing feature ids with finite, nonzero values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    entries: Vec<(FeatureId, f64)>,
}

impl SparseVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vector from unordered pairs. Duplicate ids are summed and
    /// entries that sum to zero are dropped.
    pub fn from_pairs(mut pairs: Vec<(FeatureId, f64)>) -> Result<Self> {
        if let Some((id, v)) = pairs.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::invalid(format!("feature {id} has non-finite value {v}")));
        }
        pairs.sort_by_key(|&(id, _)| id);
        let mut entries: Vec<(FeatureId, f64)> = Vec::with_capacity(pairs.len());
        for (id, v) in pairs {
            match entries.last_mut() {
                Some((last, acc)) if *last == id => *acc += v,
                _ => entries.push((id, v)),
            }
        }
        entries.retain(|&(_, v)| v != 0.0);
        Ok(Self { entries })
    }

    /// 1-sparse indicator vector `e_feature`.
    pub fn indicator(feature: FeatureId) -> Self {
        Self {
            entries: vec![(feature, 1.0)],
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (FeatureId, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn entries(&self) -> &[(FeatureId, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, feature: FeatureId) -> f64 {
        self.entries
            .binary_search_by_key(&feature, |&(id, _)| id)
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    pub fn l1_norm(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v.abs()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v * v).sum::<f64>().sqrt()
    }
}

/// Binary label in `{-1, +1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn from_sign(y: f64) -> Result<Self> {
        if y == 1.0 {
            Ok(Label::Positive)
        } else if y == -1.0 {
            Ok(Label::Negative)
        } else {
            Err(Error::invalid(format!("label must be -1 or +1, got {y}")))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }
}

/// One labeled example from the stream.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledExample {
    pub label: Label,
    pub features: SparseVector,
}
