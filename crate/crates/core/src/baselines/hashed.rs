use crate::error::Result;
use crate::hashing::{FeatureId, HashFamily};
use crate::learner::{Learner, TopKEstimate};
use crate::model::OptimizerConfig;
use crate::sketch::CountSketch;
use crate::sparse::{Label, SparseVector};
use crate::wm::WmSketch;

/// Signed feature hashing into `width` weights.
///
/// This is exactly a weight-median sketch of depth one (the median of a
/// single row is the row), so it delegates to one. The optional passive heap
/// only serves `top_k`.
#[derive(Debug, Clone)]
pub struct HashedModel {
    inner: WmSketch,
}

impl HashedModel {
    pub fn new(width: usize, heap_capacity: usize, seed: u64, opt: OptimizerConfig) -> Result<Self> {
        Ok(Self {
            inner: WmSketch::new(width, 1, heap_capacity, seed, opt)?,
        })
    }

    pub fn with_family(family: HashFamily, heap_capacity: usize, opt: OptimizerConfig) -> Result<Self> {
        if family.depth() != 1 {
            return Err(crate::error::Error::usage("feature hashing uses a single hash row"));
        }
        Ok(Self {
            inner: WmSketch::with_family(family, heap_capacity, opt)?,
        })
    }

    pub fn width(&self) -> usize {
        self.inner.sketch().width()
    }

    pub fn table(&self) -> &CountSketch {
        self.inner.sketch()
    }
}

impl Learner for HashedModel {
    fn margin(&self, x: &SparseVector) -> f64 {
        self.inner.margin(x)
    }

    fn update(&mut self, x: &SparseVector, y: Label) -> f64 {
        self.inner.update(x, y)
    }

    fn weight(&self, feature: FeatureId) -> f64 {
        self.inner.weight(feature)
    }

    fn top_k(&self, k: usize) -> Result<TopKEstimate> {
        self.inner.top_k(k)
    }

    fn steps(&self) -> u64 {
        self.inner.steps()
    }

    fn memory_cost(&self) -> usize {
        self.inner.memory_cost()
    }
}

#[cfg(test)]
mod tests {
    use super::super::testutil::{close, stream, NaiveOgd};
    use super::*;
    use crate::hashing::BucketScheme;
    use crate::model::{Loss, LrSchedule};

    #[test]
    fn injective_hash_equals_dense() {
        let opt = OptimizerConfig::new(Loss::Logistic, LrSchedule::inverse_sqrt(0.2), 1e-2);
        let fam = HashFamily::with_scheme(1, 1, 64, BucketScheme::Modulo).unwrap();
        let mut m = HashedModel::with_family(fam, 0, opt).unwrap();
        let mut naive = NaiveOgd::new(opt);
        for (x, y) in stream(2000, 50) {
            assert!(close(m.update(&x, y), naive.update(&x, y)));
        }
        for f in 0..50 {
            assert!(close(m.weight(f), naive.weight(f)));
        }
    }

    #[test]
    fn colliding_features_share_a_weight() {
        let fam = HashFamily::with_scheme(1, 1, 8, BucketScheme::Modulo).unwrap();
        let mut m = HashedModel::with_family(fam, 0, OptimizerConfig::default()).unwrap();
        m.update(&SparseVector::indicator(3), Label::Positive);
        let a = m.margin(&SparseVector::indicator(3));
        let b = m.margin(&SparseVector::indicator(11));
        let signs = m.table().family().sign(0, 3).unwrap() * m.table().family().sign(0, 11).unwrap();
        assert!(a > 0.0);
        assert_eq!(b, signs * a);
    }

    #[test]
    fn deterministic_under_seed() {
        let run = |seed| {
            let mut m = HashedModel::new(16, 4, seed, OptimizerConfig::default()).unwrap();
            for (x, y) in stream(300, 40) {
                m.update(&x, y);
            }
            m.table().values().to_vec()
        };
        assert_eq!(run(3), run(3));
        assert_ne!(run(3), run(4));
    }
}
