//! Count-Sketch and Count-Min sketch.
//!
//! Both store `depth` rows of `width` accumulators in one flat row-major
//! array of `k = depth * width` values.

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::hashing::{BucketScheme, FeatureId, HashFamily};
use crate::snapshot::{Decoder, Encoder};

/// Median of a small slice. Even lengths average the two central values.
pub fn median(values: &mut [f64]) -> f64 {
    let n = values.len();
    match n {
        0 => 0.0,
        1 => values[0],
        2 => 0.5 * (values[0] + values[1]),
        _ => {
            values.sort_unstable_by(f64::total_cmp);
            if n % 2 == 1 {
                values[n / 2]
            } else {
                0.5 * (values[n / 2 - 1] + values[n / 2])
            }
        }
    }
}

/// Count-Sketch: signed linear projection with median-of-rows recovery.
#[derive(Debug, Clone)]
pub struct CountSketch {
    family: HashFamily,
    values: Vec<f64>,
}

pub(crate) const CSK_MAGIC: &[u8; 4] = b"CSK1";

impl CountSketch {
    /// Sketch of total size `k` split into `depth` rows.
    pub fn new(k: usize, depth: usize, seed: u64) -> Result<Self> {
        if depth == 0 || k == 0 || !k.is_multiple_of(depth) {
            return Err(Error::usage(format!(
                "sketch size {k} must be a positive multiple of depth {depth}"
            )));
        }
        Ok(Self::from_family(HashFamily::new(seed, depth, k / depth)?))
    }

    pub fn from_family(family: HashFamily) -> Self {
        let k = family.depth() * family.width();
        Self {
            family,
            values: vec![0.0; k],
        }
    }

    pub fn family(&self) -> &HashFamily {
        &self.family
    }

    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn depth(&self) -> usize {
        self.family.depth()
    }

    pub fn width(&self) -> usize {
        self.family.width()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn update(&mut self, feature: FeatureId, delta: f64) -> Result<()> {
        if !delta.is_finite() {
            return Err(Error::invalid(format!("non-finite sketch update {delta}")));
        }
        self.add_signed(feature, delta);
        Ok(())
    }

    /// `values[j][h_j(i)] += sigma_j(i) * delta` for every row, unchecked.
    #[inline]
    pub(crate) fn add_signed(&mut self, feature: FeatureId, delta: f64) {
        let width = self.family.width();
        for (j, row) in self.family.rows().iter().enumerate() {
            self.values[j * width + row.bucket(feature)] += row.sign(feature) * delta;
        }
    }

    /// Sum over rows of `sigma_j(i) * values[j][h_j(i)]`.
    #[inline]
    pub(crate) fn signed_sum(&self, feature: FeatureId) -> f64 {
        let width = self.family.width();
        self.family
            .rows()
            .iter()
            .enumerate()
            .map(|(j, row)| row.sign(feature) * self.values[j * width + row.bucket(feature)])
            .sum()
    }

    /// Median over rows of `sigma_j(i) * values[j][h_j(i)]`.
    pub fn query(&self, feature: FeatureId) -> f64 {
        let width = self.family.width();
        let mut est: SmallVec<[f64; 32]> = self
            .family
            .rows()
            .iter()
            .enumerate()
            .map(|(j, row)| row.sign(feature) * self.values[j * width + row.bucket(feature)])
            .collect();
        median(&mut est)
    }

    pub fn merge(&self, other: &CountSketch) -> Result<CountSketch> {
        if !self.family.compatible(&other.family) {
            return Err(Error::usage("cannot merge sketches with different size, depth or seed"));
        }
        let mut out = self.clone();
        for (a, b) in out.values.iter_mut().zip(&other.values) {
            *a += b;
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// `CSK1`: magic, then k, s, seed as u64, then k f64 accumulators, all little-endian.
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        if self.family.scheme() != BucketScheme::Tabulation {
            return Err(Error::Snapshot("only tabulation-hashed sketches can be saved".into()));
        }
        let mut enc = Encoder::new(CSK_MAGIC);
        enc.u64(self.size() as u64)
            .u64(self.depth() as u64)
            .u64(self.family.seed());
        for &v in &self.values {
            enc.f64(v);
        }
        Ok(enc.finish())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut dec = Decoder::new(bytes, CSK_MAGIC)?;
        let sk = Self::decode_body(&mut dec)?;
        dec.finish()?;
        Ok(sk)
    }

    pub(crate) fn decode_body(dec: &mut Decoder<'_>) -> Result<Self> {
        let k = dec.usize()?;
        let s = dec.usize()?;
        let seed = dec.u64()?;
        let mut sk = CountSketch::new(k, s, seed).map_err(|e| Error::Snapshot(e.to_string()))?;
        for v in sk.values.iter_mut() {
            *v = dec.f64()?;
        }
        Ok(sk)
    }
}

/// Count-Min sketch over nonnegative increments.
#[derive(Debug, Clone)]
pub struct CountMin {
    family: HashFamily,
    values: Vec<f64>,
}

impl CountMin {
    pub fn new(width: usize, depth: usize, seed: u64) -> Result<Self> {
        let family = HashFamily::new(seed, depth, width)?;
        Ok(Self {
            values: vec![0.0; width * depth],
            family,
        })
    }

    pub fn width(&self) -> usize {
        self.family.width()
    }

    pub fn depth(&self) -> usize {
        self.family.depth()
    }

    pub fn update(&mut self, feature: FeatureId, delta: f64) -> Result<()> {
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::invalid(format!("count-min increments must be nonnegative, got {delta}")));
        }
        let width = self.family.width();
        for (j, row) in self.family.rows().iter().enumerate() {
            self.values[j * width + row.bucket(feature)] += delta;
        }
        Ok(())
    }

    pub fn query(&self, feature: FeatureId) -> f64 {
        let width = self.family.width();
        self.family
            .rows()
            .iter()
            .enumerate()
            .map(|(j, row)| self.values[j * width + row.bucket(feature)])
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn median_conventions() {
        assert_eq!(median(&mut [3.0]), 3.0);
        assert_eq!(median(&mut [1.0, 4.0]), 2.5);
        assert_eq!(median(&mut [5.0, 1.0, 3.0]), 3.0);
        assert_eq!(median(&mut [4.0, 1.0, 3.0, 2.0]), 2.5);
    }

    #[test]
    fn lone_feature_round_trips() {
        let mut sk = CountSketch::new(64, 4, 1).unwrap();
        assert_eq!(sk.query(5), 0.0);
        sk.update(5, 2.0).unwrap();
        assert_eq!(sk.query(5), 2.0);
        sk.update(5, -2.0).unwrap();
        assert!(sk.is_zero());
    }

    #[test]
    fn rejects_non_finite_update() {
        let mut sk = CountSketch::new(8, 1, 1).unwrap();
        assert!(sk.update(1, f64::NAN).is_err());
        assert!(sk.is_zero());
    }

    #[test]
    fn size_must_be_multiple_of_depth() {
        assert!(matches!(CountSketch::new(10, 3, 0), Err(Error::Usage(_))));
        assert!(CountSketch::new(0, 1, 0).is_err());
    }

    #[test]
    fn forced_collision_matches_hand_projection() {
        // width 1: both features share the only bucket. Find a seed where
        // sigma(1) = +1 and sigma(2) = -1, then A x = 3 - 4 = -1.
        let seed = (0u64..)
            .find(|&s| {
                let f = HashFamily::new(s, 1, 1).unwrap();
                f.sign(0, 1).unwrap() > 0.0 && f.sign(0, 2).unwrap() < 0.0
            })
            .unwrap();
        let mut sk = CountSketch::new(1, 1, seed).unwrap();
        sk.update(1, 3.0).unwrap();
        sk.update(2, 4.0).unwrap();
        assert_eq!(sk.values(), &[-1.0]);
        assert_eq!(sk.query(2), 1.0);
        assert_eq!(sk.query(1), -1.0);
    }

    #[test]
    fn merge_identity_inverse_and_linearity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xs: Vec<(u32, f64)> = (0..50).map(|_| (rng.random_range(0..500), rng.random_range(-2.0..2.0))).collect();
        let ys: Vec<(u32, f64)> = (0..50).map(|_| (rng.random_range(0..500), rng.random_range(-2.0..2.0))).collect();

        let build = |items: &[(u32, f64)], scale: f64| {
            let mut sk = CountSketch::new(96, 3, 9).unwrap();
            for &(f, v) in items {
                sk.update(f, scale * v).unwrap();
            }
            sk
        };
        let sx = build(&xs, 1.0);
        let sy = build(&ys, 1.0);
        let empty = CountSketch::new(96, 3, 9).unwrap();
        assert_eq!(sx.merge(&empty).unwrap().values(), sx.values());

        let neg = build(&xs, -1.0);
        let zero = sx.merge(&neg).unwrap();
        assert!(zero.values().iter().all(|v| v.abs() < 1e-12));

        let mut both: Vec<_> = xs.clone();
        both.extend_from_slice(&ys);
        let sxy = build(&both, 1.0);
        let merged = sx.merge(&sy).unwrap();
        for f in 0..500 {
            assert!((merged.query(f) - sxy.query(f)).abs() < 1e-12);
        }
    }

    #[test]
    fn merge_rejects_mismatched_config() {
        let a = CountSketch::new(64, 2, 1).unwrap();
        let b = CountSketch::new(64, 2, 2).unwrap();
        let c = CountSketch::new(64, 4, 1).unwrap();
        assert!(matches!(a.merge(&b), Err(Error::Usage(_))));
        assert!(matches!(a.merge(&c), Err(Error::Usage(_))));
    }

    #[test]
    fn sign_consistency() {
        let mut a = CountSketch::new(40, 5, 4).unwrap();
        let mut b = CountSketch::new(40, 5, 4).unwrap();
        for f in 0..100u32 {
            let v = (f as f64).sin();
            a.update(f, v).unwrap();
            b.update(f, -v).unwrap();
        }
        for f in 0..100u32 {
            assert_eq!(a.query(f), -b.query(f));
        }
    }

    #[test]
    fn snapshot_round_trip() {
        let mut sk = CountSketch::new(30, 3, 17).unwrap();
        sk.update(4, 1.5).unwrap();
        sk.update(9, -0.25).unwrap();
        let bytes = sk.to_bytes().unwrap();
        assert_eq!(&bytes[..4], b"CSK1");
        assert_eq!(bytes.len(), 4 + 24 + 30 * 8);
        assert_eq!(u64::from_le_bytes(bytes[4..12].try_into().unwrap()), 30);
        assert_eq!(u64::from_le_bytes(bytes[12..20].try_into().unwrap()), 3);
        assert_eq!(u64::from_le_bytes(bytes[20..28].try_into().unwrap()), 17);
        let back = CountSketch::from_bytes(&bytes).unwrap();
        assert_eq!(back.values(), sk.values());
        assert_eq!(back.query(4), sk.query(4));
        assert!(CountSketch::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn count_min_basics() {
        let mut cm = CountMin::new(64, 3, 1).unwrap();
        assert_eq!(cm.query(1), 0.0);
        cm.update(1, 1.0).unwrap();
        assert_eq!(cm.query(1), 1.0);
        for _ in 0..9 {
            cm.update(1, 1.0).unwrap();
        }
        assert_eq!(cm.query(1), 10.0);
        assert!(cm.update(2, -1.0).is_err());
    }

    #[test]
    fn count_min_width_one_returns_total_mass() {
        let mut cm = CountMin::new(1, 2, 5).unwrap();
        for f in 0..20u32 {
            cm.update(f, 0.5).unwrap();
        }
        assert_eq!(cm.query(12345), 10.0);
    }

    #[test]
    fn count_min_never_underestimates_and_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut cm = CountMin::new(128, 4, 2).unwrap();
        let mut exact = std::collections::HashMap::<u32, f64>::new();
        let mut prev = vec![0.0; 2000];
        for step in 0..10_000 {
            let f = rng.random_range(0..2000u32);
            cm.update(f, 1.0).unwrap();
            *exact.entry(f).or_default() += 1.0;
            if step % 1000 == 999 {
                for g in 0..2000u32 {
                    let q = cm.query(g);
                    assert!(q >= exact.get(&g).copied().unwrap_or(0.0));
                    assert!(q >= prev[g as usize]);
                    prev[g as usize] = q;
                }
            }
        }
    }
}
