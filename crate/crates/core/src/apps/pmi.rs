//! Streaming pointwise mutual information.
//!
//! Co-occurring pairs `(u, v)` inside a sliding window are positives; for
//! each positive, `negatives` pairs with both endpoints drawn from a
//! reservoir sample of tokens are negatives. The logistic optimum for the
//! 1-sparse pair feature is `ln(p(u,v) / (negatives * p(u) p(v)))`, so the
//! PMI estimate is `weight + ln(negatives)`.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::reservoir::UnigramReservoir;
use crate::error::{Error, Result};
use crate::hashing::{hash_string, FeatureId};
use crate::learner::Learner;
use crate::seed::{derive_seed, Stream};
use crate::sparse::{Label, SparseVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PmiConfig {
    pub window: usize,
    pub negatives: usize,
    pub reservoir: usize,
}

impl Default for PmiConfig {
    fn default() -> Self {
        Self {
            window: 6,
            negatives: 5,
            reservoir: UnigramReservoir::<()>::DEFAULT_CAPACITY,
        }
    }
}

impl PmiConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(Error::usage("window must be at least 2"));
        }
        if self.negatives < 1 {
            return Err(Error::usage("need at least one negative per positive"));
        }
        if self.reservoir < 1 {
            return Err(Error::usage("reservoir capacity must be positive"));
        }
        Ok(())
    }
}

/// Feature id of the ordered pair: `hash_string("u\x1fv")`.
pub fn pair_id(u: &str, v: &str) -> FeatureId {
    let mut key = Vec::with_capacity(u.len() + v.len() + 1);
    key.extend_from_slice(u.as_bytes());
    key.push(0x1f);
    key.extend_from_slice(v.as_bytes());
    hash_string(&key)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmiEntry {
    pub u: String,
    pub v: String,
    pub feature: FeatureId,
    pub weight: f64,
    /// `weight + ln(negatives)`
    pub estimated_pmi: f64,
    /// from exact counts; `None` if the pair was never a positive
    pub exact_pmi: Option<f64>,
}

/// Exact co-occurrence counts (the oracle; not part of any memory budget).
#[derive(Debug, Clone, Default)]
struct Counts {
    pairs: HashMap<FeatureId, u64>,
    unigrams: HashMap<Arc<str>, u64>,
    n_pairs: u64,
    n_unigrams: u64,
}

/// A learner fed by a token or pair stream.
pub struct PmiStream<'a> {
    cfg: PmiConfig,
    learner: &'a mut dyn Learner,
    reservoir: UnigramReservoir<Arc<str>>,
    rng: ChaCha8Rng,
    window: VecDeque<Arc<str>>,
    interned: HashMap<Arc<str>, ()>,
    /// id -> (u, v) sidecar dictionary
    names: HashMap<FeatureId, (Arc<str>, Arc<str>)>,
    counts: Counts,
    tokens: u64,
}

impl<'a> PmiStream<'a> {
    pub fn new(cfg: PmiConfig, learner: &'a mut dyn Learner, seed: u64) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            reservoir: UnigramReservoir::new(cfg.reservoir)?,
            rng: ChaCha8Rng::seed_from_u64(derive_seed(seed, Stream::Reservoir)),
            window: VecDeque::with_capacity(cfg.window),
            interned: HashMap::new(),
            names: HashMap::new(),
            counts: Counts::default(),
            tokens: 0,
            cfg,
            learner,
        })
    }

    pub fn tokens(&self) -> u64 {
        self.tokens
    }

    pub fn positives(&self) -> u64 {
        self.counts.n_pairs
    }

    fn intern(&mut self, s: &str) -> Arc<str> {
        if let Some((k, _)) = self.interned.get_key_value(s) {
            return k.clone();
        }
        let k: Arc<str> = Arc::from(s);
        self.interned.insert(k.clone(), ());
        k
    }

    fn id(&mut self, u: &Arc<str>, v: &Arc<str>) -> FeatureId {
        let id = pair_id(u, v);
        self.names.entry(id).or_insert_with(|| (u.clone(), v.clone()));
        id
    }

    fn train_positive(&mut self, u: &Arc<str>, v: &Arc<str>) {
        let id = self.id(u, v);
        *self.counts.pairs.entry(id).or_default() += 1;
        self.counts.n_pairs += 1;
        self.learner.update(&SparseVector::indicator(id), Label::Positive);
        if self.reservoir.is_empty() {
            return;
        }
        for _ in 0..self.cfg.negatives {
            let a = self.reservoir.sample(&mut self.rng).expect("nonempty").clone();
            let b = self.reservoir.sample(&mut self.rng).expect("nonempty").clone();
            let nid = self.id(&a, &b);
            self.learner.update(&SparseVector::indicator(nid), Label::Negative);
        }
    }

    fn count_unigram(&mut self, t: &Arc<str>) {
        *self.counts.unigrams.entry(t.clone()).or_default() += 1;
        self.counts.n_unigrams += 1;
        self.reservoir.add(t.clone(), &mut self.rng);
    }

    /// Pairs the token with each of the previous `window - 1` tokens (earlier token first).
    pub fn observe_token(&mut self, token: &str) {
        let t = self.intern(token);
        let prev: Vec<Arc<str>> = self.window.iter().cloned().collect();
        for u in &prev {
            self.train_positive(u, &t);
        }
        self.count_unigram(&t);
        if self.window.len() == self.cfg.window - 1 {
            self.window.pop_front();
        }
        self.window.push_back(t);
        self.tokens += 1;
    }

    /// One positive pair drawn directly from a joint distribution; both
    /// endpoints also enter the unigram reservoir.
    pub fn observe_pair(&mut self, u: &str, v: &str) {
        let (u, v) = (self.intern(u), self.intern(v));
        self.train_positive(&u, &v);
        self.count_unigram(&u);
        self.count_unigram(&v);
    }

    /// Exact PMI of an observed pair from the full counts.
    pub fn exact_pmi(&self, u: &str, v: &str) -> Option<f64> {
        let n = *self.counts.pairs.get(&pair_id(u, v))?;
        let pu = *self.counts.unigrams.get(u)? as f64 / self.counts.n_unigrams as f64;
        let pv = *self.counts.unigrams.get(v)? as f64 / self.counts.n_unigrams as f64;
        Some((n as f64 / self.counts.n_pairs as f64 / (pu * pv)).ln())
    }

    pub fn estimated_pmi(&self, u: &str, v: &str) -> f64 {
        self.learner.weight(pair_id(u, v)) + (self.cfg.negatives as f64).ln()
    }

    fn entry(&self, feature: FeatureId, weight: f64) -> PmiEntry {
        let (u, v) = self
            .names
            .get(&feature)
            .map(|(u, v)| (u.to_string(), v.to_string()))
            .unwrap_or_default();
        PmiEntry {
            exact_pmi: self.exact_pmi(&u, &v),
            estimated_pmi: weight + (self.cfg.negatives as f64).ln(),
            u,
            v,
            feature,
            weight,
        }
    }

    /// Top `k` pairs by |weight| as the learner reports them.
    pub fn top_pairs(&self, k: usize) -> Result<Vec<PmiEntry>> {
        Ok(self
            .learner
            .top_k(k)?
            .entries
            .into_iter()
            .map(|(f, w)| self.entry(f, w))
            .collect())
    }

    /// Every pair seen as a positive, with the learner's current estimate,
    /// sorted by estimated PMI descending.
    pub fn all_positive_pairs(&self) -> Vec<PmiEntry> {
        let mut out: Vec<PmiEntry> = self
            .counts
            .pairs
            .keys()
            .map(|&f| self.entry(f, self.learner.weight(f)))
            .collect();
        out.sort_by(|a, b| b.estimated_pmi.total_cmp(&a.estimated_pmi).then(a.feature.cmp(&b.feature)));
        out
    }
}

/// Pairs over a vocabulary `t0 .. t{V-1}` with uniform marginals and
/// `p(u,v) = (1 + E[u][v]) / V^2`. With `planted = Some((a, b))`,
/// `E[a][b] = 1`, `E[a][j] = E[i][b] = -1/(V-1)` and `E[i][j] = 1/(V-1)^2`
/// elsewhere, so PMI(a, b) = ln 2 exactly; `None` gives independent pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairGeneratorSpec {
    pub vocabulary: usize,
    pub planted: Option<(usize, usize)>,
    pub pairs: u64,
    pub seed: u64,
}

impl PairGeneratorSpec {
    pub fn token(i: usize) -> String {
        format!("t{i}")
    }

    /// `p(u, v)` of the spec.
    pub fn probability(&self, u: usize, v: usize) -> f64 {
        let n = self.vocabulary as f64;
        let e = match self.planted {
            None => 0.0,
            Some((a, b)) => {
                let r = 1.0 / (n - 1.0);
                match (u == a, v == b) {
                    (true, true) => 1.0,
                    (true, false) | (false, true) => -r,
                    (false, false) => r * r,
                }
            }
        };
        (1.0 + e) / (n * n)
    }

    pub fn generate(&self) -> Result<impl Iterator<Item = (String, String)>> {
        let v = self.vocabulary;
        if v < 2 {
            return Err(Error::usage("vocabulary needs at least two tokens"));
        }
        if let Some((a, b)) = self.planted {
            if a >= v || b >= v {
                return Err(Error::usage("planted pair outside the vocabulary"));
            }
        }
        let weights: Vec<f64> = (0..v * v).map(|i| self.probability(i / v, i % v)).collect();
        let dist = WeightedIndex::new(&weights).map_err(|e| Error::usage(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.seed, Stream::Data));
        Ok((0..self.pairs).map(move |_| {
            let i = dist.sample(&mut rng);
            (Self::token(i / v), Self::token(i % v))
        }))
    }
}
