use rand::Rng;

use crate::error::{Error, Result};

/// Uniform reservoir sample of a stream (item `n` enters with probability `capacity / n`).
#[derive(Debug, Clone)]
pub struct UnigramReservoir<T> {
    capacity: usize,
    items: Vec<T>,
    seen: u64,
}

impl<T> UnigramReservoir<T> {
    pub const DEFAULT_CAPACITY: usize = 4000;

    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::usage("reservoir capacity must be positive"));
        }
        Ok(Self {
            capacity,
            items: Vec::with_capacity(capacity),
            seen: 0,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn seen(&self) -> u64 {
        self.seen
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[T] {
        &self.items
    }

    pub fn add<R: Rng + ?Sized>(&mut self, item: T, rng: &mut R) {
        self.seen += 1;
        if self.items.len() < self.capacity {
            self.items.push(item);
        } else {
            let j = rng.random_range(0..self.seen);
            if (j as usize) < self.capacity {
                self.items[j as usize] = item;
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<&T> {
        if self.items.is_empty() {
            return Err(Error::usage("sample from an empty reservoir"));
        }
        Ok(&self.items[rng.random_range(0..self.items.len())])
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn fill_phase_keeps_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut r = UnigramReservoir::new(10).unwrap();
        for i in 0..10 {
            r.add(i, &mut rng);
        }
        assert_eq!(r.items(), &(0..10).collect::<Vec<_>>()[..]);
        assert!(UnigramReservoir::<u32>::new(0).is_err());
        let empty = UnigramReservoir::<u32>::new(3).unwrap();
        assert!(matches!(empty.sample(&mut rng), Err(Error::Usage(_))));
    }

    #[test]
    fn capacity_one_holds_last_item_with_probability_one_over_n() {
        let n = 8;
        let trials = 40_000;
        let mut hits = vec![0u32; n];
        for seed in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut r = UnigramReservoir::new(1).unwrap();
            for i in 0..n {
                r.add(i, &mut rng);
            }
            hits[r.items()[0]] += 1;
        }
        for h in hits {
            let p = h as f64 / trials as f64;
            // 1/n = 0.125, binomial sd ~ 0.0017
            assert!((p - 1.0 / n as f64).abs() < 0.01, "{p}");
        }
    }

    #[test]
    fn composition_matches_source_frequencies() {
        // 10 symbols with probabilities proportional to 1..=10
        let weights: Vec<f64> = (1..=10).map(|w| w as f64).collect();
        let total: f64 = weights.iter().sum();
        let dist = rand::distr::weighted::WeightedIndex::new(&weights).unwrap();
        let mut pass = 0;
        for trial in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(500 + trial);
            let mut r = UnigramReservoir::new(4000).unwrap();
            for _ in 0..100_000 {
                let s = rand::distr::Distribution::sample(&dist, &mut rng);
                r.add(s, &mut rng);
            }
            let mut counts = [0f64; 10];
            for &s in r.items() {
                counts[s] += 1.0;
            }
            let chi2: f64 = (0..10)
                .map(|i| {
                    let e = 4000.0 * weights[i] / total;
                    (counts[i] - e).powi(2) / e
                })
                .sum();
            // 9 degrees of freedom, p = 0.01
            if chi2 < 21.67 {
                pass += 1;
            }
        }
        // about 99 of 100 trials should pass; allow the binomial tail
        assert!(pass >= 95, "{pass}");
    }
}
