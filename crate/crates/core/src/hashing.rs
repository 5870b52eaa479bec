//! Seeded hash families for the implicit Count-Sketch projection.
//!
//! Each row of a sketch owns two tabulation hash functions over 32-bit
//! feature ids: one picks a bucket in `[0, width)`, the other a sign in
//! `{-1, +1}`. Tabulation splits the key into four bytes and XORs four
//! 256-entry tables of random 32-bit words, which is 3-wise independent and
//! costs four loads per hash.
//!
//! Table contents are drawn from a ChaCha stream keyed by the master seed,
//! one stream per (row, function), so the same seed reproduces the same
//! family on every platform.

use std::io::Cursor;

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// 32-bit feature identifier.
pub type FeatureId = u32;

type Tables = [[u32; 256]; 4];

/// How features are assigned to buckets within a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BucketScheme {
    /// Tabulation hashing (the default).
    Tabulation,
    /// `feature % width` in every row. Injective on ids below `width`, which
    /// makes the sketch collision-free; used to check the learners against
    /// uncompressed gradient descent.
    Modulo,
}

/// Hash functions for a single sketch row.
#[derive(Debug, Clone)]
pub struct RowHash {
    width: usize,
    scheme: BucketScheme,
    bucket_tables: Box<Tables>,
    sign_tables: Box<Tables>,
}

#[inline]
fn tabulate(tables: &Tables, key: u32) -> u32 {
    let b = key.to_le_bytes();
    tables[0][b[0] as usize]
        ^ tables[1][b[1] as usize]
        ^ tables[2][b[2] as usize]
        ^ tables[3][b[3] as usize]
}

fn fill_tables(seed: u64, stream: u64) -> Box<Tables> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut tables = Box::new([[0u32; 256]; 4]);
    for table in tables.iter_mut() {
        for entry in table.iter_mut() {
            *entry = rng.next_u32();
        }
    }
    tables
}

impl RowHash {
    #[inline]
    pub fn bucket(&self, feature: FeatureId) -> usize {
        match self.scheme {
            BucketScheme::Tabulation => {
                let h = tabulate(&self.bucket_tables, feature) as u64;
                ((h * self.width as u64) >> 32) as usize
            }
            BucketScheme::Modulo => feature as usize % self.width,
        }
    }

    #[inline]
    pub fn sign(&self, feature: FeatureId) -> f64 {
        if tabulate(&self.sign_tables, feature) >> 31 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// A seeded family of `depth` (bucket, sign) hash pairs over `width` buckets.
#[derive(Debug, Clone)]
pub struct HashFamily {
    seed: u64,
    depth: usize,
    width: usize,
    scheme: BucketScheme,
    rows: Vec<RowHash>,
}

impl HashFamily {
    pub fn new(seed: u64, depth: usize, width: usize) -> Result<Self> {
        Self::with_scheme(seed, depth, width, BucketScheme::Tabulation)
    }

    pub fn with_scheme(seed: u64, depth: usize, width: usize, scheme: BucketScheme) -> Result<Self> {
        if depth == 0 {
            return Err(Error::usage("hash family depth must be at least 1"));
        }
        if width == 0 || width as u64 > u32::MAX as u64 + 1 {
            return Err(Error::usage(format!("hash family width {width} out of range")));
        }
        let rows = (0..depth as u64)
            .map(|row| RowHash {
                width,
                scheme,
                bucket_tables: fill_tables(seed, 2 * row),
                sign_tables: fill_tables(seed, 2 * row + 1),
            })
            .collect();
        Ok(Self {
            seed,
            depth,
            width,
            scheme,
            rows,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn scheme(&self) -> BucketScheme {
        self.scheme
    }

    pub fn rows(&self) -> &[RowHash] {
        &self.rows
    }

    pub fn row(&self, row: usize) -> Result<&RowHash> {
        self.rows
            .get(row)
            .ok_or_else(|| Error::usage(format!("row {row} out of range for depth {}", self.depth)))
    }

    pub fn bucket(&self, row: usize, feature: FeatureId) -> Result<usize> {
        Ok(self.row(row)?.bucket(feature))
    }

    pub fn sign(&self, row: usize, feature: FeatureId) -> Result<f64> {
        Ok(self.row(row)?.sign(feature))
    }

    /// Same shape and seed, hence identical hash outputs.
    pub fn compatible(&self, other: &HashFamily) -> bool {
        self.seed == other.seed
            && self.depth == other.depth
            && self.width == other.width
            && self.scheme == other.scheme
    }
}

/// MurmurHash3 (x86, 32-bit) of `token` with seed 0.
pub fn hash_string(token: &[u8]) -> FeatureId {
    murmur3::murmur3_32(&mut Cursor::new(token), 0).expect("in-memory read cannot fail")
}
