//! Indexed binary min-heap over feature ids.
//!
//! Entries are ordered by an `f64` key; among equal keys the larger feature
//! id sits closer to the root so it is evicted first, which leaves the smaller
//! id in any top-K view.

use std::collections::HashMap;

use crate::hashing::FeatureId;

#[derive(Debug, Clone, PartialEq)]
pub struct HeapEntry<T> {
    pub id: FeatureId,
    pub key: f64,
    pub item: T,
}

#[derive(Debug, Clone)]
pub struct IndexedHeap<T> {
    entries: Vec<HeapEntry<T>>,
    positions: HashMap<FeatureId, usize>,
}

impl<T> Default for IndexedHeap<T> {
    fn default() -> Self {
        Self {
            entries: Vec::new(),
            positions: HashMap::new(),
        }
    }
}

#[inline]
fn precedes<T>(a: &HeapEntry<T>, b: &HeapEntry<T>) -> bool {
    a.key < b.key || (a.key == b.key && a.id > b.id)
}

impl<T> IndexedHeap<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(capacity: usize) -> Self {
        Self {
            entries: Vec::with_capacity(capacity),
            positions: HashMap::with_capacity(capacity),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, id: FeatureId) -> bool {
        self.positions.contains_key(&id)
    }

    pub fn get(&self, id: FeatureId) -> Option<&HeapEntry<T>> {
        self.positions.get(&id).map(|&p| &self.entries[p])
    }

    pub fn peek_min(&self) -> Option<&HeapEntry<T>> {
        self.entries.first()
    }

    pub fn iter(&self) -> impl Iterator<Item = &HeapEntry<T>> {
        self.entries.iter()
    }

    /// Inserts a new id or replaces the key and item of an existing one.
    pub fn upsert(&mut self, id: FeatureId, key: f64, item: T) {
        if let Some(&pos) = self.positions.get(&id) {
            let old = self.entries[pos].key;
            self.entries[pos].key = key;
            self.entries[pos].item = item;
            if key < old {
                self.sift_up(pos);
            } else {
                self.sift_down(pos);
            }
        } else {
            let pos = self.entries.len();
            self.entries.push(HeapEntry { id, key, item });
            self.positions.insert(id, pos);
            self.sift_up(pos);
        }
    }

    pub fn pop_min(&mut self) -> Option<HeapEntry<T>> {
        if self.entries.is_empty() {
            return None;
        }
        Some(self.remove_at(0))
    }

    pub fn remove(&mut self, id: FeatureId) -> Option<HeapEntry<T>> {
        let pos = *self.positions.get(&id)?;
        Some(self.remove_at(pos))
    }

    pub fn clear(&mut self) {
        self.entries.clear();
        self.positions.clear();
    }

    /// Applies `f` to every entry (ids must not change) and restores heap order.
    pub fn rekey_all(&mut self, mut f: impl FnMut(&mut HeapEntry<T>)) {
        for e in self.entries.iter_mut() {
            f(e);
        }
        for pos in (0..self.entries.len() / 2).rev() {
            self.sift_down(pos);
        }
    }

    fn remove_at(&mut self, pos: usize) -> HeapEntry<T> {
        let last = self.entries.len() - 1;
        self.swap(pos, last);
        let out = self.entries.pop().expect("nonempty");
        self.positions.remove(&out.id);
        if pos < self.entries.len() {
            self.sift_down(pos);
            self.sift_up(pos);
        }
        out
    }

    fn swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        self.entries.swap(a, b);
        self.positions.insert(self.entries[a].id, a);
        self.positions.insert(self.entries[b].id, b);
    }

    fn sift_up(&mut self, mut pos: usize) {
        while pos > 0 {
            let parent = (pos - 1) / 2;
            if precedes(&self.entries[pos], &self.entries[parent]) {
                self.swap(pos, parent);
                pos = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut pos: usize) {
        let n = self.entries.len();
        loop {
            let left = 2 * pos + 1;
            let right = left + 1;
            let mut best = pos;
            if left < n && precedes(&self.entries[left], &self.entries[best]) {
                best = left;
            }
            if right < n && precedes(&self.entries[right], &self.entries[best]) {
                best = right;
            }
            if best == pos {
                break;
            }
            self.swap(pos, best);
            pos = best;
        }
    }
}
