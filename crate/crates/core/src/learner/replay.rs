//! Fixed-capacity ring buffer with uniform sampling.

use crate::rng::StreamRng;

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayBuffer<T> {
    items: Vec<T>,
    capacity: usize,
    /// Slot the next push overwrites once the buffer is full.
    cursor: usize,
}

impl<T> ReplayBuffer<T> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self {
            items: Vec::with_capacity(capacity.min(1 << 16)),
            capacity,
            cursor: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Stores `item`, returning the evicted oldest entry when full.
    pub fn push(&mut self, item: T) -> Option<T> {
        if self.items.len() < self.capacity {
            self.items.push(item);
            None
        } else {
            let old = std::mem::replace(&mut self.items[self.cursor], item);
            self.cursor = (self.cursor + 1) % self.capacity;
            Some(old)
        }
    }

    pub fn clear(&mut self) {
        self.items.clear();
        self.cursor = 0;
    }

    /// Storage-order access; use [`iter`](Self::iter) for age order.
    pub fn get(&self, index: usize) -> Option<&T> {
        self.items.get(index)
    }

    /// Oldest to newest.
    pub fn iter(&self) -> impl Iterator<Item = &T> {
        let (newer, older) = self.items.split_at(self.cursor);
        older.iter().chain(newer.iter())
    }

    /// Oldest to newest, mutable.
    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut T> {
        let (newer, older) = self.items.split_at_mut(self.cursor);
        older.iter_mut().chain(newer.iter_mut())
    }

    /// `n` storage indices drawn uniformly with replacement.
    pub fn sample_indices(&self, n: usize, rng: &mut StreamRng) -> Vec<usize> {
        if self.items.is_empty() {
            return Vec::new();
        }
        (0..n).map(|_| rng.index(self.items.len())).collect()
    }

    pub fn sample(&self, n: usize, rng: &mut StreamRng) -> Vec<&T> {
        self.sample_indices(n, rng)
            .into_iter()
            .map(|i| &self.items[i])
            .collect()
    }
}
