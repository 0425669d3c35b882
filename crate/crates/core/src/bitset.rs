//! Fixed-width bit sets over node indices (or message ids).
//!
//! The word-slice helpers are shared with [`crate::graph::RoundGraph`], whose
//! adjacency matrix stores one row of words per node.

use std::fmt;

pub(crate) const WORD: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD).max(1)
}

#[inline]
pub(crate) fn test_bit(words: &[u64], i: usize) -> bool {
    words[i / WORD] >> (i % WORD) & 1 == 1
}

#[inline]
pub(crate) fn set_bit(words: &mut [u64], i: usize) {
    words[i / WORD] |= 1 << (i % WORD);
}

#[inline]
pub(crate) fn clear_bit(words: &mut [u64], i: usize) {
    words[i / WORD] &= !(1 << (i % WORD));
}

pub(crate) fn iter_ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut rest = w;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(wi * WORD + b)
        })
    })
}

/// Count of `a & b`, stopping once it exceeds `cap`. Returns the count
/// (saturated at `cap + 1`) and the last member seen.
#[inline]
pub(crate) fn and_count_capped(a: &[u64], b: &[u64], cap: u32) -> (u32, usize) {
    let mut count = 0u32;
    let mut last = usize::MAX;
    for (wi, (&x, &y)) in a.iter().zip(b).enumerate() {
        let w = x & y;
        if w != 0 {
            count += w.count_ones();
            last = wi * WORD + (WORD - 1 - w.leading_zeros() as usize);
            if count > cap {
                return (count, last);
            }
        }
    }
    (count, last)
}

/// A set of indices in `0..capacity`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NodeSet {
    capacity: usize,
    words: Vec<u64>,
}

impl NodeSet {
    pub fn new(capacity: usize) -> Self {
        NodeSet {
            capacity,
            words: vec![0; words_for(capacity)],
        }
    }

    pub fn full(capacity: usize) -> Self {
        let mut s = NodeSet::new(capacity);
        for i in 0..capacity {
            set_bit(&mut s.words, i);
        }
        s
    }

    pub fn from_indices(capacity: usize, items: impl IntoIterator<Item = usize>) -> Self {
        let mut s = NodeSet::new(capacity);
        for i in items {
            s.insert(i);
        }
        s
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.capacity && test_bit(&self.words, i)
    }

    /// Returns `true` if `i` was newly inserted.
    #[inline]
    pub fn insert(&mut self, i: usize) -> bool {
        assert!(
            i < self.capacity,
            "index {i} out of range 0..{}",
            self.capacity
        );
        let fresh = !test_bit(&self.words, i);
        set_bit(&mut self.words, i);
        fresh
    }

    #[inline]
    pub fn remove(&mut self, i: usize) -> bool {
        let had = self.contains(i);
        if had {
            clear_bit(&mut self.words, i);
        }
        had
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.capacity
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        iter_ones(&self.words)
    }

    pub fn union_with(&mut self, other: &NodeSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &NodeSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn is_superset(&self, other: &NodeSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| b & !a == 0)
    }

    pub fn intersection_len(&self, other: &NodeSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_remove_len() {
        let mut s = NodeSet::new(130);
        assert!(s.insert(0));
        assert!(s.insert(129));
        assert!(!s.insert(129));
        assert_eq!(s.len(), 2);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 129]);
        assert!(s.remove(0));
        assert!(!s.contains(0));
        assert_eq!(NodeSet::full(70).len(), 70);
    }

    #[test]
    fn capped_and_count() {
        let a = NodeSet::from_indices(100, [3, 70, 90]);
        let b = NodeSet::from_indices(100, [70, 90, 99]);
        assert_eq!(and_count_capped(a.words(), b.words(), 5), (2, 90));
        let c = NodeSet::from_indices(100, [70]);
        assert_eq!(and_count_capped(a.words(), c.words(), 1), (1, 70));
        assert!(a.is_superset(&c));
        assert!(!c.is_superset(&a));
    }
}
