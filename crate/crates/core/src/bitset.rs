//! Fixed-universe bit sets used for family extents and relation rows.

use smallvec::SmallVec;
use std::fmt;

const WORD: usize = 64;

/// A subset of `{0, .., len - 1}` stored as packed 64-bit words.
///
/// Universes of up to 128 elements live inline without allocating, which
/// covers every search instance the verification suites touch.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    len: usize,
    words: SmallVec<[u64; 2]>,
}

impl BitSet {
    pub fn empty(len: usize) -> Self {
        let n_words = len.div_ceil(WORD);
        BitSet {
            len,
            words: SmallVec::from_elem(0, n_words),
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::empty(len);
        for w in s.words.iter_mut() {
            *w = !0;
        }
        s.trim();
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, it: I) -> Self {
        let mut s = Self::empty(len);
        for i in it {
            s.insert(i);
        }
        s
    }

    fn trim(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// Size of the universe, not the number of members.
    pub fn universe(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "index {i} outside universe of size {}", self.len);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        if i < self.len {
            self.words[i / WORD] &= !(1 << (i % WORD));
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn difference_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn intersection(&self, other: &BitSet) -> BitSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn union(&self, other: &BitSet) -> BitSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// True when `self` and `other` contain exactly the same members below `bound`.
    pub fn agrees_below(&self, other: &BitSet, bound: usize) -> bool {
        let full = bound / WORD;
        if self.words[..full] != other.words[..full] {
            return false;
        }
        let rem = bound % WORD;
        if rem == 0 {
            return true;
        }
        let mask = (1u64 << rem) - 1;
        (self.words[full] ^ other.words[full]) & mask == 0
    }

    pub fn iter(&self) -> Ones<'_> {
        Ones {
            words: &self.words,
            idx: 0,
            cur: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct Ones<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let bit = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * WORD + bit);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_respects_universe() {
        let s = BitSet::full(70);
        assert_eq!(s.count(), 70);
        assert!(!s.contains(70));
        assert_eq!(BitSet::full(0).count(), 0);
    }

    #[test]
    fn agrees_below_crosses_word_boundary() {
        let a = BitSet::from_indices(100, [1, 65, 90]);
        let b = BitSet::from_indices(100, [1, 65, 91]);
        assert!(a.agrees_below(&b, 90));
        assert!(!a.agrees_below(&b, 91));
        assert!(a.agrees_below(&b, 64));
    }

    #[test]
    fn iteration_is_ascending() {
        let s = BitSet::from_indices(130, [129, 0, 64, 63]);
        assert_eq!(s.to_vec(), vec![0, 63, 64, 129]);
    }
}
