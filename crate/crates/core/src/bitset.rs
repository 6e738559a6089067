//! Fixed-width bitsets backed by u64 words.
//!
//! Vertex sets, matrix rows, and candidate cover vectors are all bitsets
//! here, so the tuple enumerations in the checkers and builders reduce to
//! word-parallel set operations.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bitset {
    len: usize,
    words: Vec<u64>,
}

impl Bitset {
    pub fn new(len: usize) -> Bitset {
        Bitset { len, words: vec![0; len.div_ceil(64)] }
    }

    /// Set of the given 0-based positions.
    pub fn from_positions<I: IntoIterator<Item = usize>>(len: usize, positions: I) -> Bitset {
        let mut b = Bitset::new(len);
        for p in positions {
            b.set(p);
        }
        b
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn clear(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn test(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union_with(&mut self, other: &Bitset) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &Bitset) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &Bitset) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn intersects(&self, other: &Bitset) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// Is any bit of `self` set where `other` is clear?
    pub fn any_outside(&self, other: &Bitset) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & !b != 0)
    }

    pub fn is_subset_of(&self, other: &Bitset) -> bool {
        !self.any_outside(other)
    }

    /// Number of set bits shared with `other`.
    pub fn intersection_count(&self, other: &Bitset) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Lowest set bit shared with `other`, if any.
    pub fn first_common(&self, other: &Bitset) -> Option<usize> {
        for (i, (a, b)) in self.words.iter().zip(&other.words).enumerate() {
            let w = a & b;
            if w != 0 {
                return Some(i * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            core::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + b)
                }
            })
        })
    }

    /// Positions as 0-based indices, ascending.
    pub fn positions(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    /// Order that compares bit 0 first: 0001 < 0010 < 0011 < 0100 ...
    /// when vectors are written position 0 leftmost.
    pub fn lex_cmp(&self, other: &Bitset) -> Ordering {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter().zip(&other.words) {
            let ord = a.reverse_bits().cmp(&b.reverse_bits());
            if ord != Ordering::Equal {
                return ord;
            }
        }
        Ordering::Equal
    }
}

impl core::fmt::Debug for Bitset {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.test(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// C(n, k) without overflow; `None` when the value exceeds u128.
pub fn binomial_u128(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)?;
        acc /= (i + 1) as u128;
    }
    Some(acc)
}

/// Visit every k-combination of 0..m in lexicographic order. The visitor
/// may stop early by returning `Some`.
pub fn for_each_combination<B>(
    m: usize,
    k: usize,
    mut visit: impl FnMut(&[usize]) -> Option<B>,
) -> Option<B> {
    if k > m {
        return None;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if let Some(b) = visit(&idx) {
            return Some(b);
        }
        if k == 0 {
            return None;
        }
        let mut i = k - 1;
        while idx[i] == m - k + i {
            if i == 0 {
                return None;
            }
            i -= 1;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
