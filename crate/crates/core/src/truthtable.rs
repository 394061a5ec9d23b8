//! Truth tables of n-input Boolean functions.
//!
//! Entry `i` is the function value on the `i`-th n-bit string in
//! lexicographic order, with `x1` in the most significant position.

use std::fmt;

/// Bit-packed truth table. Entry `i` lives in word `i / 64`, bit `i % 64`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: usize,
    words: Vec<u64>,
}

impl TruthTable {
    pub fn zeros(n: usize) -> Self {
        let len = 1usize << n;
        TruthTable { n, words: vec![0; len.div_ceil(64)] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut t = Self::zeros(n);
        for i in 0..t.len() {
            if f(i) {
                t.set(i, true);
            }
        }
        t
    }

    /// Builds a table from a string of `0`/`1` characters.
    pub fn from_bit_str(s: &str) -> Option<Self> {
        let len = s.len();
        if !len.is_power_of_two() {
            return None;
        }
        let n = len.trailing_zeros() as usize;
        let mut t = Self::zeros(n);
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => t.set(i, true),
                _ => return None,
            }
        }
        Some(t)
    }

    /// Wraps raw words; bits beyond `2^n` are cleared.
    pub fn from_words(n: usize, mut words: Vec<u64>) -> Self {
        let len = 1usize << n;
        words.resize(len.div_ceil(64), 0);
        if len < 64 {
            words[0] &= (1u64 << len) - 1;
        }
        TruthTable { n, words }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        1usize << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        let bit = 1u64 << (i & 63);
        if v {
            self.words[i >> 6] |= bit;
        } else {
            self.words[i >> 6] &= !bit;
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .position(|&w| w != 0)
            .map(|wi| wi * 64 + self.words[wi].trailing_zeros() as usize)
    }

    /// Least index where the two tables differ.
    pub fn first_difference(&self, other: &TruthTable) -> Option<usize> {
        assert_eq!(self.n, other.n);
        self.words
            .iter()
            .zip(&other.words)
            .position(|(a, b)| a != b)
            .map(|wi| wi * 64 + (self.words[wi] ^ other.words[wi]).trailing_zeros() as usize)
    }

    pub fn and(&self, other: &TruthTable) -> TruthTable {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn or(&self, other: &TruthTable) -> TruthTable {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn not(&self) -> TruthTable {
        let words = self.words.iter().map(|w| !w).collect();
        TruthTable::from_words(self.n, words)
    }

    fn zip_with(&self, other: &TruthTable, f: impl Fn(u64, u64) -> u64) -> TruthTable {
        assert_eq!(self.n, other.n, "table arity mismatch");
        let words = self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect();
        TruthTable::from_words(self.n, words)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn to_bit_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n <= 8 {
            write!(f, "TruthTable(n={}, {})", self.n, self.to_bit_string())
        } else {
            write!(f, "TruthTable(n={}, ones={})", self.n, self.count_ones())
        }
    }
}

/// The `i`-th n-bit string in lexicographic order, `x1` first.
pub fn index_to_assignment(n: usize, i: usize) -> Vec<bool> {
    (0..n).map(|v| (i >> (n - 1 - v)) & 1 == 1).collect()
}

pub fn assignment_to_index(bits: &[bool]) -> usize {
    bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn parse_bits(s: &str) -> Option<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_index_has_x1_as_msb() {
        assert_eq!(index_to_assignment(3, 1), vec![false, false, true]);
        assert_eq!(index_to_assignment(3, 4), vec![true, false, false]);
        assert_eq!(assignment_to_index(&[true, false, true]), 5);
    }

    #[test]
    fn bit_string_round_trip() {
        let t = TruthTable::from_bit_str("0001").unwrap();
        assert_eq!(t.n(), 2);
        assert!(t.get(3) && !t.get(0));
        assert_eq!(t.to_bit_string(), "0001");
        assert!(TruthTable::from_bit_str("001").is_none());
    }

    #[test]
    fn first_difference_and_not() {
        let a = TruthTable::from_bit_str("0001").unwrap();
        let b = TruthTable::from_bit_str("0111").unwrap();
        assert_eq!(a.first_difference(&b), Some(1));
        assert_eq!(a.not().to_bit_string(), "1110");
        assert_eq!(a.not().count_ones(), 3);
    }

    #[test]
    fn large_table_words() {
        let t = TruthTable::from_fn(8, |i| i % 3 == 0);
        assert_eq!(t.count_ones(), (0..256).filter(|i| i % 3 == 0).count() as u64);
        assert_eq!(t.first_one(), Some(0));
    }
}
