//! Packed binary strings and the substring statistics built on them.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WORD: usize = 64;

/// A finite binary string, packed 64 bits per word, LSB-first.
///
/// Bits past `len` in the last word are always zero, so the derived
/// equality and hashing are structural.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(bits.div_ceil(WORD)),
            len: 0,
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            words: vec![0; n.div_ceil(WORD)],
            len: n,
        }
    }

    pub fn ones(n: usize) -> Self {
        let mut s = Self::with_capacity(n);
        s.extend_repeat(true, n);
        s
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut s = Self::new();
        for b in bits {
            s.push(b);
        }
        s
    }

    /// The `k` low-order bits of `value`, most significant first.
    pub fn from_value(value: u64, k: usize) -> Self {
        assert!(k <= 64);
        Self::from_bits((0..k).rev().map(|i| (value >> i) & 1 == 1))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The bit at index `i`. Panics when `i >= len`.
    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        (i < self.len).then(|| self.bit(i))
    }

    pub fn push(&mut self, b: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        if b {
            self.words[self.len / WORD] |= 1 << (self.len % WORD);
        }
        self.len += 1;
    }

    pub fn extend_repeat(&mut self, b: bool, n: usize) {
        for _ in 0..n {
            self.push(b);
        }
    }

    pub fn append(&mut self, other: &BitString) {
        if self.len.is_multiple_of(WORD) {
            self.words.extend_from_slice(&other.words);
            self.len += other.len;
            return;
        }
        for b in other.iter() {
            self.push(b);
        }
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.append(other);
        out
    }

    /// `self` concatenated with itself `k` times.
    pub fn repeat(&self, k: usize) -> BitString {
        let mut out = BitString::with_capacity(self.len * k);
        for _ in 0..k {
            out.append(self);
        }
        out
    }

    /// The substring `self[start..end]` (end exclusive).
    pub fn slice(&self, start: usize, end: usize) -> BitString {
        assert!(start <= end && end <= self.len, "slice {start}..{end} of length {}", self.len);
        let mut out = BitString::with_capacity(end - start);
        for i in start..end {
            out.push(self.bit(i));
        }
        out
    }

    /// Left cyclic shift by `j`: `self[j..] · self[..j]`.
    pub fn rotate_left(&self, j: usize) -> BitString {
        if self.is_empty() {
            return self.clone();
        }
        let j = j % self.len;
        let mut out = self.slice(j, self.len);
        out.append(&self.slice(0, j));
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.bit(i))
    }

    /// Bits `self[i..i+k]` read as an integer with `self[i]` most significant,
    /// so numeric order on same-length windows is lexicographic order.
    #[inline]
    pub fn window_value(&self, i: usize, k: usize) -> u64 {
        debug_assert!(k <= 64 && i + k <= self.len);
        let mut v = 0u64;
        for j in i..i + k {
            v = (v << 1) | self.bit(j) as u64;
        }
        v
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn starts_with(&self, prefix: &BitString) -> bool {
        prefix.len <= self.len && (0..prefix.len).all(|i| self.bit(i) == prefix.bit(i))
    }

    pub fn ends_with(&self, suffix: &BitString) -> bool {
        let off = match self.len.checked_sub(suffix.len) {
            Some(o) => o,
            None => return false,
        };
        (0..suffix.len).all(|i| self.bit(off + i) == suffix.bit(i))
    }

    /// Parses the text format: ASCII `0`/`1` characters, no separators.
    /// Surrounding whitespace (including a trailing newline) is ignored.
    pub fn parse_text(s: &str) -> Result<Self> {
        let mut out = BitString::with_capacity(s.len());
        for (i, c) in s.trim().chars().enumerate() {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                other => return Err(Error::InvalidBit(other, i)),
            }
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    /// Packed binary form: 8-byte little-endian bit length, then the bits
    /// LSB-first within each byte.
    pub fn to_packed(&self) -> Vec<u8> {
        let nbytes = self.len.div_ceil(8);
        let mut out = Vec::with_capacity(8 + nbytes);
        out.extend_from_slice(&(self.len as u64).to_le_bytes());
        for w in &self.words {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out.truncate(8 + nbytes);
        out
    }

    pub fn from_packed(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 {
            return Err(Error::MalformedPacked("missing length header".into()));
        }
        let len = u64::from_le_bytes(bytes[..8].try_into().unwrap()) as usize;
        let body = &bytes[8..];
        if body.len() != len.div_ceil(8) {
            return Err(Error::MalformedPacked(format!(
                "header says {len} bits but body has {} bytes",
                body.len()
            )));
        }
        let mut words = vec![0u64; len.div_ceil(WORD)];
        for (i, &byte) in body.iter().enumerate() {
            words[i / 8] |= (byte as u64) << (8 * (i % 8));
        }
        if !len.is_multiple_of(WORD) {
            let mask = (1u64 << (len % WORD)) - 1;
            if words[len / WORD] & !mask != 0 {
                return Err(Error::MalformedPacked("padding bits are not zero".into()));
            }
        }
        Ok(Self { words, len })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            write!(f, "BitString({})", self.to_text())
        } else {
            write!(f, "BitString(len={}, {}...)", self.len, self.slice(0, 64).to_text())
        }
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_text(s)
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self::from_bits(iter)
    }
}

fn matches_at(w: &BitString, x: &BitString, i: usize) -> bool {
    (0..w.len()).all(|j| x.bit(i + j) == w.bit(j))
}

/// Number of (possibly overlapping) occurrences of `w` in `x`.
pub fn occ(w: &BitString, x: &BitString) -> Result<usize> {
    occ_stepped(w, x, 1)
}

/// Number of occurrences of `w` in `x` at positions that are multiples of `|w|`.
pub fn occ_block(w: &BitString, x: &BitString) -> Result<usize> {
    occ_stepped(w, x, w.len().max(1))
}

fn occ_stepped(w: &BitString, x: &BitString, step: usize) -> Result<usize> {
    if w.is_empty() {
        return Err(Error::EmptyPattern);
    }
    if w.len() > x.len() {
        return Ok(0);
    }
    let k = w.len();
    let last = x.len() - k;
    if k <= 64 {
        let target = w.window_value(0, k);
        Ok((0..=last)
            .step_by(step)
            .filter(|&i| x.window_value(i, k) == target)
            .count())
    } else {
        Ok((0..=last).step_by(step).filter(|&i| matches_at(w, x, i)).count())
    }
}

/// Every square `x[i..i+l] = x[i+l..i+2l]` with `l >= min_half`, sorted by `(i, l)`.
///
/// Quadratic scan: for each half-length the positions where `x[j] = x[j+l]`
/// are run-length accumulated.
pub fn find_squares(x: &BitString, min_half: usize) -> Vec<(usize, usize)> {
    let min_half = min_half.max(1);
    let n = x.len();
    let mut out = Vec::new();
    let mut l = min_half;
    while 2 * l <= n {
        let mut run = 0usize;
        for j in 0..n - l {
            if x.bit(j) == x.bit(j + l) {
                run += 1;
                if run >= l {
                    out.push((j + 1 - l, l));
                }
            } else {
                run = 0;
            }
        }
        l += 1;
    }
    out.sort_unstable();
    out
}

/// True iff no substring of `x` is a `k`-th power `u^k` of a non-empty `u`.
pub fn is_k_power_free(x: &BitString, k: usize) -> bool {
    assert!(k >= 2, "k must be at least 2");
    let n = x.len();
    let mut l = 1;
    while k * l <= n {
        let need = (k - 1) * l;
        let mut run = 0usize;
        for j in 0..n - l {
            if x.bit(j) == x.bit(j + l) {
                run += 1;
                if run >= need {
                    return false;
                }
            } else {
                run = 0;
            }
        }
        l += 1;
    }
    true
}

/// Lexicographic-length order: shorter first, then by the first differing bit.
pub fn lexlen_compare(x: &BitString, y: &BitString) -> Ordering {
    x.len().cmp(&y.len()).then_with(|| {
        x.iter()
            .zip(y.iter())
            .find(|(a, b)| a != b)
            .map(|(a, b)| a.cmp(&b))
            .unwrap_or(Ordering::Equal)
    })
}
