//! Pierce–Shields Champernowne sequences.
//!
//! Zone `C_n` is built from a de Bruijn string `d_n` of order `n`. Writing
//! `n = 2^s·t` with `t` odd, the zone is `B_0 B_1 ⋯ B_{2^s-1}` where
//! `B_j = (d_n rotated left by j)^t`. Every length-`n` word then occurs
//! exactly once at a block-aligned position of the zone.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::debruijn::{self, DeBruijnString, ORDER_CAP};
use crate::error::{Error, Result};
use crate::scalar::to_u64;
use crate::words::{find_squares, BitString};

/// Default largest zone that [`Psc::zone`] materializes (20·2^20 bits).
pub const DEFAULT_ZONE_CAP: u32 = 20;
/// Default largest prefix, in bits, that [`Psc::prefix`] will build.
pub const DEFAULT_PREFIX_BUDGET: u64 = 1 << 30;

/// `n = 2^s · t` with `t` odd.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ZoneFactorization {
    pub n: u64,
    pub s: u32,
    pub t: u64,
}

impl ZoneFactorization {
    pub fn blocks(&self) -> u64 {
        1 << self.s
    }

    pub fn is_power_of_two(&self) -> bool {
        self.t == 1
    }
}

pub fn factorize(n: u64) -> ZoneFactorization {
    assert!(n >= 1, "zone index must be positive");
    let s = n.trailing_zeros();
    ZoneFactorization { n, s, t: n >> s }
}

/// `|C_1 ⋯ C_n| = Σ_{k=1..n} k·2^k`, summed term by term.
pub fn cumulative_length(n: u64) -> BigUint {
    (1..=n).fold(BigUint::zero(), |acc, k| acc + zone_length(k))
}

/// Closed form `(n-1)·2^{n+1} + 2` of [`cumulative_length`] (valid for `n >= 0`).
pub fn cumulative_length_closed(n: u64) -> BigUint {
    if n == 0 {
        return BigUint::zero();
    }
    (BigUint::from(n - 1) << (n + 1)) + 2u32
}

/// `|C_n| = n·2^n`.
pub fn zone_length(n: u64) -> BigUint {
    BigUint::from(n) << n
}

type Chooser = dyn Fn(u32) -> Result<DeBruijnString> + Send + Sync;

/// A Pierce–Shields sequence with a fixed de Bruijn string per order.
///
/// De Bruijn strings and materialized zones are cached in append-only
/// slots; all accessors take `&self` and may be called concurrently.
pub struct Psc {
    choice: Arc<Chooser>,
    lex_least: bool,
    zone_cap: u32,
    prefix_budget: u64,
    bases: Vec<OnceLock<Arc<BitString>>>,
    zones: Vec<OnceLock<Arc<BitString>>>,
}

impl fmt::Debug for Psc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Psc")
            .field("lex_least", &self.lex_least)
            .field("zone_cap", &self.zone_cap)
            .field("prefix_budget", &self.prefix_budget)
            .finish()
    }
}

impl Default for Psc {
    fn default() -> Self {
        Self::new()
    }
}

impl Psc {
    /// The sequence built from the lexicographically least de Bruijn strings.
    pub fn new() -> Self {
        Self::build(Arc::new(debruijn::generate_lex_least), true)
    }

    /// A sequence with a caller-supplied de Bruijn string per order.
    pub fn with_choice<F>(choice: F) -> Self
    where
        F: Fn(u32) -> Result<DeBruijnString> + Send + Sync + 'static,
    {
        Self::build(Arc::new(choice), false)
    }

    fn build(choice: Arc<Chooser>, lex_least: bool) -> Self {
        Self {
            choice,
            lex_least,
            zone_cap: DEFAULT_ZONE_CAP,
            prefix_budget: DEFAULT_PREFIX_BUDGET,
            bases: (0..=ORDER_CAP).map(|_| OnceLock::new()).collect(),
            zones: (0..=ORDER_CAP).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn with_zone_cap(mut self, cap: u32) -> Self {
        self.zone_cap = cap.min(ORDER_CAP);
        self
    }

    pub fn with_prefix_budget(mut self, bits: u64) -> Self {
        self.prefix_budget = bits;
        self
    }

    pub fn zone_cap(&self) -> u32 {
        self.zone_cap
    }

    /// The de Bruijn string `d_n` used for zone `n`.
    pub fn debruijn(&self, n: u32) -> Result<Arc<BitString>> {
        if n == 0 {
            return Err(Error::ZeroOrder);
        }
        let slot = self.bases.get(n as usize).ok_or(Error::OrderTooLarge {
            order: n,
            cap: ORDER_CAP,
        })?;
        if let Some(d) = slot.get() {
            return Ok(d.clone());
        }
        let d = (self.choice)(n)?;
        if d.order() != n {
            return Err(Error::Invalid(format!(
                "de Bruijn chooser returned order {} for zone {n}",
                d.order()
            )));
        }
        Ok(slot.get_or_init(|| Arc::new(d.into_bits())).clone())
    }

    /// The zone `C_n`.
    pub fn zone(&self, n: u32) -> Result<Arc<BitString>> {
        if n == 0 {
            return Err(Error::ZeroOrder);
        }
        if n > self.zone_cap {
            return Err(Error::ZoneCapExceeded {
                n,
                cap: self.zone_cap,
            });
        }
        let slot = &self.zones[n as usize];
        if let Some(z) = slot.get() {
            return Ok(z.clone());
        }
        let d = self.debruijn(n)?;
        let f = factorize(n as u64);
        let mut z = BitString::with_capacity((n as usize) << n);
        for j in 0..f.blocks() {
            let rotated = d.rotate_left(j as usize);
            for _ in 0..f.t {
                z.append(&rotated);
            }
        }
        Ok(slot.get_or_init(|| Arc::new(z)).clone())
    }

    /// `v_n` such that `d_n = 0^n · 1 · v_n`.
    pub fn v_tail(&self, n: u32) -> Result<BitString> {
        let d = self.debruijn(n)?;
        let n_us = n as usize;
        if !d.starts_with(&BitString::zeros(n_us)) || !d.bit(n_us) {
            return Err(Error::NotZeroPrefixed(n));
        }
        Ok(d.slice(n_us + 1, d.len()))
    }

    /// Zone index and offset of global index `i`.
    pub fn locate(&self, i: &BigUint) -> (u32, BigUint) {
        let mut n = 1u32;
        let mut start = BigUint::zero();
        loop {
            let end = &start + zone_length(n as u64);
            if *i < end {
                return (n, i - &start);
            }
            start = end;
            n += 1;
        }
    }

    /// The bit `C[i]`, computed arithmetically without materializing zones.
    pub fn bit_at(&self, i: &BigUint) -> Result<bool> {
        let (n, off) = self.locate(i);
        Ok(ZoneCursor::new(self, n, zone_offset(n, &off)?)?.peek())
    }

    /// `C[start..start+len]`.
    pub fn bits(&self, start: &BigUint, len: u64) -> Result<BitString> {
        if len > self.prefix_budget {
            return Err(Error::BudgetExceeded {
                what: "bit range",
                requested: len.to_string(),
                budget: self.prefix_budget,
            });
        }
        let mut out = BitString::with_capacity(len as usize);
        if len == 0 {
            return Ok(out);
        }
        let (n, off) = self.locate(start);
        let mut cur = ZoneCursor::new(self, n, zone_offset(n, &off)?)?;
        for _ in 0..len {
            out.push(cur.next_bit()?);
        }
        Ok(out)
    }

    /// The first `m` bits of the sequence.
    pub fn prefix(&self, m: u64) -> Result<BitString> {
        if m > self.prefix_budget {
            return Err(Error::BudgetExceeded {
                what: "prefix length",
                requested: m.to_string(),
                budget: self.prefix_budget,
            });
        }
        let mut out = BitString::with_capacity(m as usize);
        let mut n = 1u32;
        while (out.len() as u64) < m {
            let remaining = (m - out.len() as u64) as usize;
            if n <= self.zone_cap {
                let z = self.zone(n)?;
                if z.len() <= remaining {
                    out.append(&z);
                } else {
                    out.append(&z.slice(0, remaining));
                }
            } else {
                let mut cur = ZoneCursor::new(self, n, 0)?;
                let take = remaining.min(((n as u64) << n) as usize);
                for _ in 0..take {
                    out.push(cur.next_bit()?);
                }
            }
            n += 1;
        }
        Ok(out)
    }

    /// True iff every length-`n` word occurs exactly once block-aligned in `C_n`.
    pub fn verify_zone(&self, n: u32) -> Result<bool> {
        Ok(verify_zone_bits(&*self.zone(n)?, n))
    }

    /// Scans all squares with half-length `>= j` inside zone `C_j` and reports
    /// each half-length not divisible by the claimed modulus: `2^j` for odd
    /// `j`, `2^j - 1` for `j` a power of two.
    pub fn verify_loop_lemma(&self, j: u32) -> Result<LoopLemmaReport> {
        let modulus = loop_lemma_modulus(j)?;
        let zone = self.zone(j)?;
        let squares = find_squares(&zone, j as usize);
        let mut observed = BTreeSet::new();
        let mut violations = Vec::new();
        for &(pos, half) in &squares {
            observed.insert(half as u64);
            if !(half as u64).is_multiple_of(modulus) {
                violations.push(SquareViolation {
                    position: pos as u64,
                    half_length: half as u64,
                });
            }
        }
        Ok(LoopLemmaReport {
            j,
            modulus,
            squares_scanned: squares.len() as u64,
            observed_half_lengths: observed.into_iter().collect(),
            violations,
        })
    }

    pub fn is_lex_least(&self) -> bool {
        self.lex_least
    }
}

/// The block-aligned uniqueness check on an already materialized zone.
pub fn verify_zone_bits(zone: &BitString, n: u32) -> bool {
    let n_us = n as usize;
    if n == 0 || n > 40 || zone.len() != n_us << n {
        return false;
    }
    let mut seen = vec![false; 1 << n];
    (0..zone.len())
        .step_by(n_us)
        .all(|i| !std::mem::replace(&mut seen[zone.window_value(i, n_us) as usize], true))
}

pub fn loop_lemma_modulus(j: u32) -> Result<u64> {
    if j == 0 || j >= 63 {
        return Err(Error::LemmaNotApplicable(j));
    }
    if j % 2 == 1 {
        Ok(1 << j)
    } else if j.is_power_of_two() {
        Ok((1 << j) - 1)
    } else {
        Err(Error::LemmaNotApplicable(j))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SquareViolation {
    pub position: u64,
    pub half_length: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopLemmaReport {
    pub j: u32,
    pub modulus: u64,
    pub squares_scanned: u64,
    pub observed_half_lengths: Vec<u64>,
    pub violations: Vec<SquareViolation>,
}

impl LoopLemmaReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn zone_offset(n: u32, off: &BigUint) -> Result<u64> {
    if n > ORDER_CAP {
        return Err(Error::OrderTooLarge {
            order: n,
            cap: ORDER_CAP,
        });
    }
    Ok(to_u64(off).expect("offsets inside zones below the order cap fit in u64"))
}

/// Streams bits of the sequence from a position inside zone `n`.
struct ZoneCursor<'a> {
    psc: &'a Psc,
    n: u32,
    offset: u64,
    d: Arc<BitString>,
    fact: ZoneFactorization,
}

impl<'a> ZoneCursor<'a> {
    fn new(psc: &'a Psc, n: u32, offset: u64) -> Result<Self> {
        Ok(Self {
            psc,
            n,
            offset,
            d: psc.debruijn(n)?,
            fact: factorize(n as u64),
        })
    }

    fn peek(&self) -> bool {
        let period = 1u64 << self.n;
        let block = self.offset / (self.fact.t * period);
        let pos = self.offset % period;
        self.d.bit(((block + pos) % period) as usize)
    }

    fn next_bit(&mut self) -> Result<bool> {
        if self.offset == (self.n as u64) << self.n {
            *self = ZoneCursor::new(self.psc, self.n + 1, 0)?;
        }
        let b = self.peek();
        self.offset += 1;
        Ok(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(6), ZoneFactorization { n: 6, s: 1, t: 3 });
        assert_eq!(factorize(8), ZoneFactorization { n: 8, s: 3, t: 1 });
        assert_eq!(factorize(7), ZoneFactorization { n: 7, s: 0, t: 7 });
        for n in 1..500u64 {
            let f = factorize(n);
            assert_eq!(f.t % 2, 1);
            assert_eq!(f.t << f.s, n);
        }
    }

    #[test]
    fn cumulative_examples() {
        assert_eq!(cumulative_length(0), BigUint::zero());
        assert_eq!(cumulative_length(3), BigUint::from(34u32));
        for n in 0..=200 {
            assert_eq!(cumulative_length(n), cumulative_length_closed(n), "n={n}");
        }
        assert_eq!(cumulative_length(65), (BigUint::from(64u32) << 66u32) + 2u32);
    }

    #[test]
    fn zone_fixtures() {
        let psc = Psc::new();
        assert_eq!(*psc.zone(3).unwrap(), bs("00010111").repeat(3));
        let rows = [
            "0000100110101111",
            "0001001101011110",
            "0010011010111100",
            "0100110101111000",
        ];
        let c4 = bs(&rows.concat());
        assert_eq!(*psc.zone(4).unwrap(), c4);
        let b0 = "0000001000011000101000111001001011001101001111010101110110111111";
        let b1 = "0000010000110001010001110010010110011010011110101011101101111110";
        let c6 = bs(&format!("{b0}{b0}{b0}{b1}{b1}{b1}"));
        assert_eq!(*psc.zone(6).unwrap(), c6);
    }

    #[test]
    fn zone_lengths_and_cap() {
        let psc = Psc::new().with_zone_cap(12);
        for n in 1..=12 {
            assert_eq!(psc.zone(n).unwrap().len(), (n as usize) << n);
        }
        assert!(matches!(psc.zone(13), Err(Error::ZoneCapExceeded { .. })));
    }

    #[test]
    fn bit_at_and_prefix() {
        let psc = Psc::new();
        assert!(!psc.bit_at(&BigUint::zero()).unwrap());
        assert!(psc.bit_at(&BigUint::from(1u32)).unwrap());
        let p = psc.prefix(34).unwrap();
        let expected = bs("01")
            .concat(&bs("00110110"))
            .concat(&bs("00010111").repeat(3));
        assert_eq!(p, expected);
    }

    #[test]
    fn prefix_beyond_zone_cap_uses_cursor() {
        let small = Psc::new().with_zone_cap(3);
        let full = Psc::new();
        let m = cumulative_length(6).to_u64_digits()[0] + 17;
        assert_eq!(small.prefix(m).unwrap(), full.prefix(m).unwrap());
        let r = small.bits(&BigUint::from(100u32), 500).unwrap();
        assert_eq!(r, full.prefix(600).unwrap().slice(100, 600));
    }

    #[test]
    fn prefix_budget_enforced() {
        let psc = Psc::new().with_prefix_budget(100);
        assert!(matches!(psc.prefix(101), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn v_tail_examples() {
        let psc = Psc::new();
        assert_eq!(psc.v_tail(1).unwrap(), BitString::new());
        assert_eq!(psc.v_tail(2).unwrap(), bs("1"));
        assert_eq!(psc.v_tail(3).unwrap(), bs("0111"));
        for n in 1..=10 {
            assert_eq!(psc.v_tail(n).unwrap().len(), (1usize << n) - n as usize - 1);
        }
        let rotated = Psc::with_choice(|n| debruijn::generate_with_start_bit(n, true));
        assert_eq!(rotated.v_tail(3), Err(Error::NotZeroPrefixed(3)));
    }

    #[test]
    fn verify_zone_examples() {
        let psc = Psc::new();
        assert!(psc.verify_zone(3).unwrap());
        assert!(psc.verify_zone(6).unwrap());
        let mut flipped = BitString::new();
        let z = psc.zone(3).unwrap();
        flipped.push(!z.bit(0));
        flipped.append(&z.slice(1, z.len()));
        assert!(!verify_zone_bits(&flipped, 3));
    }

    #[test]
    fn injected_choice_still_champernowne() {
        let psc = Psc::with_choice(|n| debruijn::generate_with_start_bit(n, true));
        assert!(!psc.is_lex_least());
        for n in 1..=10 {
            assert!(psc.verify_zone(n).unwrap());
        }
    }

    #[test]
    fn loop_lemma_small() {
        let psc = Psc::new();
        let r3 = psc.verify_loop_lemma(3).unwrap();
        assert!(r3.ok());
        assert!(r3.observed_half_lengths.iter().all(|l| l % 8 == 0));
        assert!(!r3.observed_half_lengths.is_empty());
        let r4 = psc.verify_loop_lemma(4).unwrap();
        assert!(r4.ok());
        assert!(r4.observed_half_lengths.iter().all(|l| l % 15 == 0));
        assert!(psc.verify_loop_lemma(5).unwrap().ok());
        assert_eq!(psc.verify_loop_lemma(6), Err(Error::LemmaNotApplicable(6)));
    }

    /// The factorization used by the two-loop automaton for even, non
    /// power-of-two `n` spells exactly `C_n C_{n+1}`.
    #[test]
    fn zone_reconstruction_identity_n6() {
        let psc = Psc::new();
        let n = 6usize;
        let (s, t) = (1u32, 3usize);
        let v_n = psc.v_tail(6).unwrap();
        let v_n1 = psc.v_tail(7).unwrap();
        let d_n = psc.debruijn(6).unwrap();
        let mut lp = bs("1").concat(&v_n);
        lp.append(&d_n.repeat(t - 1));
        lp.append(&BitString::zeros(n - 1));
        let mut x = BitString::zeros(n);
        x.append(&lp.repeat(1 << s));
        x.append(&BitString::zeros((1 << s) + 1));
        let lp2 = bs("1").concat(&v_n1).concat(&BitString::zeros(n + 1));
        x.append(&lp2.repeat(n));
        x.append(&bs("1").concat(&v_n1));
        let expected = psc.zone(6).unwrap().concat(&psc.zone(7).unwrap());
        assert_eq!(x, expected);
    }
}
