//! The sequence `T = d_1^{f(1)} d_2^{f(2)} ⋯` built from repeated de Bruijn
//! strings, with either the exact tower exponents or the scaled `f(j) = j^j`.

use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::debruijn::{self, ORDER_CAP};
use crate::error::{Error, Result};
use crate::scalar::{pow2, to_u64};
use crate::words::BitString;

/// Largest zone index with exactly representable lengths in exact mode.
pub const EXACT_ZONE_LIMIT: u32 = 3;
/// Default largest prefix, in bits, that [`TSeq::prefix`] will build.
pub const DEFAULT_PREFIX_BUDGET: u64 = 1 << 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TMode {
    /// `f(1) = 2`, `f(j) = |T̄_{j-1}|^{|T̄_{j-1}|}`.
    Exact,
    /// `f(j) = j^j`.
    Scaled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TParams {
    pub mode: TMode,
}

impl TParams {
    pub fn exact() -> Self {
        Self { mode: TMode::Exact }
    }

    pub fn scaled() -> Self {
        Self {
            mode: TMode::Scaled,
        }
    }
}

impl Default for TParams {
    fn default() -> Self {
        Self::scaled()
    }
}

/// Decimal magnitude of a zone or prefix length.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SizeMagnitude {
    /// The exact number of decimal digits.
    Digits { digits: u64 },
    /// `log10(log10(value))`, for values whose digit count is itself too
    /// large to write down.
    LogLog10 { value: f64 },
}

/// Lazy access to `T` for a fixed parameter set.
pub struct TSeq {
    params: TParams,
    prefix_budget: u64,
    bases: Vec<OnceLock<Arc<BitString>>>,
    exact_f: Vec<OnceLock<BigUint>>,
}

impl std::fmt::Debug for TSeq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TSeq").field("params", &self.params).finish()
    }
}

impl TSeq {
    pub fn new(params: TParams) -> Self {
        Self {
            params,
            prefix_budget: DEFAULT_PREFIX_BUDGET,
            bases: (0..=ORDER_CAP).map(|_| OnceLock::new()).collect(),
            exact_f: (0..=EXACT_ZONE_LIMIT).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn with_prefix_budget(mut self, bits: u64) -> Self {
        self.prefix_budget = bits;
        self
    }

    pub fn params(&self) -> TParams {
        self.params
    }

    /// `d_j`, chosen to start with `1` for odd `j` and `0` for even `j`.
    pub fn debruijn(&self, j: u32) -> Result<Arc<BitString>> {
        if j == 0 {
            return Err(Error::ZeroOrder);
        }
        let slot = self.bases.get(j as usize).ok_or(Error::OrderTooLarge {
            order: j,
            cap: ORDER_CAP,
        })?;
        if let Some(d) = slot.get() {
            return Ok(d.clone());
        }
        let d = debruijn::generate_with_start_bit(j, j % 2 == 1)?;
        Ok(slot.get_or_init(|| Arc::new(d.into_bits())).clone())
    }

    /// The exponent `f(j)`.
    pub fn exponent(&self, j: u32) -> Result<BigUint> {
        if j == 0 {
            return Err(Error::ZeroOrder);
        }
        match self.params.mode {
            TMode::Scaled => Ok(BigUint::from(j).pow(j)),
            TMode::Exact => {
                if j > EXACT_ZONE_LIMIT {
                    return Err(Error::Unrepresentable(format!(
                        "exact exponent f({j}) has more digits than can be stored"
                    )));
                }
                if let Some(v) = self.exact_f[j as usize].get() {
                    return Ok(v.clone());
                }
                let v = if j == 1 {
                    BigUint::from(2u32)
                } else {
                    let base = self.cumulative_length(j - 1)?;
                    let e = base.to_u32().ok_or_else(|| {
                        Error::Unrepresentable(format!("exponent of f({j})"))
                    })?;
                    base.pow(e)
                };
                Ok(self.exact_f[j as usize].get_or_init(|| v).clone())
            }
        }
    }

    /// `|T_j| = 2^j · f(j)`.
    pub fn zone_length(&self, j: u32) -> Result<BigUint> {
        Ok(self.exponent(j)? << j)
    }

    /// `|T̄_j| = |T_1 ⋯ T_j|`; zero for `j = 0`.
    pub fn cumulative_length(&self, j: u32) -> Result<BigUint> {
        let mut acc = BigUint::zero();
        for k in 1..=j {
            acc += self.zone_length(k)?;
        }
        Ok(acc)
    }

    /// Decimal magnitude of `|T_j|`, exact where the value can be stored.
    pub fn zone_magnitude(&self, j: u32) -> Result<SizeMagnitude> {
        match self.zone_length(j) {
            Ok(v) => Ok(SizeMagnitude::Digits {
                digits: v.to_string().len() as u64,
            }),
            Err(_) if self.params.mode == TMode::Exact && j == EXACT_ZONE_LIMIT + 1 => {
                // |T_4| = 16 · L^L with L = |T̄_3|, so
                // log10 log10 |T_4| = log10 L + log10 log10 L + o(1).
                let l = self.cumulative_length(EXACT_ZONE_LIMIT)?;
                let log_l = log10_big(&l);
                Ok(SizeMagnitude::LogLog10 {
                    value: log_l + log_l.log10(),
                })
            }
            Err(e) => Err(e),
        }
    }

    /// The zone containing index `i`, with the offset inside it.
    pub fn locate(&self, i: &BigUint) -> Result<(u32, BigUint)> {
        let mut start = BigUint::zero();
        let mut j = 1u32;
        loop {
            let end = &start + self.zone_length(j)?;
            if *i < end {
                return Ok((j, i - &start));
            }
            start = end;
            j += 1;
        }
    }

    /// `T[i] = d_j[(i - |T̄_{j-1}|) mod 2^j]`.
    pub fn bit_at(&self, i: &BigUint) -> Result<bool> {
        let (j, off) = self.locate(i)?;
        let d = self.debruijn(j)?;
        let pos = off.mod_floor(&pow2(j as u64));
        Ok(d.bit(to_u64(&pos).unwrap() as usize))
    }

    /// `T[start..start+len]`.
    pub fn bits(&self, start: &BigUint, len: u64) -> Result<BitString> {
        self.check_budget(len)?;
        let mut out = BitString::with_capacity(len as usize);
        if len == 0 {
            return Ok(out);
        }
        let (mut j, off) = self.locate(start)?;
        let mut zone_left = self.zone_length(j)? - &off;
        let mut d = self.debruijn(j)?;
        let mut pos = to_u64(&off.mod_floor(&pow2(j as u64))).unwrap() as usize;
        for _ in 0..len {
            if zone_left.is_zero() {
                j += 1;
                zone_left = self.zone_length(j)?;
                d = self.debruijn(j)?;
                pos = 0;
            }
            out.push(d.bit(pos));
            pos = (pos + 1) % d.len();
            zone_left -= 1u32;
        }
        Ok(out)
    }

    /// The first `m` bits of `T`.
    pub fn prefix(&self, m: u64) -> Result<BitString> {
        self.bits(&BigUint::zero(), m)
    }

    fn check_budget(&self, len: u64) -> Result<()> {
        if len > self.prefix_budget {
            return Err(Error::BudgetExceeded {
                what: "prefix length",
                requested: len.to_string(),
                budget: self.prefix_budget,
            });
        }
        Ok(())
    }
}

/// `log10(x)` for arbitrarily large `x`, accurate to double precision.
pub(crate) fn log10_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().log10();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap();
    top.log10() + shift as f64 * std::f64::consts::LOG10_2
}
