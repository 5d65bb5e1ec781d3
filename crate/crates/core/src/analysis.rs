//! Sliding-window frequency statistics, automatic-complexity rate profiles and
//! exact evaluation of closed-form ratio bounds.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::acsearch::exact_a;
use crate::error::{Error, Result};
use crate::psc::{self, factorize, Psc};
use crate::scalar::{decimal, pow2, to_u64};
use crate::tseq::{TParams, TSeq};
use crate::witness::{
    acceptance_length_equation, build_case, build_case_at_length, build_m1, build_m1_at_length,
    build_m2, case_for, m2_max_w, CaseGeometry, WitnessSpec,
};
use crate::words::BitString;

/// Largest prefix length for which profiles use exact search.
pub const EXACT_PROFILE_LEN: usize = 18;
/// Largest prefix length for which profiles look for a periodic tail.
pub const PERIODIC_TAIL_LEN: u64 = 1 << 12;
/// Largest word length [`frequency_report`] tabulates.
pub const FREQUENCY_K_CAP: usize = 24;
/// Digits after the point in rendered decimals.
pub const DECIMAL_DIGITS: usize = 10;

/// Sliding-window counts of every length-`k` word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrequencyReport {
    pub k: usize,
    pub windows: u64,
    /// Indexed by the word's value, most significant bit first.
    pub counts: Vec<u64>,
    #[serde(serialize_with = "ser_rational")]
    pub max_deviation: BigRational,
}

impl FrequencyReport {
    pub fn max_deviation_f64(&self) -> f64 {
        rational_to_f64(&self.max_deviation)
    }
}

pub fn frequency_report(x: &BitString, k: usize) -> Result<FrequencyReport> {
    if k == 0 || k > x.len() {
        return Err(Error::OutOfRange(format!(
            "word length {k} must be in [1, {}]",
            x.len()
        )));
    }
    if k > FREQUENCY_K_CAP {
        return Err(Error::BudgetExceeded {
            what: "word length",
            requested: k.to_string(),
            budget: FREQUENCY_K_CAP as u64,
        });
    }
    let mut counts = vec![0u64; 1 << k];
    let mask = (1u64 << k) - 1;
    let mut v = x.window_value(0, k);
    counts[v as usize] += 1;
    for i in k..x.len() {
        v = ((v << 1) | x.bit(i) as u64) & mask;
        counts[v as usize] += 1;
    }
    let windows = (x.len() - k + 1) as u64;
    let share = BigRational::new(BigInt::one(), BigInt::from(1u64 << k));
    let max_deviation = counts
        .iter()
        .map(|&c| (BigRational::new(BigInt::from(c), BigInt::from(windows)) - &share).abs())
        .max()
        .expect("at least one word");
    Ok(FrequencyReport {
        k,
        windows,
        counts,
        max_deviation,
    })
}

/// An upper bound on `A(x[0..m]) / (m + 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RatePoint {
    #[serde(with = "decimal")]
    pub m: BigUint,
    #[serde(with = "decimal")]
    pub states: BigUint,
    #[serde(serialize_with = "ser_rational")]
    pub bound: BigRational,
    pub source: String,
}

impl RatePoint {
    pub fn csv_header() -> &'static str {
        "m,bound_num,bound_den,bound_decimal,source"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},\"{}\"",
            self.m,
            self.bound.numer(),
            self.bound.denom(),
            decimal_string(&self.bound, DECIMAL_DIGITS),
            self.source.replace('"', "\"\"")
        )
    }
}

/// The sequence a profile is taken over.
#[derive(Clone, Copy)]
pub enum RateSource<'a> {
    Psc(&'a Psc),
    Tseq(&'a TSeq),
}

impl RateSource<'_> {
    fn prefix(&self, len: u64) -> Result<BitString> {
        match self {
            RateSource::Psc(p) => p.prefix(len),
            RateSource::Tseq(t) => t.prefix(len),
        }
    }
}

/// Best certified bound for each `m`, taking the smallest witness among a
/// restart chain, the applicable two-loop or `M1`/`M2` machines, and exact
/// search for short prefixes.
pub fn rate_profile(source: RateSource<'_>, ms: &[BigUint]) -> Result<Vec<RatePoint>> {
    ms.iter().map(|m| rate_point(source, m)).collect()
}

fn rate_point(source: RateSource<'_>, m: &BigUint) -> Result<RatePoint> {
    let len = m + 1u32;
    let point = |states: BigUint, src: String| RatePoint {
        m: m.clone(),
        bound: BigRational::new(BigInt::from(states.clone()), BigInt::from(len.clone())),
        states,
        source: src,
    };
    if let Some(l) = to_u64(&len).filter(|&l| l <= EXACT_PROFILE_LEN as u64) {
        let r = exact_a(&source.prefix(l)?)?;
        return Ok(point(BigUint::from(r.value), "exact".into()));
    }
    // A restart chain needs one state per prefix position plus the end.
    let mut best = (&len + 1u32, "chain".to_string());
    if let Some(l) = to_u64(&len).filter(|&l| l <= PERIODIC_TAIL_LEN) {
        if let Some((start, period)) = best_chain_loop(&source.prefix(l)?) {
            let states = BigUint::from(start + period + 1);
            if states < best.0 {
                best = (states, format!("chain+loop(start={start}, period={period})"));
            }
        }
    }
    let candidates = match source {
        RateSource::Psc(_) => psc_candidates(&len),
        RateSource::Tseq(t) => tseq_candidates(t, &len)?,
    };
    for spec in candidates {
        let count = spec.state_count();
        if count < best.0 && certified_unique(&spec) {
            best = (count, spec.name.clone());
        }
    }
    Ok(point(best.0, best.1))
}

/// The `(start, period)` minimizing `start + period` such that `x[start..]`
/// has period `period` and is longer than it, as used by
/// [`chain_loop_machine`](crate::automata::chain_loop_machine).
pub fn best_chain_loop(x: &BitString) -> Option<(usize, usize)> {
    let len = x.len();
    let mut best: Option<(usize, usize)> = None;
    for period in 1..len {
        if best.is_some_and(|(s, p)| period >= s + p) {
            break;
        }
        let mut start = len - period;
        while start > 0 && x.bit(start - 1) == x.bit(start - 1 + period) {
            start -= 1;
        }
        if start + period < len && best.is_none_or(|(s, p)| start + period < s + p) {
            best = Some((start, period));
        }
    }
    best
}

fn certified_unique(spec: &WitnessSpec) -> bool {
    acceptance_length_equation(spec, &spec.target_len).is_ok_and(|c| c.is_unique())
}

/// Zone index `n` with `|C̄_{n+1}| <= len < |C̄_{n+2}|`, if `len >= |C̄_1|`.
fn psc_zone_pair(len: &BigUint) -> Option<u64> {
    if *len < psc::cumulative_length_closed(1) {
        return None;
    }
    let mut n = 0u64;
    while psc::cumulative_length_closed(n + 2) <= *len {
        n += 1;
    }
    Some(n)
}

fn psc_candidates(len: &BigUint) -> Vec<WitnessSpec> {
    let Some(n) = psc_zone_pair(len) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for k in n.saturating_sub(1)..=n + 1 {
        let Some(case) = case_for(k) else { continue };
        let Ok(g) = CaseGeometry::new(case, k) else { continue };
        if g.second_loop_start() > *len {
            continue;
        }
        if let Ok(mut spec) = build_case_at_length(case, k, len) {
            if k == n + 1 {
                spec.name = format!("switched {}", spec.name);
            }
            out.push(spec);
        }
    }
    out
}

fn tseq_candidates(seq: &TSeq, len: &BigUint) -> Result<Vec<WitnessSpec>> {
    let mut n = 0u32;
    while seq.cumulative_length(n + 1)? <= *len {
        n += 1;
    }
    let mut out = Vec::new();
    if n >= 1 {
        let w = len - seq.cumulative_length(n)?;
        if w.is_zero() {
            out.push(build_m1(n, seq)?);
        } else if w <= m2_max_w(n, seq)? {
            out.push(build_m2(n, &w, seq)?);
        }
    }
    if let Ok(mut spec) = build_m1_at_length(n + 1, seq, len) {
        spec.name = format!("switched {}", spec.name);
        out.push(spec);
    }
    Ok(out)
}

/// Closed-form bound families evaluated exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Series {
    /// Worst-case `M2` ratio for the scaled `T`.
    Sup1,
    /// Two-loop bound when `n` is even but not a power of two.
    Case3,
    Case1Limit,
    Case2Limit,
    Case4Limit,
    /// Case 1 machine state count over `|C̄_{n+1}|`.
    IcQuarter,
    /// `M1` state count over `|T̄_n|` for the scaled `T`.
    M1Ratio,
}

impl Series {
    pub const ALL: [Series; 7] = [
        Series::Sup1,
        Series::Case3,
        Series::Case1Limit,
        Series::Case2Limit,
        Series::Case4Limit,
        Series::IcQuarter,
        Series::M1Ratio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Series::Sup1 => "sup1",
            Series::Case3 => "case3",
            Series::Case1Limit => "case1_limit",
            Series::Case2Limit => "case2_limit",
            Series::Case4Limit => "case4_limit",
            Series::IcQuarter => "ic_quarter",
            Series::M1Ratio => "m1_ratio",
        }
    }

    /// The value each series is expected to approach.
    pub fn limit(self) -> BigRational {
        let r = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
        match self {
            Series::Sup1 => r(1, 2),
            Series::Case3 => r(2, 3),
            Series::Case1Limit => r(4, 7),
            Series::Case2Limit => r(2, 5),
            Series::Case4Limit => r(3, 5),
            Series::IcQuarter => r(1, 4),
            Series::M1Ratio => r(0, 1),
        }
    }

    /// A default list of `n` values where the series is defined.
    pub fn default_ns(self) -> Vec<u64> {
        match self {
            Series::Sup1 | Series::M1Ratio => (2..=8).collect(),
            Series::Case3 => (6..=50).filter(|&n| case_for(n) == Some(3)).collect(),
            Series::Case1Limit | Series::IcQuarter => vec![2, 4, 8, 16, 32, 64],
            Series::Case2Limit => vec![3, 7, 15, 31, 63],
            Series::Case4Limit => (5..=49).filter(|&n| factorize(n + 1).s == 1).collect(),
        }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Series {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Series::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown series {s:?}")))
    }
}

fn q(x: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn qi(x: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn require_case(case: u8, n: u64) -> Result<()> {
    if case_for(n) == Some(case) {
        Ok(())
    } else {
        Err(Error::CaseMismatch { case, n: n as u32 })
    }
}

pub fn bound_series(which: Series, ns: &[u64]) -> Result<Vec<BigRational>> {
    ns.iter().map(|&n| bound_value(which, n)).collect()
}

pub fn bound_value(which: Series, n: u64) -> Result<BigRational> {
    let cbar = |k: u64| q(psc::cumulative_length_closed(k));
    let p = |k: u64| q(pow2(k));
    let third = |k: u64| BigRational::new(BigInt::from(k), BigInt::from(3));
    let half_block = |n: u64| p(n + 2) * BigRational::new(BigInt::from(n + 2), BigInt::from(2));
    Ok(match which {
        Series::Sup1 | Series::M1Ratio => {
            let seq = TSeq::new(TParams::scaled());
            let j = u32::try_from(n).map_err(|_| Error::OutOfRange(format!("n = {n}")))?;
            if j == 0 {
                return Err(Error::ZeroOrder);
            }
            let l = q(seq.cumulative_length(j - 1)?);
            let tn = q(seq.zone_length(j)?);
            if which == Series::Sup1 {
                (&l + &tn + p(n + 1) + qi(1)) / (&l + &tn * qi(2) + p(n))
            } else {
                (&l + p(n) + qi(1)) / (l + tn)
            }
        }
        Series::Case3 => {
            require_case(3, n)?;
            (cbar(n) + qi(n) + p(n + 1) + qi(1) + half_block(n))
                / (cbar(n + 1) - third(n) + qi(1) + half_block(n))
        }
        Series::Case1Limit => {
            require_case(1, n)?;
            (cbar(n) + qi(1) + qi(n) + p(n + 1) + half_block(n))
                / (cbar(n + 1) - qi(n) + p(n) * qi(n - 1) + half_block(n))
        }
        Series::Case2Limit => {
            require_case(2, n)?;
            (cbar(n) + qi(2) + qi(2 * n) + p(n + 1) + p(n + 2))
                / (cbar(n + 1) + qi(2) + qi(n) + p(n) * qi(n - 1) + p(n + 2))
        }
        Series::Case4Limit => {
            require_case(4, n)?;
            let t = factorize(n + 1).t;
            (cbar(n) + third(4 * n) + p(n + 1) * qi(t) + p(n + 2))
                / (cbar(n + 1) + third(n) + p(n) * qi(n - 1) + p(n + 2))
        }
        Series::IcQuarter => {
            require_case(1, n)?;
            let spec = build_case(1, n, &BigUint::zero())?;
            q(spec.state_count()) / cbar(n + 1)
        }
    })
}

/// Ratios once the state count stops growing in `j` (Case 3 with the
/// `C_{n+2}` loop), for each `j`.
pub fn constant_state_tail(n: u64, js: &[u64]) -> Result<Vec<BigRational>> {
    require_case(3, n)?;
    let cbar = |k: u64| q(psc::cumulative_length_closed(k));
    let p = |k: u64| q(pow2(k));
    let half_block = p(n + 2) * BigRational::new(BigInt::from(n + 2), BigInt::from(2));
    let num = cbar(n) + qi(n) + p(n + 1) + qi(1) + &half_block;
    let den = cbar(n + 1) - BigRational::new(BigInt::from(n), BigInt::from(3)) + qi(1) + half_block;
    Ok(js.iter().map(|&j| &num / (&den + qi(j))).collect())
}

/// `r` truncated toward zero to `digits` places.
pub fn decimal_string(r: &BigRational, digits: usize) -> String {
    let neg = r.is_negative();
    let scaled = (r.numer().abs() * BigInt::from(10u32).pow(digits as u32)) / r.denom();
    let s = scaled.to_string();
    let s = format!("{s:0>width$}", width = digits + 1);
    let (int, frac) = s.split_at(s.len() - digits);
    let sign = if neg && !scaled.is_zero() { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    decimal_string(r, 17).parse().unwrap_or(f64::NAN)
}

fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("Rational", 3)?;
    st.serialize_field("num", &r.numer().to_string())?;
    st.serialize_field("den", &r.denom().to_string())?;
    st.serialize_field("decimal", &decimal_string(r, DECIMAL_DIGITS))?;
    st.end()
}

/// The integer part of `r`, rounded down.
pub fn floor_rational(r: &BigRational) -> BigInt {
    r.numer().div_floor(r.denom())
}
