//! Chain-and-loop witness automata: symbolic specifications with exact state
//! counts, acceptance-length equations, and bounded materialization.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::automata::Dfa;
use crate::dio::{enumerate_nonneg, DioCertificate};
use crate::error::{Error, Result};
use crate::psc::{self, factorize, Psc};
use crate::scalar::{decimal, pow2, to_u64};
use crate::tseq::{TMode, TSeq};
use crate::words::BitString;

/// Default cap on the number of states [`materialize`] will allocate.
pub const DEFAULT_STATE_BUDGET: u64 = 1 << 24;

/// Which sequence a specification's labels refer to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "sequence")]
pub enum SourceKind {
    Psc,
    Tseq { mode: TMode },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentKind {
    Chain,
    Loop,
}

/// A run of states labeled by `source[start..start + len]`.
///
/// A chain adds `len` fresh states. A loop adds `len - 1` fresh states and
/// returns to its root, which is the state the previous segment ended in.
/// For loops, `repeats` is the loop's variable in the intended path: the
/// number of full traversals, plus one if the accepting state lies strictly
/// inside the loop.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    #[serde(with = "decimal")]
    pub start: BigUint,
    #[serde(with = "decimal")]
    pub len: BigUint,
    #[serde(with = "decimal")]
    pub repeats: BigUint,
}

/// The accepting state: `offset` states past the segment's entry state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcceptAt {
    pub segment: usize,
    #[serde(with = "decimal")]
    pub offset: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSpec {
    pub name: String,
    pub source: SourceKind,
    pub segments: Vec<Segment>,
    pub accept: AcceptAt,
    #[serde(with = "decimal")]
    pub target_len: BigUint,
    pub includes_dead_state: bool,
}

/// Lower bounds for the loop variables of an acceptance-length equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundRegime {
    /// Zero, except one for a loop that holds the accepting state off its root.
    Entered,
    /// Every variable at least one.
    Positive,
}

impl WitnessSpec {
    /// `1` (start) `+ Σ chains + Σ (loop − 1) + 1` (dead state).
    pub fn state_count(&self) -> BigUint {
        let body: BigUint = self
            .segments
            .iter()
            .map(|s| match s.kind {
                SegmentKind::Chain => s.len.clone(),
                SegmentKind::Loop => &s.len - 1u32,
            })
            .sum();
        body + 2u32
    }

    pub fn loop_count(&self) -> usize {
        self.segments
            .iter()
            .filter(|s| s.kind == SegmentKind::Loop)
            .count()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Invalid(format!("{}: {m}", self.name)));
        if self.segments.is_empty() {
            return bad("no segments".into());
        }
        if self.accept.segment + 1 != self.segments.len() {
            return bad("accepting state must lie in the last segment".into());
        }
        for (i, s) in self.segments.iter().enumerate() {
            if s.len.is_zero() {
                return bad(format!("segment {i} is empty"));
            }
            if s.kind == SegmentKind::Loop {
                if i > 0 && self.segments[i - 1].kind == SegmentKind::Loop {
                    return bad(format!("loops {} and {i} share a root", i - 1));
                }
                if i != self.accept.segment && s.repeats.is_zero() {
                    return bad(format!("loop {i} is never traversed"));
                }
            }
        }
        let last = &self.segments[self.accept.segment];
        let o = &self.accept.offset;
        match last.kind {
            SegmentKind::Chain if o.is_zero() || *o > last.len => {
                return bad("chain offset out of range".into())
            }
            SegmentKind::Loop if *o >= last.len => return bad("loop offset out of range".into()),
            SegmentKind::Loop if !o.is_zero() && last.repeats.is_zero() => {
                return bad("accepting loop is never entered".into())
            }
            _ => {}
        }
        if self.intended_length() != self.target_len {
            return bad("intended path does not have the target length".into());
        }
        Ok(())
    }

    /// The loop variables of the intended accepting path.
    pub fn intended_solution(&self) -> Vec<BigUint> {
        self.segments
            .iter()
            .filter(|s| s.kind == SegmentKind::Loop)
            .map(|s| s.repeats.clone())
            .collect()
    }

    fn intended_length(&self) -> BigUint {
        let eq = self.equation_parts(BoundRegime::Entered);
        let total = eq.constant
            + BigInt::from(
                eq.coefficients
                    .iter()
                    .zip(self.intended_solution())
                    .map(|(c, v)| c * v)
                    .sum::<BigUint>(),
            );
        total.to_biguint().unwrap_or_default()
    }

    fn equation_parts(&self, regime: BoundRegime) -> EquationParts {
        let mut constant = BigInt::zero();
        let mut coefficients = Vec::new();
        let mut bounds = Vec::new();
        let k = self.accept.segment;
        for (i, s) in self.segments.iter().enumerate() {
            match s.kind {
                SegmentKind::Chain if i == k => constant += BigInt::from(self.accept.offset.clone()),
                SegmentKind::Chain => constant += BigInt::from(s.len.clone()),
                SegmentKind::Loop => {
                    coefficients.push(s.len.clone());
                    let entered = i == k && !self.accept.offset.is_zero();
                    if entered {
                        constant += BigInt::from(self.accept.offset.clone());
                        constant -= BigInt::from(s.len.clone());
                    }
                    bounds.push(match regime {
                        BoundRegime::Positive => BigUint::one(),
                        BoundRegime::Entered if entered => BigUint::one(),
                        BoundRegime::Entered => BigUint::zero(),
                    });
                }
            }
        }
        EquationParts {
            constant,
            coefficients,
            bounds,
        }
    }
}

struct EquationParts {
    constant: BigInt,
    coefficients: Vec<BigUint>,
    bounds: Vec<BigUint>,
}

/// Every length-`target_len` path to the accepting state, as loop counts.
pub fn acceptance_length_equation(spec: &WitnessSpec, target_len: &BigUint) -> Result<DioCertificate> {
    acceptance_length_equation_with(spec, target_len, BoundRegime::Entered)
}

pub fn acceptance_length_equation_with(
    spec: &WitnessSpec,
    target_len: &BigUint,
    regime: BoundRegime,
) -> Result<DioCertificate> {
    let eq = spec.equation_parts(regime);
    enumerate_nonneg(
        &eq.coefficients,
        &eq.constant,
        &BigInt::from(target_len.clone()),
        &eq.bounds,
    )
}

/// Random access to the bits a specification's labels refer to.
pub trait BitSource {
    fn bits(&self, start: &BigUint, len: u64) -> Result<BitString>;
}

impl BitSource for Psc {
    fn bits(&self, start: &BigUint, len: u64) -> Result<BitString> {
        Psc::bits(self, start, len)
    }
}

impl BitSource for TSeq {
    fn bits(&self, start: &BigUint, len: u64) -> Result<BitString> {
        TSeq::bits(self, start, len)
    }
}

fn small(x: &BigUint, what: &'static str, budget: u64) -> Result<u64> {
    match to_u64(x) {
        Some(v) if v <= budget => Ok(v),
        _ => Err(Error::BudgetExceeded {
            what,
            requested: x.to_string(),
            budget,
        }),
    }
}

/// Builds the automaton with an explicit dead state.
pub fn materialize(spec: &WitnessSpec, source: &dyn BitSource, state_budget: u64) -> Result<Dfa> {
    spec.validate()?;
    let q = small(&spec.state_count(), "witness states", state_budget)? as usize;
    let dead = q - 1;
    let mut delta = vec![[dead; 2]; q];
    let set = |delta: &mut Vec<[usize; 2]>, s: usize, b: bool, t: usize| {
        if delta[s][b as usize] != dead {
            return Err(Error::Nondeterministic { state: s, bit: b as u8 });
        }
        delta[s][b as usize] = t;
        Ok(())
    };
    let mut cur = 0usize;
    let mut fresh = 1usize;
    let mut accept = None;
    let offset = to_u64(&spec.accept.offset).unwrap_or(u64::MAX) as usize;
    for (i, seg) in spec.segments.iter().enumerate() {
        let len = small(&seg.len, "segment length", state_budget)?;
        let bits = source.bits(&seg.start, len)?;
        let entry = cur;
        let mut visited = vec![cur];
        for (j, b) in bits.iter().enumerate() {
            let closing = seg.kind == SegmentKind::Loop && j + 1 == bits.len();
            let t = if closing {
                entry
            } else {
                fresh += 1;
                fresh - 1
            };
            set(&mut delta, cur, b, t)?;
            cur = t;
            visited.push(t);
        }
        if i == spec.accept.segment {
            accept = Some(visited[offset]);
        }
    }
    debug_assert_eq!(fresh, dead);
    Dfa::new(delta, 0, accept)
}

/// The string read along the intended accepting path.
pub fn spell(spec: &WitnessSpec, source: &dyn BitSource, budget: u64) -> Result<BitString> {
    spec.validate()?;
    let total = small(&spec.target_len, "spelled length", budget)?;
    let mut out = BitString::with_capacity(total as usize);
    for (i, seg) in spec.segments.iter().enumerate() {
        let len = small(&seg.len, "segment length", budget)?;
        let bits = source.bits(&seg.start, len)?;
        let last = i == spec.accept.segment;
        let o = to_u64(&spec.accept.offset).unwrap_or(0) as usize;
        match seg.kind {
            SegmentKind::Chain if last => out.append(&bits.slice(0, o)),
            SegmentKind::Chain => out.append(&bits),
            SegmentKind::Loop => {
                let reps = small(&seg.repeats, "loop repeats", budget)? as usize;
                if last && o > 0 {
                    out.append(&bits.repeat(reps - 1));
                    out.append(&bits.slice(0, o));
                } else {
                    out.append(&bits.repeat(reps));
                }
            }
        }
    }
    Ok(out)
}

/// Exact cross-check of a materialized witness against its equation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaterialCheck {
    pub states: usize,
    #[serde(with = "decimal")]
    pub dp_count: BigUint,
    pub solutions: usize,
    pub accepts_prefix: bool,
    pub unique: bool,
}

/// Materializes `spec`, counts accepted strings of the target length, and
/// compares with the number of solutions of its acceptance equation.
pub fn check_materialized(
    spec: &WitnessSpec,
    source: &dyn BitSource,
    state_budget: u64,
) -> Result<MaterialCheck> {
    let m = materialize(spec, source, state_budget)?;
    let len = small(&spec.target_len, "target length", state_budget)?;
    let prefix = source.bits(&BigUint::zero(), len)?;
    let dp_count = m.count_accepted(len as usize);
    let eq = acceptance_length_equation(spec, &spec.target_len)?;
    let accepts_prefix = m.accepts(&prefix);
    Ok(MaterialCheck {
        states: m.state_count(),
        unique: accepts_prefix && dp_count.is_one(),
        dp_count,
        solutions: eq.solutions.len(),
        accepts_prefix,
    })
}

/// Appends segments left to right, tracking the source position.
struct Layout {
    pos: BigUint,
    segments: Vec<Segment>,
}

impl Layout {
    fn new() -> Self {
        Self {
            pos: BigUint::zero(),
            segments: Vec::new(),
        }
    }

    fn chain(&mut self, len: BigUint) -> &mut Self {
        if !len.is_zero() {
            self.segments.push(Segment {
                kind: SegmentKind::Chain,
                start: self.pos.clone(),
                len: len.clone(),
                repeats: BigUint::one(),
            });
            self.pos += len;
        }
        self
    }

    fn cycle(&mut self, len: BigUint, repeats: BigUint) -> &mut Self {
        let advance = &len * &repeats;
        self.segments.push(Segment {
            kind: SegmentKind::Loop,
            start: self.pos.clone(),
            len,
            repeats,
        });
        self.pos += advance;
        self
    }

    /// Ends with a loop of length `len` taken at most `max_reps` full times,
    /// then an exit chain if the target lies beyond it.
    fn finish_in_loop(
        mut self,
        len: BigUint,
        max_reps: Option<BigUint>,
        target: &BigUint,
        name: String,
        source: SourceKind,
    ) -> Result<WitnessSpec> {
        if *target < self.pos {
            return Err(Error::OutOfRange(format!(
                "{name}: target {target} precedes the final loop at {}",
                self.pos
            )));
        }
        let r = target - &self.pos;
        let beyond = max_reps.as_ref().filter(|k| r > &len * *k);
        let accept = match beyond {
            Some(k) => {
                let exit = &r - &len * k;
                self.cycle(len, k.clone());
                self.chain(exit.clone());
                AcceptAt {
                    segment: self.segments.len() - 1,
                    offset: exit,
                }
            }
            None => {
                let (full, o) = r.div_rem(&len);
                let reps = if o.is_zero() { full } else { full + 1u32 };
                self.cycle(len, reps);
                AcceptAt {
                    segment: self.segments.len() - 1,
                    offset: o,
                }
            }
        };
        let spec = WitnessSpec {
            name,
            source,
            segments: self.segments,
            accept,
            target_len: target.clone(),
            includes_dead_state: true,
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn tseq_source(seq: &TSeq) -> SourceKind {
    SourceKind::Tseq {
        mode: seq.params().mode,
    }
}

/// `T̄_{n-1}` state by state, then a loop on `d_n` taken up to `f(n)` times.
fn tseq_loop_machine(n: u32, seq: &TSeq, target: &BigUint, name: String) -> Result<WitnessSpec> {
    if n == 0 {
        return Err(Error::ZeroOrder);
    }
    let mut l = Layout::new();
    l.chain(seq.cumulative_length(n - 1)?);
    l.finish_in_loop(
        pow2(n as u64),
        Some(seq.exponent(n)?),
        target,
        name,
        tseq_source(seq),
    )
}

/// Accepts exactly `T̄_n` among strings of its length.
pub fn build_m1(n: u32, seq: &TSeq) -> Result<WitnessSpec> {
    let target = seq.cumulative_length(n)?;
    tseq_loop_machine(n, seq, &target, format!("M1(n={n})"))
}

/// Accepts the prefix of length `len` with `|T̄_{n-1}| <= len <= |T̄_n|`,
/// the accepting state sitting inside the `d_n` loop.
pub fn build_m1_at_length(n: u32, seq: &TSeq, len: &BigUint) -> Result<WitnessSpec> {
    let lo = seq.cumulative_length(n.saturating_sub(1))?;
    let hi = seq.cumulative_length(n)?;
    if *len < lo || *len > hi {
        return Err(Error::OutOfRange(format!(
            "length {len} outside [{lo}, {hi}] for the d_{n} loop"
        )));
    }
    tseq_loop_machine(n, seq, len, format!("M1(n={n}, len={len})"))
}

/// Largest `|w|` for which `M2` is used.
pub fn m2_max_w(n: u32, seq: &TSeq) -> Result<BigUint> {
    Ok((seq.exponent(n)? - 1u32 + 2u32) << n)
}

/// `M1` followed by an exit chain reading `w`, accepting `T̄_n · w`.
pub fn build_m2(n: u32, w_len: &BigUint, seq: &TSeq) -> Result<WitnessSpec> {
    let max = m2_max_w(n, seq)?;
    if w_len.is_zero() || *w_len > max {
        return Err(Error::OutOfRange(format!("|w| = {w_len} outside [1, {max}]")));
    }
    let target = seq.cumulative_length(n)? + w_len;
    tseq_loop_machine(n, seq, &target, format!("M2(n={n}, w={w_len})"))
}

pub fn quoted_m1(n: u32, seq: &TSeq) -> Result<BigUint> {
    Ok(seq.cumulative_length(n - 1)? + pow2(n as u64) + 1u32)
}

pub fn quoted_m2(n: u32, w_len: &BigUint, seq: &TSeq) -> Result<BigUint> {
    Ok(quoted_m1(n, seq)? + w_len)
}

/// The case of the two-loop construction that applies to `n`.
pub fn case_for(n: u64) -> Option<u8> {
    if n < 2 {
        return None;
    }
    Some(if n.is_power_of_two() {
        1
    } else if (n + 1).is_power_of_two() {
        2
    } else if n.is_multiple_of(2) {
        3
    } else {
        4
    })
}

/// Shape of the two-loop machine for zone pair `(n, n+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseGeometry {
    pub case: u8,
    pub n: u64,
    /// `|C̄_{n-1}| + n`: the chain reading `C̄_{n-1} · 0^n`.
    pub lead: BigUint,
    pub loop1: BigUint,
    pub reps1: BigUint,
    pub link: BigUint,
    pub loop2: BigUint,
    /// Full traversals of the second loop before it stops matching.
    pub reps2_max: BigUint,
}

impl CaseGeometry {
    pub fn new(case: u8, n: u64) -> Result<Self> {
        if case_for(n) != Some(case) {
            return Err(Error::CaseMismatch {
                case,
                n: n as u32,
            });
        }
        let p = |k: u64| pow2(k);
        let f = factorize(n);
        let g = factorize(n + 1);
        let nn = BigUint::from(n);
        let (loop1, reps1, link, loop2, reps2_max) = match case {
            1 => (p(n) - 1u32, nn.clone(), BigUint::from(n + 1), p(n + 1), BigUint::from(n + 1)),
            2 => (p(n), nn.clone(), BigUint::one(), p(n + 1) - 1u32, BigUint::from(n + 1)),
            3 => (
                p(n) * f.t - 1u32,
                p(f.s as u64),
                p(f.s as u64) + 1u32,
                p(n + 1),
                BigUint::from(n + 1),
            ),
            _ => (p(n), nn.clone(), BigUint::one(), p(n + 1) * g.t - 1u32, p(g.s as u64)),
        };
        Ok(Self {
            case,
            n,
            lead: psc::cumulative_length_closed(n - 1) + n,
            loop1,
            reps1,
            link,
            loop2,
            reps2_max,
        })
    }

    /// Start of the second loop, `|C̄_n| + n + 1`.
    pub fn second_loop_start(&self) -> BigUint {
        &self.lead + &self.loop1 * &self.reps1 + &self.link
    }
}

/// The two-loop machine for `C̄_{n+1} · p` with `|p| = p_len`.
pub fn build_case(case: u8, n: u64, p_len: &BigUint) -> Result<WitnessSpec> {
    let zone = psc::zone_length(n + 2);
    if *p_len >= zone {
        return Err(Error::OutOfRange(format!(
            "|p| = {p_len} is not shorter than |C_{}| = {zone}",
            n + 2
        )));
    }
    let target = psc::cumulative_length_closed(n + 1) + p_len;
    build_case_at_length(case, n, &target)
}

/// The two-loop machine for zones `(n, n+1)` accepting the prefix of length
/// `len`, for any `len` at or past the second loop's start.
pub fn build_case_at_length(case: u8, n: u64, len: &BigUint) -> Result<WitnessSpec> {
    let g = CaseGeometry::new(case, n)?;
    let mut l = Layout::new();
    l.chain(g.lead.clone())
        .cycle(g.loop1.clone(), g.reps1.clone())
        .chain(g.link.clone());
    l.finish_in_loop(
        g.loop2.clone(),
        Some(g.reps2_max.clone()),
        len,
        format!("case{case}(n={n}, len={len})"),
        SourceKind::Psc,
    )
}

/// The state-count bound quoted for each case at `C̄_{n+1} · p`.
pub fn quoted_case_bound(case: u8, n: u64, p_len: &BigUint) -> Result<BigUint> {
    let g = CaseGeometry::new(case, n)?;
    let c = psc::cumulative_length_closed(n - 1);
    let (s, t) = (factorize(n), factorize(n + 1));
    let p = |k: u64| pow2(k);
    Ok(match g.case {
        1 => c + 1u32 + 2 * n + p(n) + p(n + 1),
        2 => c + n + p(n) + p(n + 1),
        3 => c + n + p(n) * s.t + p(s.s as u64) + p(n + 1),
        _ => c + n + p(n) + p(n + 1) * t.t,
    } + p_len)
}

/// The four-loop machine for `C̄_65`.
pub fn build_mhat() -> Result<WitnessSpec> {
    let p = |k: u64| pow2(k);
    let mut l = Layout::new();
    l.chain(psc::cumulative_length_closed(61) + 62u32)
        .cycle(p(62) * 31u32 - 1u32, BigUint::from(2u32))
        .chain(BigUint::from(3u32))
        .cycle(p(63) * 21u32, BigUint::from(3u32))
        .chain(p(64))
        .cycle((p(64) - 1u32) * 7u32, BigUint::from(9u32))
        .chain(BigUint::from(65u32));
    l.finish_in_loop(
        p(65) * 5u32,
        None,
        &psc::cumulative_length_closed(65),
        "Mhat".into(),
        SourceKind::Psc,
    )
}

/// `n_1 = |C̄_63| + 2^64 + 2^65 + 128`.
pub fn quoted_n1() -> BigUint {
    psc::cumulative_length_closed(63) + pow2(64) + pow2(65) + 128u32
}

/// `n_2 = |C̄_61| + 31·2^62 + 7·2^63 + 8·2^64 + 5·2^65 + 120`, as printed.
pub fn quoted_n2() -> BigUint {
    psc::cumulative_length_closed(61)
        + pow2(62) * 31u32
        + pow2(63) * 7u32
        + pow2(64) * 8u32
        + pow2(65) * 5u32
        + 120u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tseq::TParams;

    fn nat(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn certify(spec: &WitnessSpec, src: &dyn BitSource) -> MaterialCheck {
        let c = check_materialized(spec, src, DEFAULT_STATE_BUDGET).unwrap();
        assert!(c.accepts_prefix, "{}", spec.name);
        assert_eq!(c.dp_count, BigUint::from(c.solutions), "{}", spec.name);
        assert_eq!(BigUint::from(c.states), spec.state_count());
        c
    }

    #[test]
    fn case_for_examples() {
        let got: Vec<_> = (1..=10).map(case_for).collect();
        assert_eq!(
            got,
            vec![None, Some(1), Some(2), Some(1), Some(4), Some(3), Some(2), Some(1), Some(4), Some(3)]
        );
    }

    #[test]
    fn case_geometry_meets_second_loop() {
        for n in 2..200u64 {
            let g = CaseGeometry::new(case_for(n).unwrap(), n).unwrap();
            assert_eq!(g.second_loop_start(), psc::cumulative_length_closed(n) + n + 1u32, "n={n}");
        }
        assert!(matches!(CaseGeometry::new(3, 8), Err(Error::CaseMismatch { .. })));
    }

    #[test]
    fn case_three_at_six() {
        let psc = Psc::new();
        let spec = build_case(3, 6, &BigUint::zero()).unwrap();
        // First loop: 1·v_6·(d_6)^2·0^5, traversed 2^s = 2 times.
        let l1 = &spec.segments[1];
        assert_eq!(l1.len, nat(191));
        assert_eq!(l1.repeats, nat(2));
        let d6 = psc.debruijn(6).unwrap();
        let mut expect = BitString::from_bits([true]);
        expect.append(&psc.v_tail(6).unwrap());
        expect.append(&d6.repeat(2));
        expect.append(&BitString::zeros(5));
        assert_eq!(psc.bits(&l1.start, 191).unwrap(), expect);
        let eq = acceptance_length_equation(&spec, &spec.target_len).unwrap();
        assert_eq!(eq.solutions, vec![vec![nat(2), nat(7)]]);
        let c = certify(&spec, &psc);
        assert!(c.unique);
        // The accepting path spells C̄_5 · C_6 · C_7.
        let spelled = spell(&spec, &psc, 1 << 20).unwrap();
        let mut x = psc.prefix(psc::cumulative_length_closed(5).try_into().unwrap()).unwrap();
        x.append(&psc.zone(6).unwrap());
        x.append(&psc.zone(7).unwrap());
        assert_eq!(spelled, x);
    }

    #[test]
    fn cases_certify_on_small_zones() {
        let psc = Psc::new();
        for (case, n) in [(1u8, 2u64), (1, 4), (2, 3), (3, 6), (4, 5), (2, 7)] {
            let zone = to_u64(&psc::zone_length(n + 2)).unwrap();
            for p in [0, 1, n, n + 1, n + 2, 2 * n + 3, zone / 3, zone - 1] {
                let spec = build_case(case, n, &nat(p)).unwrap();
                let c = certify(&spec, &psc);
                assert!(spec.state_count() <= quoted_case_bound(case, n, &nat(p)).unwrap());
                if n > 2 {
                    assert!(c.unique, "{} p={p}", spec.name);
                }
                let spelled = spell(&spec, &psc, 1 << 20).unwrap();
                assert_eq!(spelled, psc.prefix(spelled.len() as u64).unwrap());
            }
        }
    }

    #[test]
    fn case_two_bound_is_exact() {
        for n in [3u64, 7, 15, 31, 63, 127] {
            for p in [0u64, 1, 100] {
                let spec = build_case(2, n, &nat(p)).unwrap();
                assert_eq!(spec.state_count(), quoted_case_bound(2, n, &nat(p)).unwrap());
            }
        }
    }

    #[test]
    fn case_counts_within_bounds_to_200() {
        for n in 2..=200u64 {
            let case = case_for(n).unwrap();
            for p in [BigUint::zero(), nat(n + 1), psc::zone_length(n + 2) - 1u32] {
                let spec = build_case(case, n, &p).unwrap();
                assert!(spec.state_count() <= quoted_case_bound(case, n, &p).unwrap(), "n={n}");
            }
        }
    }

    #[test]
    fn m1_m2_scaled() {
        let seq = TSeq::new(TParams::scaled());
        assert_eq!(build_m1(2, &seq).unwrap().state_count(), nat(2 + 4 + 1));
        for n in 1..=3 {
            let spec = build_m1(n, &seq).unwrap();
            assert_eq!(spec.state_count(), quoted_m1(n, &seq).unwrap());
            let c = certify(&spec, &seq);
            assert!(c.unique);
            let max = to_u64(&m2_max_w(n, &seq).unwrap()).unwrap();
            for w in [1, 2, max / 2, max] {
                let spec = build_m2(n, &nat(w), &seq).unwrap();
                assert_eq!(spec.state_count(), quoted_m2(n, &nat(w), &seq).unwrap());
                if n >= 2 {
                    assert!(certify(&spec, &seq).unique, "{}", spec.name);
                }
            }
            assert!(build_m2(n, &BigUint::zero(), &seq).is_err());
            assert!(build_m2(n, &nat(max + 1), &seq).is_err());
        }
    }

    #[test]
    fn m1_exact_counts() {
        let seq = TSeq::new(TParams::exact());
        assert_eq!(build_m1(2, &seq).unwrap().state_count(), nat(4 + 4 + 1));
        let m = build_m1(3, &seq).unwrap();
        assert_eq!(m.state_count(), quoted_m1(3, &seq).unwrap());
        let eq = acceptance_length_equation(&m, &m.target_len).unwrap();
        assert_eq!(eq.solutions, vec![vec![seq.exponent(3).unwrap()]]);
        assert!(build_m1(4, &seq).is_err());
    }

    #[test]
    fn determinism_violation_is_reported() {
        // A loop and its exit chain both starting with 0.
        struct Zeros;
        impl BitSource for Zeros {
            fn bits(&self, _: &BigUint, len: u64) -> Result<BitString> {
                Ok(BitString::zeros(len as usize))
            }
        }
        let mut l = Layout::new();
        l.chain(nat(2));
        let spec = l
            .finish_in_loop(nat(3), Some(nat(1)), &nat(9), "bad".into(), SourceKind::Psc)
            .unwrap();
        assert!(matches!(
            materialize(&spec, &Zeros, 100),
            Err(Error::Nondeterministic { .. })
        ));
    }

    #[test]
    fn single_loop_equation() {
        let mut l = Layout::new();
        l.chain(nat(5));
        let spec = l
            .finish_in_loop(nat(100), None, &nat(37), "one".into(), SourceKind::Psc)
            .unwrap();
        let eq = acceptance_length_equation(&spec, &spec.target_len).unwrap();
        assert_eq!(eq.solutions, vec![vec![nat(1)]]);
    }

    #[test]
    fn mhat_arithmetic() {
        let m = build_mhat().unwrap();
        let target = psc::cumulative_length_closed(65);
        let eq = acceptance_length_equation(&m, &target).unwrap();
        assert_eq!(eq.solutions, vec![vec![nat(2), nat(3), nat(9), nat(13)]]);
        assert_eq!(eq.constant, BigInt::from(psc::cumulative_length_closed(61) + pow2(64) + 65u32));
        let pos = acceptance_length_equation_with(&m, &target, BoundRegime::Positive).unwrap();
        assert_eq!(pos.solutions, eq.solutions);
        assert_eq!(m.intended_solution(), eq.solutions[0]);
        // The loop on zone 63 has 21·2^63 states, so the count exceeds the
        // printed total by 14·2^63.
        assert_eq!(m.state_count(), quoted_n2() + pow2(63) * 14u32);
        assert!(quoted_n2() < quoted_n1());
        assert!(m.state_count() < quoted_n1());
        assert!(m.state_count() * 4u32 < target);
    }

    #[test]
    fn case_one_at_64_matches_n1() {
        let spec = build_case(1, 64, &BigUint::zero()).unwrap();
        assert_eq!(spec.state_count(), quoted_n1());
        let eq = acceptance_length_equation(&spec, &spec.target_len).unwrap();
        assert_eq!(eq.solutions, vec![vec![nat(64), nat(65)]]);
    }

    #[test]
    fn json_round_trip() {
        let m = build_mhat().unwrap();
        let j = serde_json::to_string(&m).unwrap();
        assert!(j.contains(r#""sequence":"psc""#));
        let back: WitnessSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(back, m);
    }
}
