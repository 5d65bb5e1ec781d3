//! Total deterministic binary automata and exact acceptance counting.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::PathCount;
use crate::words::BitString;

/// A total DFA over `{0, 1}`.
///
/// States are `0..state_count()`. Every state has a transition on both bits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DfaJson", into = "DfaJson")]
pub struct Dfa {
    delta: Vec<[usize; 2]>,
    start: usize,
    accept: Vec<bool>,
}

/// Interchange shape: `{states, start, accept: [...], delta: [[t0, t1], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DfaJson {
    pub states: usize,
    pub start: usize,
    pub accept: Vec<usize>,
    pub delta: Vec<[usize; 2]>,
}

impl TryFrom<DfaJson> for Dfa {
    type Error = Error;

    fn try_from(j: DfaJson) -> Result<Self> {
        if j.delta.len() != j.states {
            return Err(Error::InvalidDfa(format!(
                "{} transition rows for {} states",
                j.delta.len(),
                j.states
            )));
        }
        Dfa::new(j.delta, j.start, j.accept)
    }
}

impl From<Dfa> for DfaJson {
    fn from(m: Dfa) -> Self {
        DfaJson {
            states: m.state_count(),
            start: m.start,
            accept: m.accept_states().collect(),
            delta: m.delta,
        }
    }
}

impl Dfa {
    pub fn new<I: IntoIterator<Item = usize>>(
        delta: Vec<[usize; 2]>,
        start: usize,
        accept: I,
    ) -> Result<Self> {
        let q = delta.len();
        if q == 0 {
            return Err(Error::InvalidDfa("no states".into()));
        }
        if start >= q {
            return Err(Error::InvalidDfa(format!("start state {start} out of range")));
        }
        if let Some((s, t)) = delta
            .iter()
            .enumerate()
            .find_map(|(s, row)| row.iter().find(|&&t| t >= q).map(|&t| (s, t)))
        {
            return Err(Error::InvalidDfa(format!(
                "transition from {s} targets {t}, only {q} states"
            )));
        }
        let mut acc = vec![false; q];
        for f in accept {
            if f >= q {
                return Err(Error::InvalidDfa(format!("accept state {f} out of range")));
            }
            acc[f] = true;
        }
        Ok(Self {
            delta,
            start,
            accept: acc,
        })
    }

    pub fn state_count(&self) -> usize {
        self.delta.len()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    #[inline]
    pub fn next(&self, state: usize, bit: bool) -> usize {
        self.delta[state][bit as usize]
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accept[state]
    }

    pub fn accept_states(&self) -> impl Iterator<Item = usize> + '_ {
        self.accept
            .iter()
            .enumerate()
            .filter_map(|(i, &a)| a.then_some(i))
    }

    pub fn transitions(&self) -> &[[usize; 2]] {
        &self.delta
    }

    /// The same transition structure with a different accept set.
    pub fn with_accept<I: IntoIterator<Item = usize>>(&self, accept: I) -> Result<Self> {
        Dfa::new(self.delta.clone(), self.start, accept)
    }

    /// The state reached from the start after reading `x`.
    pub fn run(&self, x: &BitString) -> usize {
        x.iter().fold(self.start, |s, b| self.next(s, b))
    }

    pub fn accepts(&self, x: &BitString) -> bool {
        self.is_accepting(self.run(x))
    }

    /// For each state, the number of length-`n` strings leading to it.
    pub fn count_vector_as<C: PathCount>(&self, n: usize) -> Option<Vec<C>> {
        let q = self.state_count();
        let mut cur = vec![C::zero(); q];
        cur[self.start] = C::one();
        for _ in 0..n {
            let mut nxt = vec![C::zero(); q];
            for (s, c) in cur.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for t in self.delta[s] {
                    nxt[t] = nxt[t].checked_add(c)?;
                }
            }
            cur = nxt;
        }
        Some(cur)
    }

    pub fn count_vector(&self, n: usize) -> Vec<BigUint> {
        self.count_vector_as(n).expect("big integers do not overflow")
    }

    /// `|L(M) ∩ {0,1}^n|` in the counter type `C`, or `None` on overflow.
    pub fn count_accepted_as<C: PathCount>(&self, n: usize) -> Option<C> {
        let v = self.count_vector_as::<C>(n)?;
        v.iter()
            .zip(&self.accept)
            .filter(|(_, &a)| a)
            .try_fold(C::zero(), |acc, (c, _)| acc.checked_add(c))
    }

    /// `|L(M) ∩ {0,1}^n|`, exactly.
    pub fn count_accepted(&self, n: usize) -> BigUint {
        self.count_accepted_as(n).expect("big integers do not overflow")
    }

    /// True iff `x` is the only string of its length that the machine accepts.
    pub fn uniquely_accepts(&self, x: &BitString) -> bool {
        self.accepts(x) && self.count_accepted(x.len()) == BigUint::from(1u32)
    }

    /// States reachable from the start.
    pub fn reachable(&self) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([self.start]);
        let mut stack = vec![self.start];
        while let Some(s) = stack.pop() {
            for t in self.delta[s] {
                if seen.insert(t) {
                    stack.push(t);
                }
            }
        }
        seen
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("dfa serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidDfa(e.to_string()))
    }
}

/// The machine accepting exactly `0^n` among length-`n` strings: state 0
/// loops on `0` and `1` leads to an absorbing dead state.
pub fn zero_loop_machine() -> Dfa {
    Dfa::new(vec![[0, 1], [1, 1]], 0, [0]).unwrap()
}

/// The one-state machine accepting everything.
pub fn universal_machine() -> Dfa {
    Dfa::new(vec![[0, 0]], 0, [0]).unwrap()
}

/// A chain of `|x| + 1` states spelling `x`, plus a dead state.
pub fn chain_machine(x: &BitString) -> Dfa {
    let dead = x.len() + 1;
    let mut delta = vec![[dead, dead]; x.len() + 2];
    for (i, b) in x.iter().enumerate() {
        delta[i][b as usize] = i + 1;
    }
    Dfa::new(delta, 0, [x.len()]).unwrap()
}

/// A chain of `|x| + 1` states spelling `x` whose other edges return to the
/// start. The last state is reachable only by reading all of `x` from the
/// start, so no dead state is needed.
pub fn restart_chain_machine(x: &BitString) -> Dfa {
    let mut delta = vec![[0, 0]; x.len() + 1];
    for (i, b) in x.iter().enumerate() {
        delta[i][b as usize] = i + 1;
    }
    Dfa::new(delta, 0, [x.len()]).unwrap()
}

/// Reads `x[..start]` along a chain, then loops on the next `period` bits,
/// accepting where `x` ends. Needs `x[start..]` to have period `period`.
/// The loop count is fixed by the length, so `x` is the only string of its
/// length accepted.
pub fn chain_loop_machine(x: &BitString, start: usize, period: usize) -> Result<Dfa> {
    let len = x.len();
    if period == 0 || start + period > len {
        return Err(Error::OutOfRange(format!(
            "loop of length {period} at {start} does not fit in {len} bits"
        )));
    }
    if (start..len - period).any(|j| x.bit(j) != x.bit(j + period)) {
        return Err(Error::Invalid(format!(
            "x[{start}..] does not have period {period}"
        )));
    }
    let dead = start + period;
    let mut delta = vec![[dead, dead]; dead + 1];
    for i in 0..start {
        delta[i][x.bit(i) as usize] = i + 1;
    }
    for k in 0..period {
        let next = if k + 1 == period { start } else { start + k + 1 };
        delta[start + k][x.bit(start + k) as usize] = next;
    }
    let accept = start + (len - start) % period;
    Dfa::new(delta, 0, [accept])
}
