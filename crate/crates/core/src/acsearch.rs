//! Exact automatic complexity by canonical search, an exhaustive oracle, and
//! the power-freeness lower bound.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::automata::Dfa;
use crate::error::{Error, Result};
use crate::words::{is_k_power_free, BitString};

/// Longest string [`exact_a`] accepts by default.
pub const DEFAULT_SEARCH_CAP: usize = 18;
/// Longest string the exhaustive oracle accepts.
pub const BRUTE_LEN_CAP: usize = 10;
/// Default largest machine the exhaustive oracle tries.
pub const BRUTE_DEFAULT_STATES: usize = 4;
/// Largest machine the exhaustive oracle will ever try.
pub const BRUTE_STATE_CAP: usize = 6;

/// `A(x)` together with a machine of that size uniquely accepting `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityResult {
    pub value: usize,
    pub witness: Dfa,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub max_len: usize,
    pub max_states: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            max_len: DEFAULT_SEARCH_CAP,
            max_states: None,
        }
    }
}

/// The least number of states of a total DFA uniquely accepting `x`.
pub fn exact_a(x: &BitString) -> Result<ComplexityResult> {
    exact_a_with(x, SearchOptions::default())
}

pub fn exact_a_with(x: &BitString, opts: SearchOptions) -> Result<ComplexityResult> {
    let len = x.len();
    if len > opts.max_len {
        return Err(Error::SearchCapExceeded {
            len,
            cap: opts.max_len,
        });
    }
    let bits: Vec<u8> = x.iter().map(u8::from).collect();
    let ceiling = opts.max_states.unwrap_or(len + 2).min(len + 2);
    for q in 1..=ceiling {
        let mut s = Search::new(&bits, q);
        if let Some(m) = s.walk(0, 0) {
            debug_assert!(m.uniquely_accepts(x));
            return Ok(ComplexityResult {
                value: m.state_count(),
                witness: m,
            });
        }
    }
    Err(Error::NoWitness(ceiling))
}

const NONE: u8 = u8::MAX;

struct Search<'a> {
    x: &'a [u8],
    q: usize,
    delta: Vec<[u8; 2]>,
    walk: Vec<u8>,
    used: usize,
}

impl<'a> Search<'a> {
    fn new(x: &'a [u8], q: usize) -> Self {
        let mut walk = Vec::with_capacity(x.len() + 1);
        walk.push(0);
        Self {
            x,
            q,
            delta: vec![[NONE; 2]; q],
            walk,
            used: 1,
        }
    }

    /// Number of length-`k` paths from state 0 to `target` over assigned edges,
    /// saturated at 2.
    fn paths(&self, k: usize, target: usize) -> u8 {
        let mut cur = vec![0u8; self.used];
        let mut nxt = vec![0u8; self.used];
        cur[0] = 1;
        for _ in 0..k {
            nxt.iter_mut().for_each(|c| *c = 0);
            for (s, &c) in cur.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for &t in &self.delta[s] {
                    if t != NONE {
                        let t = t as usize;
                        nxt[t] = (nxt[t] + c).min(2);
                    }
                }
            }
            std::mem::swap(&mut cur, &mut nxt);
        }
        cur[target]
    }

    /// Extends the walk from position `i` (currently at `s`).
    fn walk(&mut self, i: usize, s: usize) -> Option<Dfa> {
        if i == self.x.len() {
            return self.complete();
        }
        let b = self.x[i] as usize;
        let t = self.delta[s][b];
        if t != NONE {
            self.walk.push(t);
            let r = self.walk(i + 1, t as usize);
            self.walk.pop();
            return r;
        }
        let fresh = (self.used < self.q).then_some(self.used);
        for t in (0..self.used).chain(fresh) {
            let opened = t == self.used;
            if opened {
                self.used += 1;
            }
            self.delta[s][b] = t as u8;
            let r = if self.paths(i + 1, t) > 1 {
                None
            } else {
                self.walk.push(t as u8);
                let r = self.walk(i + 1, t);
                self.walk.pop();
                r
            };
            self.delta[s][b] = NONE;
            if opened {
                self.used -= 1;
            }
            if r.is_some() {
                return r;
            }
        }
        None
    }

    fn accept_state(&self) -> usize {
        *self.walk.last().expect("walk is never empty") as usize
    }

    fn complete(&mut self) -> Option<Dfa> {
        let len = self.x.len();
        let f = self.accept_state();
        if self.used < self.q {
            // Unassigned transitions fall into a fresh dead state.
            if self.paths(len, f) != 1 {
                return None;
            }
            let dead = self.used;
            let mut delta: Vec<[usize; 2]> = self.delta[..self.used]
                .iter()
                .map(|row| row.map(|t| if t == NONE { dead } else { t as usize }))
                .collect();
            if delta.iter().all(|row| row.iter().all(|&t| t != dead)) {
                return None;
            }
            delta.push([dead, dead]);
            return Some(Dfa::new(delta, 0, [f]).expect("search builds valid machines"));
        }
        self.fill(f)
    }

    /// Completes the table with targets among existing states, branching only
    /// on pairs whose source is reachable within `|x| - 1` steps.
    fn fill(&mut self, f: usize) -> Option<Dfa> {
        let len = self.x.len();
        if self.paths(len, f) > 1 {
            return None;
        }
        match self.open_pair(len) {
            None => {
                let delta = self
                    .delta
                    .iter()
                    .map(|row| row.map(|t| if t == NONE { 0 } else { t as usize }))
                    .collect();
                Some(Dfa::new(delta, 0, [f]).expect("search builds valid machines"))
            }
            Some((s, b)) => {
                for t in 0..self.q {
                    self.delta[s][b] = t as u8;
                    let r = self.fill(f);
                    self.delta[s][b] = NONE;
                    if r.is_some() {
                        return r;
                    }
                }
                None
            }
        }
    }

    /// The first unassigned pair whose state is within `len - 1` steps of 0.
    fn open_pair(&self, len: usize) -> Option<(usize, usize)> {
        if len == 0 {
            return None;
        }
        let mut dist = vec![usize::MAX; self.q];
        dist[0] = 0;
        let mut frontier = vec![0usize];
        for d in 0..len {
            let mut next = Vec::new();
            for &s in &frontier {
                for b in 0..2 {
                    let t = self.delta[s][b];
                    if t == NONE {
                        return Some((s, b));
                    }
                    let t = t as usize;
                    if dist[t] == usize::MAX {
                        dist[t] = d + 1;
                        next.push(t);
                    }
                }
            }
            frontier = next;
        }
        None
    }
}

/// `A(x)` by exhaustive enumeration of all machines with at most `max_states`
/// states. Returns `Ok(None)` when no machine that small exists.
///
/// Every transition table with start state 0 is tried against every accept
/// set, in order of table index then accept mask.
pub fn brute_a(x: &BitString, max_states: usize) -> Result<Option<ComplexityResult>> {
    if x.len() > BRUTE_LEN_CAP {
        return Err(Error::SearchCapExceeded {
            len: x.len(),
            cap: BRUTE_LEN_CAP,
        });
    }
    if max_states > BRUTE_STATE_CAP {
        return Err(Error::BudgetExceeded {
            what: "oracle states",
            requested: max_states.to_string(),
            budget: BRUTE_STATE_CAP as u64,
        });
    }
    let bits: Vec<usize> = x.iter().map(usize::from).collect();
    for q in 1..=max_states {
        let mut delta = vec![[0usize; 2]; q];
        let tables = (q as u64).pow(2 * q as u32);
        for index in 0..tables {
            decode_table(index, q, &mut delta);
            let counts = saturating_counts(&delta, bits.len());
            let end = bits.iter().fold(0, |s, &b| delta[s][b]);
            for mask in 1u32..(1 << q) {
                if mask & (1 << end) == 0 {
                    continue;
                }
                let total: u32 = (0..q)
                    .filter(|&s| mask & (1 << s) != 0)
                    .map(|s| counts[s] as u32)
                    .sum();
                if total == 1 {
                    let accept = (0..q).filter(|&s| mask & (1 << s) != 0);
                    let witness = Dfa::new(delta.clone(), 0, accept.collect::<Vec<_>>())?;
                    return Ok(Some(ComplexityResult { value: q, witness }));
                }
            }
        }
    }
    Ok(None)
}

fn decode_table(mut index: u64, q: usize, delta: &mut [[usize; 2]]) {
    for row in delta.iter_mut() {
        for t in row.iter_mut() {
            *t = (index % q as u64) as usize;
            index /= q as u64;
        }
    }
}

fn saturating_counts(delta: &[[usize; 2]], len: usize) -> Vec<u8> {
    let q = delta.len();
    let mut cur = vec![0u8; q];
    cur[0] = 1;
    for _ in 0..len {
        let mut nxt = vec![0u8; q];
        for (s, &c) in cur.iter().enumerate() {
            if c > 0 {
                for &t in &delta[s] {
                    nxt[t] = (nxt[t] + c).min(2);
                }
            }
        }
        cur = nxt;
    }
    cur
}

/// `A(x)` for every string of length at most `max_len`, from one sweep over
/// all machines with at most `max_states` states.
///
/// A machine and an accept set `F` uniquely accept a string of length `k`
/// exactly when one state of `F` is reached by a single length-`k` string and
/// the others by none, so tracking, per state, whether exactly one string
/// reaches it (and which) covers every accept set at once. Machines are
/// enumerated up to relabeling: every state reachable from the start,
/// numbered in breadth-first order. Machines with unreachable states behave
/// like smaller ones, which earlier rounds already covered.
#[derive(Clone, Debug)]
pub struct BruteTable {
    max_len: usize,
    /// Indexed by `(1 << k) - 1 + value(x)`.
    entries: Vec<Option<(usize, u64, usize)>>,
}

impl BruteTable {
    pub fn build(max_len: usize, max_states: usize) -> Result<Self> {
        if max_len > BRUTE_LEN_CAP || max_states > BRUTE_STATE_CAP {
            return Err(Error::BudgetExceeded {
                what: "oracle sweep",
                requested: format!("length {max_len}, {max_states} states"),
                budget: BRUTE_LEN_CAP as u64,
            });
        }
        let size = (1usize << (max_len + 1)) - 1;
        let mut entries: Vec<Option<(usize, u64, usize)>> = vec![None; size];
        let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
        for q in 1..=max_states {
            let tables = connected_tables(q);
            let chunk = tables.len().div_ceil(threads).max(1);
            let partials: Vec<Vec<Option<(u64, usize)>>> = std::thread::scope(|sc| {
                let handles: Vec<_> = tables
                    .chunks(chunk)
                    .map(|part| sc.spawn(move || sweep(q, max_len, part)))
                    .collect();
                handles.into_iter().map(|h| h.join().unwrap()).collect()
            });
            for (i, e) in entries.iter_mut().enumerate() {
                if e.is_some() {
                    continue;
                }
                // Chunks are in enumeration order, so the first hit wins.
                if let Some(&(table, state)) = partials.iter().find_map(|p| p[i].as_ref()) {
                    *e = Some((q, table, state));
                }
            }
            if entries.iter().all(Option::is_some) {
                break;
            }
        }
        Ok(Self { max_len, entries })
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    fn slot(x: &BitString) -> usize {
        (1usize << x.len()) - 1 + x.window_value(0, x.len()) as usize
    }

    /// The oracle's value for `x`, or `None` when it exceeds the sweep bound.
    pub fn value(&self, x: &BitString) -> Option<usize> {
        assert!(x.len() <= self.max_len);
        self.entries[Self::slot(x)].map(|(q, _, _)| q)
    }

    pub fn result(&self, x: &BitString) -> Option<ComplexityResult> {
        assert!(x.len() <= self.max_len);
        let (q, table, state) = self.entries[Self::slot(x)]?;
        let mut delta = vec![[0usize; 2]; q];
        decode_table(table, q, &mut delta);
        let witness = Dfa::new(delta, 0, [state]).expect("decoded tables are valid");
        Some(ComplexityResult { value: q, witness })
    }
}

/// Every `q`-state table in which all states are reachable from 0 and are
/// numbered in breadth-first discovery order, encoded as for [`decode_table`].
pub fn connected_tables(q: usize) -> Vec<u64> {
    fn go(q: usize, pos: usize, created: usize, acc: u64, scale: u64, out: &mut Vec<u64>) {
        if pos == 2 * q {
            if created == q {
                out.push(acc);
            }
            return;
        }
        if pos / 2 >= created {
            return;
        }
        for t in 0..created {
            go(q, pos + 1, created, acc + t as u64 * scale, scale * q as u64, out);
        }
        if created < q {
            go(q, pos + 1, created + 1, acc + created as u64 * scale, scale * q as u64, out);
        }
    }
    let mut out = Vec::new();
    go(q, 0, 1, 0, 1, &mut out);
    out
}

fn sweep(q: usize, max_len: usize, tables: &[u64]) -> Vec<Option<(u64, usize)>> {
    let mut found: Vec<Option<(u64, usize)>> = vec![None; (1usize << (max_len + 1)) - 1];
    let mut delta = vec![[0usize; 2]; q];
    let mut cnt = vec![0u8; q];
    let mut rep = vec![0u64; q];
    let mut ncnt = vec![0u8; q];
    let mut nrep = vec![0u64; q];
    for &index in tables {
        decode_table(index, q, &mut delta);
        cnt.iter_mut().for_each(|c| *c = 0);
        cnt[0] = 1;
        rep[0] = 0;
        for k in 0..=max_len {
            let base = (1usize << k) - 1;
            for s in 0..q {
                if cnt[s] == 1 {
                    let slot = &mut found[base + rep[s] as usize];
                    if slot.is_none() {
                        *slot = Some((index, s));
                    }
                }
            }
            if k == max_len {
                break;
            }
            ncnt.iter_mut().for_each(|c| *c = 0);
            for s in 0..q {
                if cnt[s] == 0 {
                    continue;
                }
                for (b, &t) in delta[s].iter().enumerate() {
                    ncnt[t] = (ncnt[t] + cnt[s]).min(2);
                    nrep[t] = (rep[s] << 1) | b as u64;
                }
            }
            std::mem::swap(&mut cnt, &mut ncnt);
            std::mem::swap(&mut rep, &mut nrep);
        }
    }
    found
}

/// `(|x| + 1) / k` when `x` has no `k`-th power factor, in which case it bounds
/// `A(x)` from below.
pub fn powerfree_lower_bound(x: &BitString, k: usize) -> Option<BigRational> {
    if k < 2 || !is_k_power_free(x, k) {
        return None;
    }
    Some(BigRational::new(
        BigInt::from(x.len() + 1),
        BigInt::from(k),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn all_strings(max_len: usize) -> impl Iterator<Item = BitString> {
        (0..=max_len).flat_map(|k| (0..1u64 << k).map(move |v| BitString::from_value(v, k)))
    }

    #[test]
    fn exact_examples() {
        let r = exact_a(&BitString::new()).unwrap();
        assert_eq!(r.value, 1);
        assert!(r.witness.uniquely_accepts(&BitString::new()));
        for n in 1..=10 {
            assert_eq!(exact_a(&BitString::zeros(n)).unwrap().value, 2);
            assert_eq!(exact_a(&BitString::ones(n)).unwrap().value, 2);
        }
        assert_eq!(exact_a(&bs("0")).unwrap().value, 2);
        assert!(matches!(
            exact_a(&BitString::zeros(19)),
            Err(Error::SearchCapExceeded { len: 19, cap: 18 })
        ));
        let capped = SearchOptions {
            max_len: 18,
            max_states: Some(2),
        };
        assert!(matches!(exact_a_with(&bs("0110"), capped), Err(Error::NoWitness(2))));
    }

    #[test]
    fn exact_matches_brute_on_0011() {
        let e = exact_a(&bs("0011")).unwrap();
        let b = brute_a(&bs("0011"), 5).unwrap().unwrap();
        assert_eq!(e.value, b.value);
        assert_eq!(e.value, 3);
        assert!(b.witness.uniquely_accepts(&bs("0011")));
    }

    #[test]
    fn brute_examples() {
        assert_eq!(brute_a(&bs("0"), 4).unwrap().unwrap().value, 2);
        assert_eq!(brute_a(&BitString::zeros(5), 4).unwrap().unwrap().value, 2);
        assert!(brute_a(&BitString::zeros(11), 2).is_err());
        assert!(brute_a(&bs("01"), 7).is_err());
    }

    #[test]
    fn brute_table_agrees_with_single_oracle() {
        let t = BruteTable::build(6, 4).unwrap();
        for x in all_strings(6) {
            let single = brute_a(&x, 4).unwrap();
            assert_eq!(t.value(&x), single.as_ref().map(|r| r.value), "{x}");
            if let Some(r) = t.result(&x) {
                assert!(r.witness.uniquely_accepts(&x));
                assert_eq!(r.witness.state_count(), r.value);
            }
        }
    }

    #[test]
    fn connected_table_counts() {
        // Initially connected binary DFAs up to isomorphism, without accept sets.
        let counts: Vec<usize> = (1..=4).map(|q| connected_tables(q).len()).collect();
        assert_eq!(counts, vec![1, 12, 216, 5248]);
    }

    #[test]
    fn exact_matches_oracle_up_to_six() {
        let t = BruteTable::build(6, 5).unwrap();
        for x in all_strings(6) {
            let e = exact_a(&x).unwrap();
            assert_eq!(Some(e.value), t.value(&x), "{x}");
            assert_eq!(e.witness.state_count(), e.value);
            assert!(e.witness.uniquely_accepts(&x));
            assert!(e.value <= x.len() + 2);
        }
    }

    #[test]
    fn oracle_witnesses_survive_accept_shrinking() {
        for x in all_strings(5) {
            let r = brute_a(&x, 4).unwrap().unwrap();
            let shrunk = r.witness.with_accept([r.witness.run(&x)]).unwrap();
            assert!(shrunk.uniquely_accepts(&x));
        }
    }

    #[test]
    fn powerfree_examples() {
        assert_eq!(
            powerfree_lower_bound(&bs("010"), 2),
            Some(BigRational::from_integer(BigInt::from(2)))
        );
        assert_eq!(powerfree_lower_bound(&bs("0011"), 2), None);
        assert_eq!(powerfree_lower_bound(&bs("0011"), 1), None);
        assert_eq!(
            powerfree_lower_bound(&bs("0011"), 3),
            Some(BigRational::new(BigInt::from(5), BigInt::from(3)))
        );
    }

    #[test]
    fn powerfree_bound_holds() {
        for x in all_strings(8) {
            if let Some(lb) = powerfree_lower_bound(&x, 2) {
                let a = exact_a(&x).unwrap().value;
                assert!(BigRational::from_integer(BigInt::from(a)) >= lb, "{x}");
            }
        }
    }

    #[test]
    fn random_longer_strings_within_bound() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let n = rng.gen_range(9..=12);
            let x = BitString::from_bits((0..n).map(|_| rng.gen::<bool>()));
            let r = exact_a(&x).unwrap();
            assert!(r.witness.uniquely_accepts(&x));
            assert!(r.value <= n / 2 + 2);
        }
    }
}
