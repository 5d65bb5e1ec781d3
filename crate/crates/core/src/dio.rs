//! Linear Diophantine equations: two-variable solution families and bounded
//! non-negative enumeration for the loop-count equations of witness automata.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{decimal, DioInt};

/// Default cap on search nodes visited by [`enumerate_nonneg`].
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

/// All integer solutions of `a·x + b·y = c`, as `base + d·step` for `d ∈ ℤ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoVarFamily<I> {
    pub base: (I, I),
    pub step: (I, I),
    pub gcd: I,
}

impl<I: DioInt> TwoVarFamily<I> {
    pub fn at(&self, d: &I) -> (I, I) {
        (
            self.base.0.clone() + self.step.0.clone() * d.clone(),
            self.base.1.clone() + self.step.1.clone() * d.clone(),
        )
    }

    /// True when the step components have opposite signs, so at most one
    /// member of the family can have both coordinates non-negative.
    pub fn step_has_opposite_signs(&self) -> bool {
        self.step.0.signum() * self.step.1.signum() < I::zero()
    }

    /// Every member with both coordinates non-negative, or `None` when there
    /// are infinitely many.
    pub fn nonneg_members(&self) -> Option<Vec<(I, I)>> {
        if !self.step_has_opposite_signs() {
            return None;
        }
        // Orient so that x grows with d and y shrinks.
        let (sx, sy, flip) = if self.step.0.is_positive() {
            (self.step.0.clone(), -self.step.1.clone(), false)
        } else {
            (-self.step.0.clone(), self.step.1.clone(), true)
        };
        let (x0, y0) = &self.base;
        let lo = (-x0.clone()).div_ceil(&sx);
        let hi = y0.div_floor(&sy);
        let mut out = Vec::new();
        let mut d = lo;
        while d <= hi {
            out.push((x0.clone() + sx.clone() * d.clone(), y0.clone() - sy.clone() * d.clone()));
            d = d + I::one();
        }
        if flip {
            out.reverse();
        }
        Some(out)
    }
}

/// Solves `a·x + b·y = c` over the integers.
///
/// Returns `Ok(None)` when `gcd(a, b)` does not divide `c`.
pub fn solve_two<I: DioInt>(a: &I, b: &I, c: &I) -> Result<Option<TwoVarFamily<I>>> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::Invalid("a and b are both zero".into()));
    }
    let eg = a.extended_gcd(b);
    let (mut g, mut x, mut y) = (eg.gcd, eg.x, eg.y);
    if g.is_negative() {
        g = -g;
        x = -x;
        y = -y;
    }
    if !c.is_multiple_of(&g) {
        return Ok(None);
    }
    let k = c.clone() / g.clone();
    Ok(Some(TwoVarFamily {
        base: (x * k.clone(), y * k),
        step: (b.clone() / g.clone(), -(a.clone() / g.clone())),
        gcd: g,
    }))
}

/// An exhaustive solution list for
/// `constant + Σ coefficients[i]·v[i] = target` with `v[i] ≥ bounds[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DioCertificate {
    #[serde(with = "decimal::vec")]
    pub coefficients: Vec<BigUint>,
    #[serde(with = "decimal")]
    pub constant: BigInt,
    #[serde(with = "decimal")]
    pub target: BigInt,
    #[serde(with = "decimal::vec")]
    pub bounds: Vec<BigUint>,
    #[serde(with = "decimal::vec2")]
    pub solutions: Vec<Vec<BigUint>>,
}

impl DioCertificate {
    pub fn is_unique(&self) -> bool {
        self.solutions.len() == 1
    }

    /// Re-checks every listed solution against the equation and bounds.
    pub fn check(&self) -> bool {
        self.solutions.iter().all(|v| {
            v.len() == self.coefficients.len()
                && v.iter().zip(&self.bounds).all(|(x, b)| x >= b)
                && self.constant.clone()
                    + BigInt::from(
                        v.iter()
                            .zip(&self.coefficients)
                            .map(|(x, c)| x * c)
                            .sum::<BigUint>(),
                    )
                    == self.target
        })
    }
}

/// Enumerates every solution in lexicographic order.
pub fn enumerate_nonneg(
    coefficients: &[BigUint],
    constant: &BigInt,
    target: &BigInt,
    bounds: &[BigUint],
) -> Result<DioCertificate> {
    enumerate_nonneg_with_budget(coefficients, constant, target, bounds, DEFAULT_NODE_BUDGET)
}

pub fn enumerate_nonneg_with_budget(
    coefficients: &[BigUint],
    constant: &BigInt,
    target: &BigInt,
    bounds: &[BigUint],
    node_budget: u64,
) -> Result<DioCertificate> {
    if let Some(i) = coefficients.iter().position(Zero::is_zero) {
        return Err(Error::NonPositiveCoefficient(i));
    }
    if bounds.len() != coefficients.len() {
        return Err(Error::Invalid(format!(
            "{} bounds for {} variables",
            bounds.len(),
            coefficients.len()
        )));
    }
    let mut cert = DioCertificate {
        coefficients: coefficients.to_vec(),
        constant: constant.clone(),
        target: target.clone(),
        bounds: bounds.to_vec(),
        solutions: Vec::new(),
    };
    let floor: BigUint = coefficients.iter().zip(bounds).map(|(c, b)| c * b).sum();
    let slack = target - constant - BigInt::from(floor);
    let Some(slack) = slack.to_biguint() else {
        return Ok(cert);
    };
    if coefficients.is_empty() {
        if slack.is_zero() {
            cert.solutions.push(Vec::new());
        }
        return Ok(cert);
    }
    let mut nodes = 0u64;
    let mut partial = Vec::with_capacity(coefficients.len());
    descend(
        coefficients,
        &slack,
        &mut partial,
        &mut cert.solutions,
        &mut nodes,
        node_budget,
    )?;
    for v in &mut cert.solutions {
        for (x, b) in v.iter_mut().zip(bounds) {
            *x += b;
        }
    }
    Ok(cert)
}

fn descend(
    coeffs: &[BigUint],
    rem: &BigUint,
    partial: &mut Vec<BigUint>,
    out: &mut Vec<Vec<BigUint>>,
    nodes: &mut u64,
    budget: u64,
) -> Result<()> {
    *nodes += 1;
    if *nodes > budget {
        return Err(Error::BudgetExceeded {
            what: "diophantine search nodes",
            requested: nodes.to_string(),
            budget,
        });
    }
    let i = partial.len();
    let c = &coeffs[i];
    if i + 1 == coeffs.len() {
        let (q, r) = rem.div_rem(c);
        if r.is_zero() {
            let mut sol = partial.clone();
            sol.push(q);
            out.push(sol);
        }
        return Ok(());
    }
    let mut v = BigUint::zero();
    let mut left = rem.clone();
    loop {
        partial.push(v.clone());
        descend(coeffs, &left, partial, out, nodes, budget)?;
        partial.pop();
        if left < *c {
            return Ok(());
        }
        left -= c;
        v += 1u32;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn nat(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn two_var_examples() {
        let f = solve_two(&3i64, &5, &1).unwrap().unwrap();
        assert_eq!(f.step, (5, -3));
        for d in -3..=3 {
            let (x, y) = f.at(&d);
            assert_eq!(3 * x + 5 * y, 1);
        }
        assert_eq!(solve_two(&2i64, &4, &3).unwrap(), None);
        assert!(solve_two(&0i64, &0, &3).is_err());
        let f = solve_two(&-4i64, &6, &10).unwrap().unwrap();
        assert_eq!(f.gcd, 2);
        let (x, y) = f.at(&7);
        assert_eq!(-4 * x + 6 * y, 10);
    }

    #[test]
    fn case_three_family_at_six() {
        // Loop lengths 2^6·3 − 1 and 2^7 read the residue after the prefix.
        let a = BigInt::from(64 * 3 - 1);
        let b = BigInt::from(128);
        let c = &a * 2 + &b * 7;
        let f = solve_two(&a, &b, &c).unwrap().unwrap();
        assert!(f.step_has_opposite_signs());
        assert_eq!(
            f.nonneg_members().unwrap(),
            vec![(BigInt::from(2), BigInt::from(7))]
        );
        assert_eq!(solve_two(&1i64, &1, &2).unwrap().unwrap().nonneg_members(), Some(vec![(0, 2), (1, 1), (2, 0)]));
        assert_eq!(solve_two(&1i64, &-1, &2).unwrap().unwrap().nonneg_members(), None);
    }

    #[test]
    fn enumerate_examples() {
        let c = enumerate_nonneg(&nat(&[1, 1]), &BigInt::zero(), &BigInt::from(2), &nat(&[0, 0]))
            .unwrap();
        assert_eq!(c.solutions, vec![nat(&[0, 2]), nat(&[1, 1]), nat(&[2, 0])]);
        assert!(c.check());
        let c = enumerate_nonneg(&nat(&[5]), &BigInt::from(3), &BigInt::from(13), &nat(&[0]))
            .unwrap();
        assert_eq!(c.solutions, vec![nat(&[2])]);
        let c = enumerate_nonneg(&nat(&[7]), &BigInt::from(3), &BigInt::from(5), &nat(&[0]))
            .unwrap();
        assert!(c.solutions.is_empty());
        assert!(matches!(
            enumerate_nonneg(&nat(&[3, 0]), &BigInt::zero(), &BigInt::from(5), &nat(&[0, 0])),
            Err(Error::NonPositiveCoefficient(1))
        ));
        let c = enumerate_nonneg(&nat(&[2, 3]), &BigInt::zero(), &BigInt::from(12), &nat(&[1, 1]))
            .unwrap();
        assert_eq!(c.solutions, vec![nat(&[3, 2])]);
        let c = enumerate_nonneg(&[], &BigInt::from(4), &BigInt::from(4), &[]).unwrap();
        assert_eq!(c.solutions, vec![Vec::<BigUint>::new()]);
    }

    #[test]
    fn budget_is_enforced() {
        let r = enumerate_nonneg_with_budget(
            &nat(&[1, 1, 1]),
            &BigInt::zero(),
            &BigInt::from(1000),
            &nat(&[0, 0, 0]),
            100,
        );
        assert!(matches!(r, Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn json_uses_decimal_strings() {
        let c = enumerate_nonneg(&nat(&[1, 1]), &BigInt::zero(), &BigInt::from(1), &nat(&[0, 0]))
            .unwrap();
        let j = serde_json::to_string(&c).unwrap();
        assert_eq!(
            j,
            r#"{"coefficients":["1","1"],"constant":"0","target":"1","bounds":["0","0"],"solutions":[["0","1"],["1","0"]]}"#
        );
        let back: DioCertificate = serde_json::from_str(&j).unwrap();
        assert_eq!(back, c);
    }

    fn naive(coeffs: &[u64], constant: i64, target: i64, bounds: &[u64]) -> Vec<Vec<BigUint>> {
        let span = (target - constant).max(0) as u64;
        let mut out = Vec::new();
        let mut v: Vec<u64> = bounds.to_vec();
        loop {
            let s: i64 = constant + v.iter().zip(coeffs).map(|(x, c)| (x * c) as i64).sum::<i64>();
            if s == target {
                out.push(nat(&v));
            }
            let mut i = v.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if v[i] < bounds[i] + span / coeffs[i] {
                    v[i] += 1;
                    break;
                }
                v[i] = bounds[i];
            }
        }
    }

    proptest! {
        #[test]
        fn family_identity(a in -1000i64..1000, b in -1000i64..1000, x in -50i64..50, y in -50i64..50, d in -100i64..100) {
            prop_assume!(a != 0 || b != 0);
            let c = a * x + b * y;
            let f = solve_two(&a, &b, &c).unwrap().unwrap();
            let (u, v) = f.at(&d);
            prop_assert_eq!(a * u + b * v, c);
        }

        #[test]
        fn no_family_iff_gcd_fails(a in 1i64..200, b in 1i64..200, c in -500i64..500) {
            let f = solve_two(&a, &b, &c).unwrap();
            prop_assert_eq!(f.is_none(), c % a.gcd(&b) != 0);
        }

        #[test]
        fn family_members_match_enumeration(a in 1i64..30, b in 1i64..30, c in 0i64..300) {
            let listed = enumerate_nonneg(&nat(&[a as u64, b as u64]), &BigInt::zero(), &BigInt::from(c), &nat(&[0, 0])).unwrap();
            let from_family: Vec<Vec<BigUint>> = match solve_two(&a, &-b, &c).unwrap() {
                None => Vec::new(),
                Some(_) => {
                    let f = solve_two(&a, &b, &c).unwrap().unwrap();
                    f.nonneg_members().unwrap().into_iter().map(|(x, y)| nat(&[x as u64, y as u64])).collect()
                }
            };
            prop_assert_eq!(listed.solutions, from_family);
        }

        #[test]
        fn enumeration_matches_naive(
            coeffs in prop::collection::vec(1u64..8, 1..4),
            constant in -5i64..10,
            target in 0i64..40,
            lo in prop::collection::vec(0u64..3, 3),
        ) {
            let bounds = &lo[..coeffs.len()];
            let got = enumerate_nonneg(&nat(&coeffs), &BigInt::from(constant), &BigInt::from(target), &nat(bounds)).unwrap();
            prop_assert!(got.check());
            prop_assert_eq!(got.solutions, naive(&coeffs, constant, target, bounds));
        }
    }
}
