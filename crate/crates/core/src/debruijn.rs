//! Binary de Bruijn strings: FKM generation, verification and rotation.

use crate::error::{Error, Result};
use crate::words::BitString;

/// Largest order that [`generate_lex_least`] will materialize (2^24 bits).
pub const ORDER_CAP: u32 = 24;

/// A de Bruijn string of order `n` together with the rotation it was taken at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeBruijnString {
    order: u32,
    bits: BitString,
    rotation: u64,
}

impl DeBruijnString {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    pub fn into_bits(self) -> BitString {
        self.bits
    }

    /// Left rotation relative to the string this one was derived from.
    pub fn rotation(&self) -> u64 {
        self.rotation
    }

    pub fn period(&self) -> u64 {
        1u64 << self.order
    }

    /// Wraps an arbitrary string after checking the de Bruijn property.
    pub fn from_bits(bits: BitString, order: u32) -> Result<Self> {
        if !is_debruijn(&bits, order) {
            return Err(Error::Invalid(format!(
                "string of length {} is not a de Bruijn string of order {order}",
                bits.len()
            )));
        }
        Ok(Self {
            order,
            bits,
            rotation: 0,
        })
    }
}

fn check_order(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::ZeroOrder);
    }
    if n > ORDER_CAP {
        return Err(Error::OrderTooLarge {
            order: n,
            cap: ORDER_CAP,
        });
    }
    Ok(())
}

/// The lexicographically least de Bruijn string of order `n`.
///
/// Concatenates, in lexicographic order, the Lyndon words whose length
/// divides `n`. Lyndon words are produced by the iterative successor rule:
/// increment the last symbol, extend periodically to length `n`, then strip
/// trailing ones.
pub fn generate_lex_least(n: u32) -> Result<DeBruijnString> {
    check_order(n)?;
    let n_us = n as usize;
    let mut bits = BitString::with_capacity(1 << n);
    // `None` stands for the virtual symbol -1 that seeds the enumeration.
    let mut w: Vec<Option<bool>> = vec![None];
    while let Some(last) = w.last_mut() {
        *last = Some(match *last {
            None => false,
            Some(false) => true,
            Some(true) => unreachable!("trailing ones are stripped"),
        });
        let m = w.len();
        if n_us.is_multiple_of(m) {
            for b in &w {
                bits.push(b.expect("all symbols assigned"));
            }
        }
        while w.len() < n_us {
            let b = w[w.len() - m];
            w.push(b);
        }
        while w.last() == Some(&Some(true)) {
            w.pop();
        }
    }
    debug_assert_eq!(bits.len(), 1 << n);
    Ok(DeBruijnString {
        order: n,
        bits,
        rotation: 0,
    })
}

/// True iff `|u| = 2^n` and every length-`n` word occurs exactly once in
/// `u · u[0..n-2]`.
pub fn is_debruijn(u: &BitString, n: u32) -> bool {
    if n == 0 || n >= 48 || u.len() as u64 != 1u64 << n {
        return false;
    }
    let n_us = n as usize;
    let len = u.len();
    let mut seen = vec![false; len];
    let mask = (len - 1) as u64;
    let mut v = u.window_value(0, n_us);
    for i in 0..len {
        if i > 0 {
            v = ((v << 1) | u.bit((i + n_us - 1) % len) as u64) & mask;
        }
        if std::mem::replace(&mut seen[v as usize], true) {
            return false;
        }
    }
    true
}

/// Left rotation by `j`, with `0 <= j < 2^n`.
pub fn rotate(d: &DeBruijnString, j: u64) -> Result<DeBruijnString> {
    let period = d.period();
    if j >= period {
        return Err(Error::RotationOutOfRange {
            rotation: j,
            len: period,
        });
    }
    Ok(DeBruijnString {
        order: d.order,
        bits: d.bits.rotate_left(j as usize),
        rotation: (d.rotation + j) % period,
    })
}

/// A de Bruijn string of order `n` whose first bit is `b`.
///
/// For `b = 0` this is the lex-least string. For `b = 1` it is the lex-least
/// string rotated left by `n`: its first `1` sits at index `n`, so the
/// rotation reads `1 · v_n · 0^n`.
pub fn generate_with_start_bit(n: u32, b: bool) -> Result<DeBruijnString> {
    let d = generate_lex_least(n)?;
    if b {
        rotate(&d, n as u64)
    } else {
        Ok(d)
    }
}
