//! Scalar traits the counting and number-theory code is generic over.
//!
//! Path counts can be carried in a fixed-width integer when the caller knows
//! they cannot overflow, or in a [`BigUint`](num_bigint::BigUint) when exact
//! certification is required. Diophantine arithmetic is generic over any
//! signed integer that implements [`num_integer::Integer`].

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{CheckedAdd, One, Signed, Zero};

/// An unsigned counter for the length-indexed path dynamic program.
///
/// `checked_add` returning `None` signals overflow; the DP surfaces it
/// instead of wrapping.
pub trait PathCount: Clone + Zero + One + CheckedAdd + PartialEq + std::fmt::Debug {}

impl<T> PathCount for T where T: Clone + Zero + One + CheckedAdd + PartialEq + std::fmt::Debug {}

/// A signed integer suitable for the extended Euclidean algorithm.
pub trait DioInt: Integer + Signed + Clone + std::fmt::Debug + std::fmt::Display {}

impl<T> DioInt for T where T: Integer + Signed + Clone + std::fmt::Debug + std::fmt::Display {}

/// Converts a non-negative big integer into a `u64`, if it fits.
pub(crate) fn to_u64(x: &BigUint) -> Option<u64> {
    num_traits::ToPrimitive::to_u64(x)
}

pub(crate) fn pow2(k: u64) -> BigUint {
    BigUint::one() << k
}

/// Serde adapters that write big integers as decimal strings.
pub mod decimal {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }

    /// The same, for a list.
    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<T: Display, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&x.to_string())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, T, D>(d: D) -> Result<Vec<T>, D::Error>
        where
            T: FromStr,
            T::Err: Display,
            D: Deserializer<'de>,
        {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|s| s.parse().map_err(D::Error::custom))
                .collect()
        }
    }

    /// The same, for a list of tuples.
    pub mod vec2 {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<T: Display, S: Serializer>(v: &[Vec<T>], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for row in v {
                let row: Vec<String> = row.iter().map(ToString::to_string).collect();
                seq.serialize_element(&row)?;
            }
            seq.end()
        }

        pub fn deserialize<'de, T, D>(d: D) -> Result<Vec<Vec<T>>, D::Error>
        where
            T: FromStr,
            T::Err: Display,
            D: Deserializer<'de>,
        {
            Vec::<Vec<String>>::deserialize(d)?
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|s| s.parse().map_err(D::Error::custom))
                        .collect()
                })
                .collect()
        }
    }
}
