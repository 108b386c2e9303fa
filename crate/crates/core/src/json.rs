//! Serde adapters: every integer travels through JSON as a decimal string.

use crate::arith::Rational;
use num_bigint::BigInt;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt::Display;
use std::str::FromStr;

pub mod dec {
    use super::*;

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
        s.trim().parse().map_err(D::Error::custom)
    }
}

pub mod dec_vec {
    use super::*;

    pub fn serialize<T: Display, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<Vec<T>, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        let strs = Vec::<String>::deserialize(d)?;
        strs.iter().map(|s| s.trim().parse().map_err(D::Error::custom)).collect()
    }
}

pub mod dec_opt {
    use super::*;

    pub fn serialize<T: Display, S: Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(|x| x.to_string()).serialize(s)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<Option<T>, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| s.trim().parse().map_err(D::Error::custom)).transpose()
    }
}

/// A rational as `{"num": "...", "den": "..."}`.
#[derive(Serialize, Deserialize)]
pub struct RationalRepr {
    #[serde(with = "dec")]
    pub num: BigInt,
    #[serde(with = "dec")]
    pub den: BigInt,
}

impl From<&Rational> for RationalRepr {
    fn from(r: &Rational) -> Self {
        RationalRepr { num: r.numer().clone(), den: r.denom().clone() }
    }
}

impl RationalRepr {
    pub fn to_rational<E: serde::de::Error>(&self) -> Result<Rational, E> {
        if self.den == BigInt::from(0) {
            return Err(E::custom("zero denominator"));
        }
        Ok(Rational::new(self.num.clone(), self.den.clone()))
    }
}

pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
        RationalRepr::from(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        RationalRepr::deserialize(d)?.to_rational()
    }
}

pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let reprs: Vec<RationalRepr> = v.iter().map(RationalRepr::from).collect();
        reprs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<RationalRepr>::deserialize(d)?.iter().map(|r| r.to_rational()).collect()
    }
}
