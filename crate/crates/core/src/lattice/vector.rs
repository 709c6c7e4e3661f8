use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{format_rat, parse_rat, Rat};

/// An exact point of `Q^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalVector(Vec<Rat>);

impl RationalVector {
    pub fn new(coords: Vec<Rat>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        Ok(RationalVector(coords))
    }

    pub fn from_ints(v: &[i64]) -> Self {
        RationalVector(v.iter().map(|&x| Rat::from_integer(x.into())).collect())
    }

    /// The point `num / den`.
    pub fn from_scaled(num: &[i64], den: i64) -> Self {
        RationalVector(num.iter().map(|&x| Rat::new(x.into(), den.into())).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rat] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Least common denominator of the coordinates.
    pub fn denominator(&self) -> BigInt {
        self.0.iter().fold(BigInt::from(1), |acc, q| acc.lcm(q.denom()))
    }

    /// `n * self` as an integer vector, if integral.
    pub fn scaled_integral(&self, n: i64) -> Option<Vec<i64>> {
        self.0
            .iter()
            .map(|q| {
                let s = q * Rat::from_integer(n.into());
                if s.is_integer() {
                    s.numer().to_i64()
                } else {
                    None
                }
            })
            .collect()
    }

    /// Evaluate an integer functional.
    pub fn eval(&self, functional: &[i64]) -> Rat {
        self.0
            .iter()
            .zip(functional)
            .fold(Rat::zero(), |acc, (x, &l)| acc + x * Rat::from_integer(l.into()))
    }

    pub fn add(&self, other: &RationalVector) -> RationalVector {
        RationalVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &RationalVector) -> RationalVector {
        RationalVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: &Rat) -> RationalVector {
        RationalVector(self.0.iter().map(|a| a * s).collect())
    }

    /// Primitive integer vector on the same ray (zero stays zero).
    pub fn primitive_direction(&self) -> Result<Vec<i64>> {
        let den = self.denominator();
        let ints: Vec<BigInt> = self
            .0
            .iter()
            .map(|q| (q * Rat::from_integer(den.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        ints.iter()
            .map(|x| {
                let y = if g.is_zero() { x.clone() } else { x / &g };
                y.to_i64().ok_or(Error::Overflow)
            })
            .collect()
    }

    /// Parse `"1/2,0,-3"` (brackets and whitespace optional).
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches(['[', '(']).trim_end_matches([']', ')']);
        RationalVector::new(s.split(',').map(parse_rat).collect::<Result<_>>()?)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(format_rat).collect()
    }

    /// Compact key `"0,1/2"` used for JSON object keys.
    pub fn key(&self) -> String {
        self.to_strings().join(",")
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join(", "))
    }
}

impl Serialize for RationalVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<serde_json::Value> = Vec::deserialize(d)?;
        let coords = raw
            .iter()
            .map(|v| match v {
                serde_json::Value::String(s) => parse_rat(s),
                serde_json::Value::Number(n) => n
                    .as_i64()
                    .map(|i| Rat::from_integer(i.into()))
                    .ok_or_else(|| Error::Parse(format!("non-integer number {n}"))),
                other => Err(Error::Parse(format!("not a rational: {other}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        RationalVector::new(coords).map_err(serde::de::Error::custom)
    }
}

/// Dot product of integer vectors.
pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Divide by the gcd of the entries (zero stays zero).
pub fn make_primitive(v: &mut [i64]) {
    let g = v.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    if g > 1 {
        for x in v.iter_mut() {
            *x /= g;
        }
    }
}

/// Sign convention for hyperplane equations: first nonzero entry positive.
pub fn normalize_sign(v: &mut [i64]) {
    if let Some(first) = v.iter().find(|x| **x != 0) {
        if first.is_negative() {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        let v = RationalVector::parse("[1/2, 0, -3]").unwrap();
        assert_eq!(v.key(), "1/2,0,-3");
        assert_eq!(v.denominator(), BigInt::from(2));
        assert_eq!(v.scaled_integral(2), Some(vec![1, 0, -6]));
        assert_eq!(v.scaled_integral(3), None);
        assert!(RationalVector::parse("").is_err());
    }

    #[test]
    fn primitive_direction_of_rational_ray() {
        let v = RationalVector::parse("4/3,2/3").unwrap();
        assert_eq!(v.primitive_direction().unwrap(), vec![2, 1]);
    }

    #[test]
    fn json_accepts_ints_and_strings() {
        let v: RationalVector = serde_json::from_str(r#"[1, "1/3"]"#).unwrap();
        assert_eq!(v.key(), "1,1/3");
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"["1","1/3"]"#);
    }
}
