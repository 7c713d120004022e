//! Serde helpers for exponents that may be infinite.  JSON has no infinity,
//! so `p = ∞` is written as the string `"inf"`; numbers and the strings
//! `"inf"`, `"infinity"` and `"∞"` are accepted on input.

use serde::de::{self, Deserializer, Visitor};
use serde::Serializer;
use std::fmt;

pub fn parse(text: &str) -> Option<f64> {
    match text.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "∞" | "+inf" => Some(f64::INFINITY),
        t => t.parse::<f64>().ok(),
    }
}

pub fn serialize<S: Serializer>(p: &f64, s: S) -> Result<S::Ok, S::Error> {
    if p.is_infinite() && *p > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*p)
    }
}

struct ExponentVisitor;

impl<'de> Visitor<'de> for ExponentVisitor {
    type Value = f64;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a number or \"inf\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
        Ok(v)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
        Ok(v as f64)
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
        Ok(v as f64)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
        parse(v).ok_or_else(|| E::custom(format!("bad exponent `{v}`")))
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    d.deserialize_any(ExponentVisitor)
}

/// Same conventions for `Option<f64>`.
pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(p: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match p {
            Some(v) => super::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        #[derive(serde::Deserialize)]
        struct Wrap(#[serde(with = "super")] f64);
        let v: Option<Wrap> = serde::Deserialize::deserialize(d)?;
        Ok(v.map(|w| w.0))
    }
}

#[cfg(test)]
mod tests {
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct P {
        #[serde(with = "super")]
        p: f64,
    }

    #[test]
    fn infinity_as_string() {
        let s = serde_json::to_string(&P { p: f64::INFINITY }).unwrap();
        assert_eq!(s, r#"{"p":"inf"}"#);
        let back: P = serde_json::from_str(&s).unwrap();
        assert!(back.p.is_infinite());
        let two: P = serde_json::from_str(r#"{"p":2}"#).unwrap();
        assert_eq!(two.p, 2.0);
    }
}
