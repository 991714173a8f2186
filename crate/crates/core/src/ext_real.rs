//! Serde adapter for non-negative extended reals: `+∞` travels as the JSON
//! string `"inf"`, finite values as plain numbers.

use serde::de::{self, Deserializer, Visitor};
use serde::Serializer;
use std::fmt;

pub fn serialize<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    if *value == f64::INFINITY {
        serializer.serialize_str("inf")
    } else {
        serializer.serialize_f64(*value)
    }
}

struct ExtRealVisitor;

impl Visitor<'_> for ExtRealVisitor {
    type Value = f64;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a number or the string \"inf\"")
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
        match v {
            "inf" => Ok(f64::INFINITY),
            other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
        }
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<f64, D::Error> {
    deserializer.deserialize_any(ExtRealVisitor)
}

#[cfg(test)]
mod tests {
    use serde::{Deserialize, Serialize};

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Holder {
        #[serde(with = "super")]
        v: f64,
    }

    #[test]
    fn infinity_is_a_string() {
        let s = serde_json::to_string(&Holder { v: f64::INFINITY }).unwrap();
        assert_eq!(s, r#"{"v":"inf"}"#);
        let back: Holder = serde_json::from_str(&s).unwrap();
        assert_eq!(back.v, f64::INFINITY);
    }

    #[test]
    fn finite_values_roundtrip() {
        for v in [0.0, 0.1, 1.0 / 3.0, 12.5, 1e-300] {
            let s = serde_json::to_string(&Holder { v }).unwrap();
            let back: Holder = serde_json::from_str(&s).unwrap();
            assert_eq!(back.v.to_bits(), v.to_bits());
        }
        let h: Holder = serde_json::from_str(r#"{"v":3}"#).unwrap();
        assert_eq!(h.v, 3.0);
        assert!(serde_json::from_str::<Holder>(r#"{"v":"nan"}"#).is_err());
    }
}
