//! Lengths in configuration files: bare numbers are metres; strings may carry
//! an explicit unit suffix (`m`, `cm`, `mm`, `um`, `nm`, `pm`).

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// A length in metres.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct Length(pub f64);

impl Length {
    pub fn metres(self) -> f64 {
        self.0
    }
}

const SUFFIXES: [(&str, f64); 6] = [
    ("nm", 1e-9),
    ("pm", 1e-12),
    ("um", 1e-6),
    ("mm", 1e-3),
    ("cm", 1e-2),
    ("m", 1.0),
];

/// Parses `"6.7 cm"`, `"1064nm"`, `"0.067 m"` or a bare number (metres).
pub fn parse_length(text: &str) -> Result<f64, String> {
    let s = text.trim();
    for (suffix, scale) in SUFFIXES {
        if let Some(num) = s.strip_suffix(suffix) {
            let num = num.trim_end();
            return num
                .parse::<f64>()
                .map(|v| v * scale)
                .map_err(|_| format!("invalid length {text:?}"));
        }
    }
    s.parse::<f64>().map_err(|_| {
        format!("invalid length {text:?}: expected a number in metres or a value with suffix m, cm, mm, um, nm, pm")
    })
}

impl<'de> Deserialize<'de> for Length {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = Length;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a length in metres or a string with a unit suffix")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Length, E> {
                Ok(Length(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Length, E> {
                Ok(Length(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Length, E> {
                Ok(Length(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Length, E> {
                parse_length(v).map(Length).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

impl Serialize for Length {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}
