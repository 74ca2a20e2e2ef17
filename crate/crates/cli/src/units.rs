//! Engineering-unit quantities. Frequencies are written as ordinary frequencies and stored
//! as angular rates; this module is the only place the factor 2 pi is applied.

use std::f64::consts::PI;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Frequency,
    Capacitance,
    Inductance,
    Resistance,
    Temperature,
    Time,
}

impl Kind {
    /// (suffix, factor to SI). Frequencies land in rad/s.
    pub fn units(self) -> &'static [(&'static str, f64)] {
        const TWO_PI: f64 = 2.0 * PI;
        match self {
            Kind::Frequency => &[("GHz", TWO_PI * 1e9), ("MHz", TWO_PI * 1e6), ("kHz", TWO_PI * 1e3), ("Hz", TWO_PI)],
            Kind::Capacitance => &[("pF", 1e-12), ("fF", 1e-15), ("aF", 1e-18)],
            Kind::Inductance => &[("μH", 1e-6), ("uH", 1e-6), ("nH", 1e-9), ("pH", 1e-12)],
            Kind::Resistance => &[("kΩ", 1e3), ("kohm", 1e3), ("MΩ", 1e6), ("Mohm", 1e6), ("Ω", 1.0), ("ohm", 1.0)],
            Kind::Temperature => &[("mK", 1e-3), ("μK", 1e-6), ("uK", 1e-6), ("K", 1.0)],
            Kind::Time => &[("ns", 1e-9), ("μs", 1e-6), ("us", 1e-6), ("ms", 1e-3), ("ps", 1e-12), ("s", 1.0)],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::Frequency => "frequency",
            Kind::Capacitance => "capacitance",
            Kind::Inductance => "inductance",
            Kind::Resistance => "resistance",
            Kind::Temperature => "temperature",
            Kind::Time => "time",
        }
    }
}

/// Parse "<number> <unit>" (space optional) into SI, angular for frequencies.
pub fn parse(text: &str, kind: Kind) -> Result<f64, String> {
    let s = text.trim();
    let mut units: Vec<&(&str, f64)> = kind.units().iter().collect();
    units.sort_by_key(|(u, _)| std::cmp::Reverse(u.len()));
    let Some(&&(unit, factor)) = units.iter().find(|(u, _)| s.ends_with(u)) else {
        let tail: String = s.chars().rev().take_while(|c| c.is_alphabetic() || *c == 'Ω' || *c == 'μ').collect();
        return Err(if tail.is_empty() {
            format!("'{text}' has no unit; expected one of {}", list(kind))
        } else {
            let tail: String = tail.chars().rev().collect();
            format!("unit '{tail}' is not a {} unit; expected one of {}", kind.name(), list(kind))
        });
    };
    let num = s[..s.len() - unit.len()].trim();
    let value: f64 = num.parse().map_err(|_| format!("'{num}' is not a number (in '{text}')"))?;
    if value.is_nan() {
        return Err("NaN is not allowed".into());
    }
    Ok(value * factor)
}

fn list(kind: Kind) -> String {
    kind.units().iter().map(|(u, _)| *u).collect::<Vec<_>>().join(", ")
}

/// Format an SI value in the given unit, inverse of `parse`.
pub fn format(value: f64, kind: Kind, unit: &str) -> Option<String> {
    kind.units().iter().find(|(u, _)| *u == unit).map(|(u, f)| format!("{} {u}", value / f))
}

macro_rules! quantity {
    ($name:ident, $kind:expr) => {
        #[derive(Debug, Clone, Copy, PartialEq)]
        pub struct $name(pub f64);

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                struct V;
                impl<'de> Visitor<'de> for V {
                    type Value = f64;
                    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                        write!(f, "a {} string with a unit suffix", $kind.name())
                    }
                    fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                        parse(v, $kind).map_err(E::custom)
                    }
                }
                d.deserialize_str(V).map($name)
            }
        }
    };
}

quantity!(Frequency, Kind::Frequency);
quantity!(Capacitance, Kind::Capacitance);
quantity!(Inductance, Kind::Inductance);
quantity!(Resistance, Kind::Resistance);
quantity!(Temperature, Kind::Temperature);
quantity!(Time, Kind::Time);
