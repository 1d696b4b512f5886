//! Exact-count metric values.
//!
//! Every proportion the engine reports is carried as the integer counts it was
//! computed from, so identities between metrics can be checked on counts
//! rather than on rounded quotients.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::fmt;

/// A non-negative proportion `numerator / denominator`.
///
/// The quotient is undefined when the denominator is zero; it is never
/// silently reported as `0.0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Ratio {
    numerator: u64,
    denominator: u64,
}

impl Ratio {
    pub fn new(numerator: u64, denominator: u64) -> Self {
        Self {
            numerator,
            denominator,
        }
    }

    /// A rate whose numerator counts a subset of the denominator's records.
    pub(crate) fn rate(numerator: u64, denominator: u64) -> Self {
        debug_assert!(numerator <= denominator, "{numerator}/{denominator}");
        Self::new(numerator, denominator)
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn is_defined(&self) -> bool {
        self.denominator > 0
    }

    pub fn value(&self) -> Option<f64> {
        (self.denominator > 0).then(|| self.numerator as f64 / self.denominator as f64)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Ratio", 3)?;
        s.serialize_field("denominator", &self.denominator)?;
        s.serialize_field("numerator", &self.numerator)?;
        s.serialize_field("value", &self.value())?;
        s.end()
    }
}

/// A signed count difference over a common denominator, such as a change in
/// accuracy between two agents measured on the same `N` records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SignedRatio {
    numerator: i64,
    denominator: u64,
}

impl SignedRatio {
    pub fn new(numerator: i64, denominator: u64) -> Self {
        Self {
            numerator,
            denominator,
        }
    }

    /// `a - b` for two ratios sharing a denominator.
    pub fn difference(a: Ratio, b: Ratio) -> Self {
        debug_assert_eq!(a.denominator, b.denominator);
        Self::new(a.numerator as i64 - b.numerator as i64, a.denominator)
    }

    pub fn numerator(&self) -> i64 {
        self.numerator
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn value(&self) -> Option<f64> {
        (self.denominator > 0).then(|| self.numerator as f64 / self.denominator as f64)
    }
}

impl fmt::Display for SignedRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

impl Serialize for SignedRatio {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("SignedRatio", 3)?;
        s.serialize_field("denominator", &self.denominator)?;
        s.serialize_field("numerator", &self.numerator)?;
        s.serialize_field("value", &self.value())?;
        s.end()
    }
}
