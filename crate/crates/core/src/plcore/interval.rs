use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::{format_rational, Rational};

/// Closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Closed intervals share at least one point.
    pub fn meets(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_disjoint(&self, other: &Interval) -> bool {
        !self.meets(other)
    }

    /// Interiors are disjoint (touching at an endpoint is allowed).
    pub fn interiors_disjoint(&self, other: &Interval) -> bool {
        self.hi <= other.lo || other.hi <= self.lo
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        if !self.meets(other) {
            return None;
        }
        let lo = if self.lo > other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi < other.hi { &self.hi } else { &other.hi };
        Some(Interval::new(lo.clone(), hi.clone()))
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        let lo = if self.lo < other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi > other.hi { &self.hi } else { &other.hi };
        Interval::new(lo.clone(), hi.clone())
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [format_rational(&self.lo), format_rational(&self.hi)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (lo, hi) = crate::rational::pair::deserialize(d)?;
        if lo > hi {
            return Err(serde::de::Error::custom("interval endpoints out of order"));
        }
        Ok(Interval { lo, hi })
    }
}
