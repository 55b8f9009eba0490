//! Canonical finite piecewise-linear homeomorphisms of `[0,1]`.
//!
//! A [`PlMap`] is stored as the list of its genuine interior break points and
//! their images; `(0,0)` and `(1,1)` are implicit. Because the form is
//! canonical (no three consecutive graph points collinear), structural
//! equality is map equality and the derived `Hash` is usable as a
//! deduplication key.

mod graph;
mod interval;
mod named;
mod scheme;

pub use graph::PlGraph;
pub use interval::Interval;
pub use named::{bump, mather_h, mather_r};
pub use scheme::ConjugationScheme;

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rational::{self, format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlError {
    #[error("graph points are not strictly increasing at index {0}")]
    NotMonotone(usize),
    #[error("coordinate {0} lies outside [0,1]")]
    OutOfRange(String),
    #[error("invalid bump parameters: {0}")]
    InvalidBump(String),
    #[error("interval [{lo}, {hi}] is not inside the domain of the graph")]
    OutsideDomain { lo: String, hi: String },
    #[error("graphs do not chain: range {range} differs from domain {domain}")]
    Mismatch { range: String, domain: String },
}

/// Slopes of a PL homeomorphism at `0+` and `1-`, kept multiplicatively.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EndpointData {
    pub slope_at_zero: Rational,
    pub slope_at_one: Rational,
}

impl EndpointData {
    /// Kernel of the endpoint homomorphism: both slopes equal 1.
    pub fn in_kernel(&self) -> bool {
        self.slope_at_zero.is_one() && self.slope_at_one.is_one()
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlMap {
    points: Vec<(Rational, Rational)>,
}

fn collinear(a: &(Rational, Rational), b: &(Rational, Rational), c: &(Rational, Rational)) -> bool {
    (&b.1 - &a.1) * (&c.0 - &b.0) == (&c.1 - &b.1) * (&b.0 - &a.0)
}

/// Drops interior points of a polyline that sit on the segment joining
/// their neighbours. The first and last points are always kept.
pub(crate) fn prune_collinear(points: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(points.len());
    for p in points {
        while out.len() >= 2 && collinear(&out[out.len() - 2], &out[out.len() - 1], &p) {
            out.pop();
        }
        out.push(p);
    }
    out
}

fn in_unit(x: &Rational) -> bool {
    *x >= Rational::zero() && *x <= Rational::one()
}

/// Segment lookup on a sorted abscissa list: index `i` such that
/// `xs[i] <= x <= xs[i+1]`.
pub(crate) fn locate(pts: &[(Rational, Rational)], x: &Rational, by_y: bool) -> usize {
    let n = pts.len();
    debug_assert!(n >= 2);
    let idx = pts.partition_point(|p| if by_y { p.1 <= *x } else { p.0 <= *x });
    idx.clamp(1, n - 1) - 1
}

pub(crate) fn interpolate(a: &(Rational, Rational), b: &(Rational, Rational), x: &Rational) -> Rational {
    if *x == a.0 {
        return a.1.clone();
    }
    &a.1 + (&b.1 - &a.1) * (x - &a.0) / (&b.0 - &a.0)
}

impl PlMap {
    pub fn identity() -> Self {
        PlMap { points: Vec::new() }
    }

    /// Builds the canonical map through `points`. `(0,0)` and `(1,1)` may be
    /// given explicitly or left implicit.
    pub fn new(points: Vec<(Rational, Rational)>) -> Result<Self, PlError> {
        for (x, y) in &points {
            if !in_unit(x) {
                return Err(PlError::OutOfRange(format_rational(x)));
            }
            if !in_unit(y) {
                return Err(PlError::OutOfRange(format_rational(y)));
            }
        }
        let mut full = Vec::with_capacity(points.len() + 2);
        full.push((Rational::zero(), Rational::zero()));
        for p in points {
            if p.0.is_zero() && p.1.is_zero() || p.0.is_one() && p.1.is_one() {
                continue;
            }
            full.push(p);
        }
        full.push((Rational::one(), Rational::one()));
        for (i, w) in full.windows(2).enumerate() {
            if w[0].0 >= w[1].0 || w[0].1 >= w[1].1 {
                return Err(PlError::NotMonotone(i));
            }
        }
        Ok(Self::from_full_unchecked(full))
    }

    /// `full` must start at `(0,0)`, end at `(1,1)` and be strictly increasing.
    pub(crate) fn from_full_unchecked(full: Vec<(Rational, Rational)>) -> Self {
        let mut pruned = prune_collinear(full);
        pruned.pop();
        pruned.remove(0);
        PlMap { points: pruned }
    }

    /// Interior break points with their images.
    pub fn points(&self) -> &[(Rational, Rational)] {
        &self.points
    }

    pub fn breakpoints(&self) -> Vec<Rational> {
        self.points.iter().map(|p| p.0.clone()).collect()
    }

    pub fn values(&self) -> Vec<Rational> {
        self.points.iter().map(|p| p.1.clone()).collect()
    }

    /// Graph points including `(0,0)` and `(1,1)`.
    pub fn full_points(&self) -> Vec<(Rational, Rational)> {
        let mut v = Vec::with_capacity(self.points.len() + 2);
        v.push((Rational::zero(), Rational::zero()));
        v.extend(self.points.iter().cloned());
        v.push((Rational::one(), Rational::one()));
        v
    }

    pub fn is_identity(&self) -> bool {
        self.points.is_empty()
    }

    pub fn slopes(&self) -> Vec<Rational> {
        self.full_points()
            .windows(2)
            .map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0))
            .collect()
    }

    pub fn evaluate(&self, x: &Rational) -> Result<Rational, PlError> {
        if !in_unit(x) {
            return Err(PlError::OutOfRange(format_rational(x)));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &Rational) -> Rational {
        self.eval_by(x, false)
    }

    /// `f^{-1}(y)` without building the inverse.
    pub(crate) fn eval_inverse_unchecked(&self, y: &Rational) -> Rational {
        self.eval_by(y, true)
    }

    fn eval_by(&self, t: &Rational, inverse: bool) -> Rational {
        if self.points.is_empty() {
            return t.clone();
        }
        fn key(p: &(Rational, Rational), inverse: bool) -> &Rational {
            if inverse {
                &p.1
            } else {
                &p.0
            }
        }
        fn val(p: &(Rational, Rational), inverse: bool) -> &Rational {
            if inverse {
                &p.0
            } else {
                &p.1
            }
        }
        let idx = self.points.partition_point(|p| key(p, inverse) <= t);
        let zero = Rational::zero();
        let one = Rational::one();
        let (k0, v0) = if idx == 0 {
            (&zero, &zero)
        } else {
            let p = &self.points[idx - 1];
            (key(p, inverse), val(p, inverse))
        };
        if k0 == t {
            return v0.clone();
        }
        let (k1, v1) = if idx == self.points.len() {
            (&one, &one)
        } else {
            let p = &self.points[idx];
            (key(p, inverse), val(p, inverse))
        };
        v0 + (v1 - v0) * (t - k0) / (k1 - k0)
    }

    pub fn evaluate_inverse(&self, y: &Rational) -> Result<Rational, PlError> {
        if !in_unit(y) {
            return Err(PlError::OutOfRange(format_rational(y)));
        }
        Ok(self.eval_inverse_unchecked(y))
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &PlMap) -> PlMap {
        if self.is_identity() {
            return g.clone();
        }
        if g.is_identity() {
            return self.clone();
        }
        let mut xs: Vec<Rational> = g.breakpoints();
        xs.extend(self.points.iter().map(|p| g.eval_inverse_unchecked(&p.0)));
        xs.sort();
        xs.dedup();
        let mut full = Vec::with_capacity(xs.len() + 2);
        full.push((Rational::zero(), Rational::zero()));
        for x in xs {
            let y = self.eval_unchecked(&g.eval_unchecked(&x));
            full.push((x, y));
        }
        full.push((Rational::one(), Rational::one()));
        Self::from_full_unchecked(full)
    }

    pub fn invert(&self) -> PlMap {
        PlMap {
            points: self.points.iter().map(|(x, y)| (y.clone(), x.clone())).collect(),
        }
    }

    /// `f^k` for any integer `k`, by repeated squaring.
    pub fn power(&self, k: i64) -> PlMap {
        let mut base = if k < 0 { self.invert() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = PlMap::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base);
            }
        }
        acc
    }

    /// `g ∘ self ∘ g^{-1}`.
    pub fn conjugate_by(&self, g: &PlMap) -> PlMap {
        g.compose(self).compose(&g.invert())
    }

    /// `[f, g] = f g f^{-1} g^{-1}`.
    pub fn commutator(&self, g: &PlMap) -> PlMap {
        self.compose(g).compose(&self.invert()).compose(&g.invert())
    }

    /// Smallest closed interval containing every moved point, or `None` for
    /// the identity.
    pub fn support_hull(&self) -> Option<Interval> {
        let full = self.full_points();
        let moved: Vec<usize> = full
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0].0 != w[0].1 || w[1].0 != w[1].1)
            .map(|(i, _)| i)
            .collect();
        let first = *moved.first()?;
        let last = *moved.last()?;
        Some(Interval::new(full[first].0.clone(), full[last + 1].0.clone()))
    }

    pub fn eta(&self) -> EndpointData {
        let s = self.slopes();
        EndpointData {
            slope_at_zero: s[0].clone(),
            slope_at_one: s[s.len() - 1].clone(),
        }
    }

    /// `max` over segments of `max(slope, 1/slope)`; the exponential of the
    /// slope length function.
    pub fn slope_norm(&self) -> Rational {
        self.slopes()
            .into_iter()
            .map(|s| {
                let r = s.recip();
                if s > r {
                    s
                } else {
                    r
                }
            })
            .max()
            .unwrap_or_else(Rational::one)
    }

    /// Image of a closed interval.
    pub fn image(&self, j: &Interval) -> Interval {
        Interval::new(self.eval_unchecked(&j.lo), self.eval_unchecked(&j.hi))
    }

    pub fn preimage(&self, j: &Interval) -> Interval {
        Interval::new(
            self.eval_inverse_unchecked(&j.lo),
            self.eval_inverse_unchecked(&j.hi),
        )
    }

    /// Restriction to `j` as a partial graph.
    pub fn restrict(&self, j: &Interval) -> PlGraph {
        PlGraph::from_map(self, j)
    }

    /// `f(x) >= x` at every graph point (hence everywhere).
    pub fn dominates_identity(&self) -> bool {
        self.points.iter().all(|(x, y)| y >= x)
    }
}

impl fmt::Debug for PlMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PlMap[")?;
        for (i, (x, y)) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}->{}", x, y)?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct PlMapDoc {
    points: Vec<PointDoc>,
}

#[derive(Serialize, Deserialize)]
struct PointDoc(#[serde(with = "crate::rational::pair")] (Rational, Rational));

impl Serialize for PlMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PlMapDoc {
            points: self.points.iter().cloned().map(PointDoc).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PlMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = PlMapDoc::deserialize(d)?;
        PlMap::new(doc.points.into_iter().map(|p| p.0).collect()).map_err(serde::de::Error::custom)
    }
}

/// Convenience alias matching the spec-level operation names.
pub fn make_pl(points: Vec<(Rational, Rational)>) -> Result<PlMap, PlError> {
    PlMap::new(points)
}

pub(crate) fn fmt_q(x: &Rational) -> String {
    rational::format_rational(x)
}

#[cfg(test)]
mod props;
