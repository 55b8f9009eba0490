//! Index schemes `m ↦ T ∘ P^m ∘ Q^(m0 + m)` shared by symbolic sets and
//! generalized maps.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Interval, PlGraph, PlMap};
use crate::rational::Rational;

/// The conjugator of the `m`-th member of an accumulating family:
/// `transport ∘ outer^m ∘ inner^(offset + m)`, for `m >= first`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ConjugationScheme {
    transport: PlMap,
    outer: PlMap,
    inner: PlMap,
    offset: u64,
    first: u64,
    transport_inv: PlMap,
    outer_inv: PlMap,
    inner_inv: PlMap,
}

impl std::fmt::Debug for ConjugationScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConjugationScheme")
            .field("transport", &self.transport)
            .field("outer", &self.outer)
            .field("inner", &self.inner)
            .field("offset", &self.offset)
            .field("first", &self.first)
            .finish()
    }
}

impl ConjugationScheme {
    pub fn new(outer: PlMap, inner: PlMap, offset: u64, first: u64) -> Self {
        Self::with_transport(PlMap::identity(), outer, inner, offset, first)
    }

    pub fn with_transport(transport: PlMap, outer: PlMap, inner: PlMap, offset: u64, first: u64) -> Self {
        ConjugationScheme {
            transport_inv: transport.invert(),
            outer_inv: outer.invert(),
            inner_inv: inner.invert(),
            transport,
            outer,
            inner,
            offset,
            first,
        }
    }

    pub fn first(&self) -> u64 {
        self.first
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    pub fn transport(&self) -> &PlMap {
        &self.transport
    }

    pub fn outer(&self) -> &PlMap {
        &self.outer
    }

    pub fn inner(&self) -> &PlMap {
        &self.inner
    }

    /// The same scheme followed by `g`.
    pub fn transported(&self, g: &PlMap) -> Self {
        Self::with_transport(
            g.compose(&self.transport),
            self.outer.clone(),
            self.inner.clone(),
            self.offset,
            self.first,
        )
    }

    fn factors(&self, m: u64) -> impl Iterator<Item = &PlMap> {
        std::iter::repeat_n(&self.inner, (self.offset + m) as usize)
            .chain(std::iter::repeat_n(&self.outer, m as usize))
            .chain(std::iter::once(&self.transport))
    }

    fn inverse_factors(&self, m: u64) -> impl Iterator<Item = &PlMap> {
        std::iter::once(&self.transport_inv)
            .chain(std::iter::repeat_n(&self.outer_inv, m as usize))
            .chain(std::iter::repeat_n(&self.inner_inv, (self.offset + m) as usize))
    }

    pub fn apply(&self, m: u64, x: &Rational) -> Rational {
        self.factors(m).fold(x.clone(), |acc, f| f.eval_unchecked(&acc))
    }

    pub fn apply_inverse(&self, m: u64, y: &Rational) -> Rational {
        self.inverse_factors(m).fold(y.clone(), |acc, f| f.eval_unchecked(&acc))
    }

    pub fn image(&self, m: u64, j: &Interval) -> Interval {
        Interval::new(self.apply(m, &j.lo), self.apply(m, &j.hi))
    }

    pub fn preimage(&self, m: u64, j: &Interval) -> Interval {
        Interval::new(self.apply_inverse(m, &j.lo), self.apply_inverse(m, &j.hi))
    }

    fn chain<'a>(factors: impl Iterator<Item = &'a PlMap>, j: &Interval) -> PlGraph {
        let mut acc = PlGraph::identity(j);
        for f in factors {
            if f.is_identity() {
                continue;
            }
            let step = PlGraph::from_map(f, &acc.range());
            acc = step.after(&acc).expect("ranges chain by construction");
        }
        acc
    }

    /// Graph of the `m`-th conjugator restricted to `j`.
    pub fn graph(&self, m: u64, j: &Interval) -> PlGraph {
        Self::chain(self.factors(m), j)
    }

    /// Graph of the inverse of the `m`-th conjugator restricted to `j`.
    pub fn inverse_graph(&self, m: u64, j: &Interval) -> PlGraph {
        Self::chain(self.inverse_factors(m), j)
    }

    /// The `m`-th conjugator as a full PL map.
    pub fn map(&self, m: u64) -> PlMap {
        self.transport
            .compose(&self.outer.power(m as i64))
            .compose(&self.inner.power((self.offset + m) as i64))
    }
}

#[derive(Serialize, Deserialize)]
struct SchemeDoc {
    transport: PlMap,
    outer: PlMap,
    inner: PlMap,
    offset: u64,
    first: u64,
}

impl Serialize for ConjugationScheme {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SchemeDoc {
            transport: self.transport.clone(),
            outer: self.outer.clone(),
            inner: self.inner.clone(),
            offset: self.offset,
            first: self.first,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConjugationScheme {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = SchemeDoc::deserialize(d)?;
        Ok(Self::with_transport(doc.transport, doc.outer, doc.inner, doc.offset, doc.first))
    }
}
