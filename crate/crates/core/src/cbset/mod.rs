//! Finitely described countable closed subsets of `[0,1]` and their
//! Cantor–Bendixson calculus.
//!
//! A [`SetExpr`] is a finite set, a union, the image of a set under a PL map,
//! or an [`AccumFamily`]: pieces `P_m` living in pairwise disjoint hulls
//! `H_m` that converge monotonically to a limit point. The family denotes the
//! closure of the union of its pieces, so the limit belongs to it whenever
//! infinitely many pieces are nonempty.
//!
//! Derived sets are computed by rewriting. Normal forms carry no `Image`
//! nodes: images of families are absorbed into the family's conjugation
//! scheme.

mod doc;
pub mod examples;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plcore::{ConjugationScheme, Interval, PlMap};
use crate::rational::Rational;

pub use doc::{NoSequences, PiecesDoc, SetDoc, SetResolver};

/// Number of family members inspected when checking invariants.
pub const DEFAULT_WINDOW: u64 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CbError {
    #[error("malformed expression: {0}")]
    MalformedExpr(String),
    #[error("unknown sequence tag `{0}`")]
    UnknownSequence(String),
}

/// Side from which the hulls of a family approach its limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Above,
    Below,
}

/// Name and parameters identifying a catalog sequence in serialized form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceDescriptor {
    pub tag: String,
    #[serde(default)]
    pub params: serde_json::Value,
}

/// An index-dependent piece set, given in the family's core coordinates.
pub trait SetSequence: Send + Sync + fmt::Debug {
    fn piece(&self, m: u64) -> SetExpr;
    /// Every piece has exactly this rank (and is nonempty).
    fn uniform_rank(&self) -> usize;
    fn descriptor(&self) -> SequenceDescriptor;
}

#[derive(Debug, Clone)]
pub enum SetPieces {
    /// The same core set for every index.
    Constant(Box<SetExpr>),
    /// A catalog sequence after `derivations` derived-set steps.
    Sequence {
        source: Arc<dyn SetSequence>,
        derivations: usize,
    },
}

impl PartialEq for SetPieces {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (SetPieces::Constant(a), SetPieces::Constant(b)) => a == b,
            (
                SetPieces::Sequence { source: a, derivations: da },
                SetPieces::Sequence { source: b, derivations: db },
            ) => da == db && a.descriptor() == b.descriptor(),
            _ => false,
        }
    }
}

impl SetPieces {
    fn core(&self, m: u64) -> SetExpr {
        match self {
            SetPieces::Constant(core) => (**core).clone(),
            SetPieces::Sequence { source, derivations } => {
                let mut x = source.piece(m).normalize();
                for _ in 0..*derivations {
                    // catalog sequences are validated when the family is
                    x = x.derive().unwrap_or_else(|_| SetExpr::empty());
                }
                x
            }
        }
    }

    /// Are infinitely many pieces nonempty, as far as the structure says?
    fn structurally_nonempty(&self) -> bool {
        match self {
            SetPieces::Constant(core) => !core.normalize().is_empty(),
            SetPieces::Sequence { source, derivations } => *derivations <= source.uniform_rank(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccumFamily {
    pub limit: Rational,
    pub direction: Direction,
    /// Hull `m` is `scheme(m)(core_hull)`; piece `m` is `scheme(m)` applied to the core piece.
    pub scheme: ConjugationScheme,
    pub core_hull: Interval,
    pub pieces: SetPieces,
    pub cofinal_nonempty: bool,
}

impl AccumFamily {
    pub fn hull(&self, m: u64) -> Interval {
        self.scheme.image(m, &self.core_hull)
    }

    /// Piece `m` in actual coordinates, normalized.
    pub fn piece(&self, m: u64) -> SetExpr {
        let core = self.pieces.core(m);
        match core {
            SetExpr::Finite(pts) => {
                SetExpr::Finite(pts.iter().map(|x| self.scheme.apply(m, x)).collect())
            }
            other => SetExpr::Image(self.scheme.map(m), Box::new(other)).normalize(),
        }
    }

    /// Smallest interval containing every hull and the limit.
    pub fn envelope(&self) -> Interval {
        let first = self.hull(self.scheme.first());
        match self.direction {
            Direction::Above => Interval::new(self.limit.clone(), first.hi),
            Direction::Below => Interval::new(first.lo, self.limit.clone()),
        }
    }

    /// Checks hull disjointness and monotonicity, piece containment and the
    /// cofinal flag over `window` consecutive indices.
    pub fn validate(&self, window: u64) -> Result<(), CbError> {
        let first = self.scheme.first();
        let mut prev: Option<Interval> = None;
        for m in first..first + window {
            let hull = self.hull(m);
            let side_ok = match self.direction {
                Direction::Above => hull.lo > self.limit,
                Direction::Below => hull.hi < self.limit,
            };
            if !side_ok {
                return Err(CbError::MalformedExpr(format!(
                    "hull {m} = {hull:?} is on the wrong side of the limit {}",
                    self.limit
                )));
            }
            if let Some(p) = &prev {
                let monotone = match self.direction {
                    Direction::Above => hull.hi < p.lo,
                    Direction::Below => hull.lo > p.hi,
                };
                if !monotone {
                    return Err(CbError::MalformedExpr(format!(
                        "hulls {} and {m} overlap or are out of order",
                        m - 1
                    )));
                }
            }
            prev = Some(hull);
        }
        let inspected = window.min(4);
        let mut any_nonempty = false;
        for m in first..first + inspected {
            let core = self.pieces.core(m);
            if let Some(b) = core.bounds() {
                any_nonempty = true;
                if !self.core_hull.contains_interval(&b) {
                    return Err(CbError::MalformedExpr(format!(
                        "piece {m} leaves its hull: {b:?} not in {:?}",
                        self.core_hull
                    )));
                }
            }
        }
        if self.cofinal_nonempty != self.pieces.structurally_nonempty()
            || (self.cofinal_nonempty && !any_nonempty)
        {
            return Err(CbError::MalformedExpr(
                "cofinal flag disagrees with the inspected pieces".into(),
            ));
        }
        Ok(())
    }

    fn derive(&self) -> Result<SetExpr, CbError> {
        self.validate(DEFAULT_WINDOW)?;
        let pieces = match &self.pieces {
            SetPieces::Constant(core) => SetPieces::Constant(Box::new(core.derive()?)),
            SetPieces::Sequence { source, derivations } => SetPieces::Sequence {
                source: source.clone(),
                derivations: derivations + 1,
            },
        };
        let nonempty = pieces.structurally_nonempty();
        let mut parts = Vec::new();
        if nonempty {
            parts.push(SetExpr::Family(AccumFamily {
                limit: self.limit.clone(),
                direction: self.direction,
                scheme: self.scheme.clone(),
                core_hull: self.core_hull.clone(),
                pieces,
                cofinal_nonempty: true,
            }));
        }
        if self.cofinal_nonempty {
            parts.push(SetExpr::Finite(vec![self.limit.clone()]));
        }
        Ok(SetExpr::Union(parts).normalize())
    }

    fn transported(&self, g: &PlMap) -> AccumFamily {
        AccumFamily {
            limit: g.eval_unchecked(&self.limit),
            direction: self.direction,
            scheme: self.scheme.transported(g),
            core_hull: self.core_hull.clone(),
            pieces: self.pieces.clone(),
            cofinal_nonempty: self.cofinal_nonempty,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SetExpr {
    /// Sorted, distinct points.
    Finite(Vec<Rational>),
    Family(AccumFamily),
    Union(Vec<SetExpr>),
    Image(PlMap, Box<SetExpr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankResult {
    pub rank: usize,
    pub final_cardinality: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Cardinality {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::Finite(n) => write!(f, "{n}"),
            Cardinality::Infinite => write!(f, "infinite"),
        }
    }
}

impl SetExpr {
    pub fn empty() -> Self {
        SetExpr::Finite(Vec::new())
    }

    pub fn finite(mut points: Vec<Rational>) -> Self {
        points.sort();
        points.dedup();
        SetExpr::Finite(points)
    }

    pub fn image(g: PlMap, inner: SetExpr) -> Self {
        SetExpr::Image(g, Box::new(inner))
    }

    /// `X ∪ g(Y)`.
    pub fn union_with_image(x: SetExpr, g: PlMap, y: SetExpr) -> Self {
        SetExpr::Union(vec![x, SetExpr::image(g, y)])
    }

    /// Pushes images down, flattens unions, merges finite parts and drops
    /// empty branches.
    pub fn normalize(&self) -> SetExpr {
        let mut finite: Vec<Rational> = Vec::new();
        let mut families: Vec<SetExpr> = Vec::new();
        self.collect(None, &mut finite, &mut families);
        finite.sort();
        finite.dedup();
        if families.is_empty() {
            return SetExpr::Finite(finite);
        }
        if finite.is_empty() && families.len() == 1 {
            return families.pop().unwrap();
        }
        if !finite.is_empty() {
            families.insert(0, SetExpr::Finite(finite));
        }
        SetExpr::Union(families)
    }

    fn collect(&self, g: Option<&PlMap>, finite: &mut Vec<Rational>, families: &mut Vec<SetExpr>) {
        match self {
            SetExpr::Finite(pts) => match g {
                Some(g) => finite.extend(pts.iter().map(|x| g.eval_unchecked(x))),
                None => finite.extend(pts.iter().cloned()),
            },
            SetExpr::Union(parts) => {
                for p in parts {
                    p.collect(g, finite, families);
                }
            }
            SetExpr::Image(h, inner) => {
                let gh = match g {
                    Some(g) => g.compose(h),
                    None => h.clone(),
                };
                inner.collect(Some(&gh), finite, families);
            }
            SetExpr::Family(fam) => {
                if !fam.pieces.structurally_nonempty() {
                    return;
                }
                let fam = match g {
                    Some(g) if !g.is_identity() => fam.transported(g),
                    _ => fam.clone(),
                };
                families.push(SetExpr::Family(fam));
            }
        }
    }

    /// Only meaningful on normal forms.
    pub fn is_empty(&self) -> bool {
        match self {
            SetExpr::Finite(pts) => pts.is_empty(),
            SetExpr::Union(parts) => parts.iter().all(|p| p.is_empty()),
            SetExpr::Image(_, inner) => inner.is_empty(),
            SetExpr::Family(f) => !f.pieces.structurally_nonempty(),
        }
    }

    /// Convex hull of the set, `None` when empty.
    pub fn bounds(&self) -> Option<Interval> {
        match self {
            SetExpr::Finite(pts) => match (pts.iter().min(), pts.iter().max()) {
                (Some(lo), Some(hi)) => Some(Interval::new(lo.clone(), hi.clone())),
                _ => None,
            },
            SetExpr::Union(parts) => parts
                .iter()
                .filter_map(|p| p.bounds())
                .reduce(|a, b| a.hull(&b)),
            SetExpr::Image(g, inner) => inner.bounds().map(|b| g.image(&b)),
            SetExpr::Family(f) => {
                if f.pieces.structurally_nonempty() {
                    Some(f.envelope())
                } else {
                    None
                }
            }
        }
    }

    /// The derived set, symbolically.
    pub fn derive(&self) -> Result<SetExpr, CbError> {
        match self.normalize() {
            SetExpr::Finite(_) => Ok(SetExpr::empty()),
            SetExpr::Family(f) => f.derive(),
            SetExpr::Union(parts) => {
                let derived = parts.iter().map(|p| p.derive()).collect::<Result<Vec<_>, _>>()?;
                Ok(SetExpr::Union(derived).normalize())
            }
            SetExpr::Image(..) => unreachable!("normal forms carry no images"),
        }
    }

    pub fn derive_n(&self, n: usize) -> Result<SetExpr, CbError> {
        let mut x = self.normalize();
        for _ in 0..n {
            if x.is_empty() {
                break;
            }
            x = x.derive()?;
        }
        Ok(x)
    }

    /// Cantor–Bendixson rank. Nonempty finite sets have rank 0; so does the
    /// empty set, with final cardinality 0.
    pub fn rank(&self) -> Result<RankResult, CbError> {
        let mut x = self.normalize();
        let mut rank = 0;
        loop {
            if x.is_empty() {
                return Ok(RankResult { rank: 0, final_cardinality: 0 });
            }
            let next = x.derive()?;
            if next.is_empty() {
                let final_cardinality = match &x {
                    SetExpr::Finite(pts) => pts.len(),
                    _ => {
                        return Err(CbError::MalformedExpr(
                            "infinite set with empty derived set".into(),
                        ))
                    }
                };
                return Ok(RankResult { rank, final_cardinality });
            }
            x = next;
            rank += 1;
        }
    }

    /// `|X^(n)|`.
    pub fn nth_derived_cardinality(&self, n: usize) -> Result<Cardinality, CbError> {
        match self.derive_n(n)? {
            SetExpr::Finite(pts) => Ok(Cardinality::Finite(pts.len())),
            x if x.is_empty() => Ok(Cardinality::Finite(0)),
            _ => Ok(Cardinality::Infinite),
        }
    }

    /// At least `min(k, |X|)` points of the set, sorted. Families contribute
    /// their lowest-index pieces first.
    pub fn enumerate(&self, k: usize) -> Vec<Rational> {
        let mut out = Vec::new();
        match self.normalize() {
            SetExpr::Finite(pts) => out = pts,
            SetExpr::Union(parts) => {
                for p in parts {
                    out.extend(p.enumerate(k));
                }
            }
            SetExpr::Family(f) => {
                let mut m = f.scheme.first();
                let mut empty_run = 0;
                while out.len() < k && empty_run < 64 {
                    let pts = f.piece(m).enumerate(k - out.len());
                    if pts.is_empty() {
                        empty_run += 1;
                    } else {
                        empty_run = 0;
                    }
                    out.extend(pts);
                    m += 1;
                }
            }
            SetExpr::Image(..) => unreachable!("normal forms carry no images"),
        }
        out.sort();
        out.dedup();
        out
    }

    /// Validates every family reachable without expanding sequences.
    pub fn validate(&self, window: u64) -> Result<(), CbError> {
        match self.normalize() {
            SetExpr::Finite(_) => Ok(()),
            SetExpr::Union(parts) => parts.iter().try_for_each(|p| p.validate(window)),
            SetExpr::Family(f) => {
                f.validate(window)?;
                if let SetPieces::Constant(core) = &f.pieces {
                    core.validate(window)?;
                }
                Ok(())
            }
            SetExpr::Image(..) => unreachable!("normal forms carry no images"),
        }
    }
}
