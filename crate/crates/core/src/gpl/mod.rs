//! Generalized PL homeomorphisms: a PL scaffold applied after a perturbation
//! made of accumulating families of lower-rank pieces.
//!
//! A [`GplMap`] denotes `F = S ∘ P`, where `S` is the scaffold and `P` is the
//! identity outside the family hulls. On hull `m` of a family, `P` is
//! `c_m ∘ core_m ∘ c_m⁻¹` with `c_m` the family's conjugation scheme and
//! `core_m` a PL or generalized piece supported in the core hull.
//!
//! Inversion, conjugation and composition with PL maps are closed. So is the
//! product of two maps whose perturbations live on interior-disjoint
//! envelopes; anything else has to go through [`Word`].

mod doc;
mod restrict;
mod sequence;
mod word;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::cbset::{AccumFamily, Cardinality, CbError, Direction, RankResult, SetExpr, SetPieces};
use crate::plcore::{ConjugationScheme, Interval, PlError, PlGraph, PlMap};
use crate::rational::{format_rational, Rational};

pub use doc::{FamilyDoc, GplDoc, PieceDoc, PiecesDoc};
pub use restrict::glue;
pub use sequence::{
    resolve_map, BreaksetSequence, InverseSequence, MapResolver, NoMapSequences, PieceCache,
    PieceSequence, SetsFromMaps,
};
pub use word::{CompareReport, Environment, Letter, Word};

/// Hull search budget used when no other is given.
pub const DEFAULT_FUEL: usize = 10_000;

/// Number of family members inspected by [`GplMap::new`].
pub const VALIDATION_WINDOW: u64 = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GplError {
    #[error("{0} is outside [0,1]")]
    OutOfRange(String),
    #[error("not piecewise linear near {}", format_rational(.point))]
    NotPiecewiseLinearHere { point: Rational },
    #[error("more than {0} hulls needed")]
    FuelExhausted(usize),
    #[error("perturbations overlap: {0}")]
    OverlappingFamilies(String),
    #[error("malformed map: {0}")]
    Malformed(String),
    #[error("generator `{0}` is not bound")]
    UnboundGenerator(String),
    #[error(transparent)]
    Sets(#[from] CbError),
    #[error(transparent)]
    Pl(#[from] PlError),
}

/// A core piece: PL or generalized.
#[derive(Debug, Clone, PartialEq)]
pub enum Piece {
    Pl(PlMap),
    Gpl(GplMap),
}

impl Piece {
    pub fn evaluate(&self, x: &Rational) -> Result<Rational, GplError> {
        match self {
            Piece::Pl(p) => Ok(p.eval_unchecked(x)),
            Piece::Gpl(g) => g.evaluate(x),
        }
    }

    pub fn evaluate_inverse(&self, y: &Rational) -> Result<Rational, GplError> {
        match self {
            Piece::Pl(p) => Ok(p.eval_inverse_unchecked(y)),
            Piece::Gpl(g) => g.evaluate_inverse(y),
        }
    }

    pub fn inverse(&self) -> Piece {
        match self {
            Piece::Pl(p) => Piece::Pl(p.invert()),
            Piece::Gpl(g) => Piece::Gpl(g.inverse()),
        }
    }

    pub fn breakset(&self) -> Result<SetExpr, GplError> {
        match self {
            Piece::Pl(p) => Ok(SetExpr::Finite(p.breakpoints())),
            Piece::Gpl(g) => g.breakset(),
        }
    }

    pub fn support_hull(&self) -> Option<Interval> {
        match self {
            Piece::Pl(p) => p.support_hull(),
            Piece::Gpl(g) => g.support_hull(),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Piece::Pl(p) => p.is_identity(),
            Piece::Gpl(g) => g.is_identity(),
        }
    }

    pub(crate) fn restrict_with(&self, j: &Interval, fuel: &mut usize) -> Result<PlGraph, GplError> {
        match self {
            Piece::Pl(p) => Ok(p.restrict(j)),
            Piece::Gpl(g) => g.restrict_with(j, fuel),
        }
    }

    pub fn truncate(&self, depth: u64) -> PlMap {
        match self {
            Piece::Pl(p) => p.clone(),
            Piece::Gpl(g) => g.truncate(depth),
        }
    }

    pub fn into_gpl(self) -> GplMap {
        match self {
            Piece::Pl(p) => GplMap::from_pl(p),
            Piece::Gpl(g) => g,
        }
    }
}

impl From<PlMap> for Piece {
    fn from(p: PlMap) -> Self {
        Piece::Pl(p)
    }
}

impl From<GplMap> for Piece {
    fn from(g: GplMap) -> Self {
        match g.as_pl() {
            Some(p) => Piece::Pl(p.clone()),
            None => Piece::Gpl(g),
        }
    }
}

#[derive(Clone)]
pub enum MapPieces {
    Constant(Arc<Piece>),
    Sequence(Arc<dyn PieceSequence>),
}

impl fmt::Debug for MapPieces {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapPieces::Constant(p) => f.debug_tuple("Constant").field(p).finish(),
            MapPieces::Sequence(s) => f.debug_tuple("Sequence").field(&s.descriptor()).finish(),
        }
    }
}

impl PartialEq for MapPieces {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (MapPieces::Constant(a), MapPieces::Constant(b)) => a == b,
            (MapPieces::Sequence(a), MapPieces::Sequence(b)) => a.descriptor() == b.descriptor(),
            _ => false,
        }
    }
}

impl MapPieces {
    pub fn core(&self, m: u64) -> Arc<Piece> {
        match self {
            MapPieces::Constant(p) => p.clone(),
            MapPieces::Sequence(s) => s.piece(m),
        }
    }

    fn inverted(&self) -> MapPieces {
        match self {
            MapPieces::Constant(p) => MapPieces::Constant(Arc::new(p.inverse())),
            MapPieces::Sequence(s) => MapPieces::Sequence(InverseSequence::wrap(s.clone())),
        }
    }

    fn breaksets(&self) -> Result<SetPieces, GplError> {
        Ok(match self {
            MapPieces::Constant(p) => SetPieces::Constant(Box::new(p.breakset()?)),
            MapPieces::Sequence(s) => SetPieces::Sequence {
                source: Arc::new(BreaksetSequence::new(s.clone())),
                derivations: 0,
            },
        })
    }
}

/// Pieces `c_m ∘ core_m ∘ c_m⁻¹` on the hulls `c_m(core_hull)`, accumulating
/// at `limit`.
#[derive(Debug, Clone, PartialEq)]
pub struct MapFamily {
    pub limit: Rational,
    pub direction: Direction,
    pub scheme: ConjugationScheme,
    pub core_hull: Interval,
    pub pieces: MapPieces,
    /// Infinitely many pieces are not the identity.
    pub cofinal: bool,
}

impl MapFamily {
    pub fn hull(&self, m: u64) -> Interval {
        self.scheme.image(m, &self.core_hull)
    }

    pub fn envelope(&self) -> Interval {
        let first = self.hull(self.scheme.first());
        match self.direction {
            Direction::Above => Interval::new(self.limit.clone(), first.hi),
            Direction::Below => Interval::new(first.lo, self.limit.clone()),
        }
    }

    /// The family after the change of coordinates `g`.
    pub fn transported(&self, g: &PlMap) -> MapFamily {
        if g.is_identity() {
            return self.clone();
        }
        MapFamily {
            limit: g.eval_unchecked(&self.limit),
            direction: self.direction,
            scheme: self.scheme.transported(g),
            core_hull: self.core_hull.clone(),
            pieces: self.pieces.clone(),
            cofinal: self.cofinal,
        }
    }

    fn inverted(&self) -> MapFamily {
        MapFamily { pieces: self.pieces.inverted(), ..self.clone() }
    }

    /// Index of the hull containing `x`, or `None` if `x` falls in a gap or
    /// outside the envelope.
    pub fn locate(&self, x: &Rational, fuel: usize) -> Result<Option<u64>, GplError> {
        if *x == self.limit || !self.envelope().contains(x) {
            return Ok(None);
        }
        let first = self.scheme.first();
        for m in first..first + fuel as u64 {
            let y = self.scheme.apply_inverse(m, x);
            if self.core_hull.contains(&y) {
                return Ok(Some(m));
            }
            let passed = match self.direction {
                Direction::Above => y > self.core_hull.hi,
                Direction::Below => y < self.core_hull.lo,
            };
            if passed {
                return Ok(None);
            }
        }
        Err(GplError::FuelExhausted(fuel))
    }

    fn apply(&self, m: u64, x: &Rational, inverse: bool) -> Result<Rational, GplError> {
        let core = self.pieces.core(m);
        let y = self.scheme.apply_inverse(m, x);
        let z = if inverse { core.evaluate_inverse(&y)? } else { core.evaluate(&y)? };
        Ok(self.scheme.apply(m, &z))
    }

    /// Graph of the glued piece `m` on `k ⊆ hull(m)`.
    pub(crate) fn piece_graph(&self, m: u64, k: &Interval, fuel: &mut usize) -> Result<PlGraph, GplError> {
        let down = self.scheme.inverse_graph(m, k);
        let core = match self.pieces.core(m).restrict_with(&down.range(), fuel) {
            Err(GplError::NotPiecewiseLinearHere { point }) => {
                return Err(GplError::NotPiecewiseLinearHere { point: self.scheme.apply(m, &point) });
            }
            r => r?,
        };
        let up = self.scheme.graph(m, &core.range());
        Ok(up.after(&core.after(&down)?)?)
    }

    pub fn validate(&self, window: u64) -> Result<(), GplError> {
        self.as_set_family(SetPieces::Constant(Box::new(SetExpr::empty())), false)
            .validate(window)
            .map_err(|e| GplError::Malformed(e.to_string()))?;
        let first = self.scheme.first();
        let bare = ConjugationScheme::new(
            self.scheme.outer().clone(),
            self.scheme.inner().clone(),
            self.scheme.offset(),
            first,
        );
        for m in first..first + window {
            if !bare.graph(m, &self.core_hull).breakpoints().is_empty() {
                return Err(GplError::Malformed(format!("conjugator {m} bends inside the core hull")));
            }
        }
        for m in first..first + window.min(3) {
            let core = self.pieces.core(m);
            if let Some(s) = core.support_hull() {
                if !self.core_hull.contains_interval(&s) {
                    return Err(GplError::Malformed(format!(
                        "piece {m} is supported on {s:?}, outside {:?}",
                        self.core_hull
                    )));
                }
            }
        }
        Ok(())
    }

    fn as_set_family(&self, pieces: SetPieces, cofinal_nonempty: bool) -> AccumFamily {
        AccumFamily {
            limit: self.limit.clone(),
            direction: self.direction,
            scheme: self.scheme.clone(),
            core_hull: self.core_hull.clone(),
            pieces,
            cofinal_nonempty,
        }
    }
}

/// `S ∘ P`; see the module docs.
#[derive(Debug, Clone, PartialEq)]
pub struct GplMap {
    scaffold: PlMap,
    families: Vec<MapFamily>,
}

impl GplMap {
    pub fn identity() -> Self {
        GplMap { scaffold: PlMap::identity(), families: Vec::new() }
    }

    pub fn from_pl(p: PlMap) -> Self {
        GplMap { scaffold: p, families: Vec::new() }
    }

    /// Validates the families and their mutual disjointness.
    pub fn new(scaffold: PlMap, families: Vec<MapFamily>) -> Result<Self, GplError> {
        for f in &families {
            f.validate(VALIDATION_WINDOW)?;
        }
        Self::assemble(scaffold, families)
    }

    fn assemble(scaffold: PlMap, mut families: Vec<MapFamily>) -> Result<Self, GplError> {
        families.sort_by(|a, b| a.envelope().lo.cmp(&b.envelope().lo));
        for w in families.windows(2) {
            let (a, b) = (w[0].envelope(), w[1].envelope());
            if !a.interiors_disjoint(&b) {
                return Err(GplError::OverlappingFamilies(format!("{a:?} and {b:?}")));
            }
        }
        Ok(GplMap { scaffold, families })
    }

    pub fn scaffold(&self) -> &PlMap {
        &self.scaffold
    }

    pub fn families(&self) -> &[MapFamily] {
        &self.families
    }

    pub fn as_pl(&self) -> Option<&PlMap> {
        if self.families.is_empty() {
            Some(&self.scaffold)
        } else {
            None
        }
    }

    pub fn is_identity(&self) -> bool {
        self.families.is_empty() && self.scaffold.is_identity()
    }

    fn check_unit(x: &Rational) -> Result<(), GplError> {
        if *x < Rational::from_integer(0.into()) || *x > Rational::from_integer(1.into()) {
            return Err(GplError::OutOfRange(format_rational(x)));
        }
        Ok(())
    }

    fn perturb(&self, x: &Rational, inverse: bool) -> Result<Rational, GplError> {
        for fam in &self.families {
            if let Some(m) = fam.locate(x, DEFAULT_FUEL)? {
                return fam.apply(m, x, inverse);
            }
        }
        Ok(x.clone())
    }

    pub fn evaluate(&self, x: &Rational) -> Result<Rational, GplError> {
        Self::check_unit(x)?;
        let p = self.perturb(x, false)?;
        Ok(self.scaffold.eval_unchecked(&p))
    }

    pub fn evaluate_inverse(&self, y: &Rational) -> Result<Rational, GplError> {
        Self::check_unit(y)?;
        let p = self.scaffold.eval_inverse_unchecked(y);
        self.perturb(&p, true)
    }

    /// `S⁻¹ ∘ (S P⁻¹ S⁻¹)`.
    pub fn inverse(&self) -> GplMap {
        GplMap {
            scaffold: self.scaffold.invert(),
            families: self.families.iter().map(|f| f.inverted().transported(&self.scaffold)).collect(),
        }
    }

    /// `g ∘ self ∘ g⁻¹`.
    pub fn conjugate_by(&self, g: &PlMap) -> GplMap {
        let mut families: Vec<MapFamily> = self.families.iter().map(|f| f.transported(g)).collect();
        families.sort_by(|a, b| a.envelope().lo.cmp(&b.envelope().lo));
        GplMap { scaffold: self.scaffold.conjugate_by(g), families }
    }

    /// `g ∘ self`.
    pub fn pre_compose_pl(&self, g: &PlMap) -> GplMap {
        GplMap { scaffold: g.compose(&self.scaffold), families: self.families.clone() }
    }

    /// `self ∘ g`.
    pub fn compose_pl(&self, g: &PlMap) -> GplMap {
        let ginv = g.invert();
        let mut families: Vec<MapFamily> = self.families.iter().map(|f| f.transported(&ginv)).collect();
        families.sort_by(|a, b| a.envelope().lo.cmp(&b.envelope().lo));
        GplMap { scaffold: self.scaffold.compose(g), families }
    }

    /// `self ∘ other`, when the perturbations stay apart.
    pub fn compose(&self, other: &GplMap) -> Result<GplMap, GplError> {
        let back = other.scaffold.invert();
        let mut families: Vec<MapFamily> = self.families.iter().map(|f| f.transported(&back)).collect();
        families.extend(other.families.iter().cloned());
        Self::assemble(self.scaffold.compose(&other.scaffold), families)
    }

    pub fn power(&self, k: i64) -> Result<GplMap, GplError> {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = GplMap::identity();
        for _ in 0..k.unsigned_abs() {
            acc = acc.compose(&base)?;
        }
        Ok(acc)
    }

    /// `self ∘ g ∘ self⁻¹ ∘ g⁻¹`.
    pub fn commutator(&self, g: &GplMap) -> Result<GplMap, GplError> {
        self.compose(g)?.compose(&self.inverse())?.compose(&g.inverse())
    }

    /// Hull of the scaffold support and the family envelopes.
    pub fn support_hull(&self) -> Option<Interval> {
        self.families
            .iter()
            .map(|f| f.envelope())
            .chain(self.scaffold.support_hull())
            .reduce(|a, b| a.hull(&b))
    }

    /// Break set: the families' break sets together with the genuine break
    /// points among `P⁻¹(BP(S))` and the points where a family transport
    /// bends inside its envelope.
    pub fn breakset(&self) -> Result<SetExpr, GplError> {
        let mut candidates = Vec::new();
        for b in self.scaffold.breakpoints() {
            candidates.push(self.perturb(&b, true)?);
        }
        for f in &self.families {
            let t = f.scheme.transport();
            let env = f.envelope();
            for b in t.breakpoints() {
                let e = t.eval_unchecked(&b);
                if env.lo < e && e < env.hi {
                    candidates.push(self.perturb(&e, true)?);
                    candidates.push(e);
                }
            }
        }
        candidates.sort();
        candidates.dedup();
        let mut points = Vec::new();
        for x in candidates {
            if self.is_break_point(&x)? {
                points.push(x);
            }
        }
        let mut parts = vec![SetExpr::finite(points)];
        for f in &self.families {
            parts.push(SetExpr::Family(f.as_set_family(f.pieces.breaksets()?, f.cofinal)));
        }
        Ok(SetExpr::Union(parts).normalize())
    }

    /// Whether the slope changes at `x`, decided on a small interval around
    /// it. Accumulation points count as breaks.
    pub fn is_break_point(&self, x: &Rational) -> Result<bool, GplError> {
        Self::check_unit(x)?;
        let zero = Rational::from_integer(0.into());
        let one = Rational::from_integer(1.into());
        if *x == zero || *x == one {
            return Ok(false);
        }
        for k in 4..64 {
            let d = crate::rational::pow2(-k);
            let j = Interval::new((x - &d).max(zero.clone()), (x + &d).min(one.clone()));
            match self.restrict_pl(&j, DEFAULT_FUEL) {
                Ok(g) => return Ok(g.breakpoints().contains(x)),
                Err(GplError::NotPiecewiseLinearHere { .. }) | Err(GplError::FuelExhausted(_)) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(true)
    }

    pub fn rank(&self) -> Result<RankResult, GplError> {
        Ok(self.breakset()?.rank()?)
    }

    /// `|BP(F)^(n)|`.
    pub fn l_n(&self, n: usize) -> Result<Cardinality, GplError> {
        Ok(self.breakset()?.nth_derived_cardinality(n)?)
    }

    /// The PL map equal to `self` on the first `depth` hulls of every family
    /// (recursively) and to the scaffold elsewhere.
    pub fn truncate(&self, depth: u64) -> PlMap {
        if self.families.is_empty() {
            return self.scaffold.clone();
        }
        let mut segments = Vec::new();
        for f in &self.families {
            let first = f.scheme.first();
            for m in first..first + depth {
                let hull = f.hull(m);
                let down = f.scheme.inverse_graph(m, &hull);
                let core = PlGraph::from_map(&f.pieces.core(m).truncate(depth), &down.range());
                let up = f.scheme.graph(m, &core.range());
                let g = up
                    .after(&core.after(&down).expect("ranges chain"))
                    .expect("ranges chain");
                segments.push(g);
            }
        }
        let unit = Interval::new(Rational::from_integer(0.into()), Rational::from_integer(1.into()));
        let p = glue(segments, &unit)
            .ok()
            .and_then(|g| g.to_map())
            .expect("hulls are disjoint and pieces fix their endpoints");
        self.scaffold.compose(&p)
    }

    pub fn slope_norm_truncated(&self, depth: u64) -> Rational {
        self.truncate(depth).slope_norm()
    }

    /// The restriction to `j` as a finite PL graph.
    pub fn restrict_pl(&self, j: &Interval, fuel: usize) -> Result<PlGraph, GplError> {
        let mut fuel = fuel;
        self.restrict_with(j, &mut fuel)
    }
}

impl From<PlMap> for GplMap {
    fn from(p: PlMap) -> Self {
        GplMap::from_pl(p)
    }
}
