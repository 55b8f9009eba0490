//! The element `f = [f₁, t]`, the diagonal trick that writes its powers as two
//! commutators, and Mather's packing of commutator sequences into a finite
//! generating set one rank higher.

mod diagonal;
mod mather;
mod theorem;

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cbset::{CbError, Cardinality, Direction};
use crate::gpl::{GplError, GplMap, MapFamily, MapPieces, Piece, Word, DEFAULT_FUEL};
use crate::grouplab::{self, GroupError};
use crate::plcore::{bump, ConjugationScheme, Interval, PlError, PlMap};
use crate::rational::{format_rational, q, Rational};
use crate::sample;

pub use diagonal::{
    diagonal_trick, ConstructionResolver, DiagonalData, DiagonalEntry, DiagonalReport, DiagonalSequence,
};
pub use mather::{
    mather_commutators, mather_setup, minimal_m0, t_closed_form, CommutatorCheck, CommutatorReport, MatherData,
    MatherParams,
};
pub use theorem::{theorem_a_report, Pipeline, RatioRow, TheoremAReport, MATHER_CHECK};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("L_n(f1^{k}) = {found}, expected {expected}")]
    CertificateFailed { k: u64, expected: String, found: String },
    #[error("identity failed: {0}")]
    IdentityFailed(String),
    #[error("disjointness failed for {what}{}", .m.map(|m| format!(" at m = {m}")).unwrap_or_default())]
    DisjointnessFailed { what: String, m: Option<u64> },
    #[error("H_{m} has {count} letters, above the bound {bound}")]
    BoundExceeded { m: u64, count: usize, bound: usize },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Gpl(#[from] GplError),
    #[error(transparent)]
    Pl(#[from] PlError),
    #[error(transparent)]
    Sets(#[from] CbError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// How the diagonal-trick exponent `i_m` depends on `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum IndexRule {
    /// `i_m = m²`; `k_m/(i_m+1) → 0`.
    #[default]
    Square,
    /// `i_m = m`; the ratio stays bounded, so this only exercises the pipeline.
    Linear,
}

impl IndexRule {
    pub fn index(self, m: u64) -> u64 {
        match self {
            IndexRule::Square => m * m,
            IndexRule::Linear => m,
        }
    }
}

/// Every parameter of the pipeline, as one serializable document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionConfig {
    /// Where `f₁` lives.
    pub interval: Interval,
    /// Pushes `interval` off itself.
    pub t: PlMap,
    /// Pushes the hull of `supp f₁ ∪ supp t` off itself.
    pub h: PlMap,
    pub mather: MatherParams,
    pub index: IndexRule,
    pub samples: usize,
    pub seed: u64,
}

impl Default for ConstructionConfig {
    fn default() -> Self {
        ConstructionConfig {
            interval: Interval::new(q(64, 128), q(65, 128)),
            t: bump(&q(63, 128), &q(1, 2), &q(65, 128), &q(68, 128), &q(2, 128)).expect("valid bump"),
            h: bump(&q(3, 8), &q(63, 128), &q(68, 128), &q(5, 8), &q(6, 128)).expect("valid bump"),
            mather: MatherParams::default(),
            index: IndexRule::Square,
            samples: 500,
            seed: 0x5eed,
        }
    }
}

/// An endpoint-fixing map of `[lo, hi]` lying below the identity whose break
/// set has rank `n`: a single PL dip for `n = 0`, otherwise copies of the
/// rank `n−1` map accumulating at the midpoint from above.
pub fn perturbation(n: usize, lo: &Rational, hi: &Rational) -> GplMap {
    let width = hi - lo;
    if n == 0 {
        let p = PlMap::new(vec![
            (lo.clone(), lo.clone()),
            (lo + &width / q(2, 1), lo + &width / q(4, 1)),
            (hi.clone(), hi.clone()),
        ])
        .expect("monotone by construction");
        return GplMap::from_pl(p);
    }
    let mid = (lo + hi) / q(2, 1);
    let w = &width / q(2, 1);
    let toward_mid = PlMap::new(vec![(mid.clone(), mid.clone()), (hi.clone(), &mid + &w / q(2, 1))])
        .expect("monotone by construction");
    let core_hull = Interval::new(&mid + &w * q(5, 8), &mid + &w * q(7, 8));
    let core = perturbation(n - 1, &core_hull.lo, &core_hull.hi);
    let family = MapFamily {
        limit: mid,
        direction: Direction::Above,
        scheme: ConjugationScheme::new(toward_mid, PlMap::identity(), 0, 1),
        core_hull,
        pieces: MapPieces::Constant(Arc::new(Piece::from(core))),
        cofinal: true,
    };
    GplMap::new(PlMap::identity(), vec![family]).expect("nested families are valid by construction")
}

/// `x₀ = c + δ`, `x₁ = c + 2δ` for `I = [c, d]`, `δ = (d − c)/4`.
pub fn fundamental_points(interval: &Interval) -> (Rational, Rational) {
    let delta = interval.width() / q(4, 1);
    (&interval.lo + &delta, &interval.lo + &delta * q(2, 1))
}

/// `f₁ = S ∘ φ`: `S` sends `x₀ ↦ x₁`, is a translation on `[x₀, x₁]` and
/// affine on the two ramps of `I`; `φ` is [`perturbation`]`(n)` on
/// `[x₀, x₁]`.
pub fn build_f1(n: usize, interval: &Interval) -> Result<GplMap, ConstructionError> {
    let (c, d) = (&interval.lo, &interval.hi);
    if !(*c > Rational::zero() && c < d && *d < Rational::one()) {
        return Err(ConstructionError::InvalidParameters(format!("{interval:?} is not inside (0,1)")));
    }
    let (x0, x1) = fundamental_points(interval);
    let delta = &x1 - &x0;
    let scaffold = PlMap::new(vec![
        (c.clone(), c.clone()),
        (x0.clone(), x1.clone()),
        (x1.clone(), &x1 + &delta),
        (d.clone(), d.clone()),
    ])?;
    Ok(perturbation(n, &x0, &x1).pre_compose_pl(&scaffold))
}

/// `f₁`, `t`, `f = [f₁, t]` and the Mather parameters, with every defining
/// property checked.
#[derive(Debug, Clone)]
pub struct TheoremASetup {
    pub n: usize,
    pub interval: Interval,
    pub x0: Rational,
    pub x1: Rational,
    pub f1: GplMap,
    pub t: PlMap,
    pub f: Word,
    pub mather: MatherParams,
    pub m0: u64,
}

impl TheoremASetup {
    pub fn new(n: usize, config: &ConstructionConfig) -> Result<Self, ConstructionError> {
        let interval = config.interval.clone();
        let f1 = build_f1(n, &interval)?;
        let (x0, x1) = fundamental_points(&interval);
        let bad = |msg: String| Err(ConstructionError::InvalidParameters(msg));

        match f1.support_hull() {
            Some(s) if interval.contains_interval(&s) => {}
            s => return bad(format!("supp f1 = {s:?} is not inside {interval:?}")),
        }
        if f1.evaluate(&x0)? != x1 {
            return bad("f1(x0) != x1".into());
        }
        for ramp in [Interval::new(interval.lo.clone(), x0.clone()), Interval::new(x1.clone(), interval.hi.clone())] {
            if !f1.restrict_pl(&ramp, DEFAULT_FUEL)?.breakpoints().is_empty() {
                return bad(format!("f1 bends inside {ramp:?}"));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        for _ in 0..config.samples {
            let x = sample::unit_rational(&mut rng, 1 << 16);
            if f1.evaluate(&x)? < x {
                return bad(format!("f1({}) < {}", format_rational(&x), format_rational(&x)));
            }
        }

        let t = config.t.clone();
        if !t.eta().in_kernel() {
            return bad("t is not in the kernel of eta".into());
        }
        if !t.dominates_identity() {
            return bad("t < id somewhere".into());
        }
        if !t.image(&interval).is_disjoint(&interval) {
            return Err(ConstructionError::DisjointnessFailed { what: "t(I) and I".into(), m: None });
        }
        let f2 = f1.conjugate_by(&t);
        match (f1.support_hull(), f2.support_hull()) {
            (Some(a), Some(b)) if a.is_disjoint(&b) => {}
            _ => return Err(ConstructionError::DisjointnessFailed { what: "supp f1 and supp t f1 t^-1".into(), m: None }),
        }

        let mather = config.mather.clone();
        let m0 = minimal_m0(&mather.alpha, &(&mather.b - &mather.a));
        Ok(TheoremASetup {
            n,
            interval,
            x0,
            x1,
            f1,
            t,
            f: Word::commutator(&Word::gen("f1"), &Word::gen("t")),
            mather,
            m0,
        })
    }

    /// `f = f₁ ∘ (t f₁⁻¹ t⁻¹)` as a single map.
    pub fn f_map(&self) -> Result<GplMap, ConstructionError> {
        Ok(self.f1.commutator(&GplMap::from_pl(self.t.clone()))?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub n: usize,
    /// `L_n(f₁^k)` for `k = 1..=K`.
    pub lengths: Vec<u64>,
    pub l_n: u64,
    #[serde(with = "crate::rational")]
    pub fekete_estimate: Rational,
}

/// Checks `L_n(f₁^k) = k·L_n(f₁)` for `k ≤ K` and that `L_n(f₁) > 0`.
pub fn certificate_undistorted(f1: &GplMap, n: usize, k_max: u64) -> Result<CertificateReport, ConstructionError> {
    let base = finite_l_n(f1, n, 1)?;
    if base == 0 {
        return Err(ConstructionError::CertificateFailed { k: 1, expected: "> 0".into(), found: "0".into() });
    }
    let mut lengths = vec![base];
    let mut power = f1.clone();
    for k in 2..=k_max {
        power = power.compose(f1)?;
        let l = finite_l_n(&power, n, k)?;
        if l != k * base {
            return Err(ConstructionError::CertificateFailed {
                k,
                expected: (k * base).to_string(),
                found: l.to_string(),
            });
        }
        lengths.push(l);
    }
    let fekete_estimate = grouplab::fekete_estimate(&lengths)?;
    Ok(CertificateReport { n, lengths, l_n: base, fekete_estimate })
}

fn finite_l_n(g: &GplMap, n: usize, k: u64) -> Result<u64, ConstructionError> {
    match g.l_n(n)? {
        Cardinality::Finite(c) => Ok(c as u64),
        Cardinality::Infinite => Err(ConstructionError::CertificateFailed {
            k,
            expected: "a finite count".into(),
            found: "infinite".into(),
        }),
    }
}

#[cfg(test)]
mod tests;
