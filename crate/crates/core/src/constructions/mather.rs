use std::sync::Arc;

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ConstructionError;
use crate::cbset::{Direction, RankResult};
use crate::gpl::{CompareReport, Environment, GplMap, MapFamily, MapPieces, PieceSequence, Word};
use crate::plcore::{bump, mather_h, mather_r, ConjugationScheme, Interval, PlMap};
use crate::rational::{pow2, q, Rational};

/// `0 < a′ < a < 1/2 < b < b′ < 1`, `b′ − a′ < 1/2` and `b + α < b′`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatherParams {
    #[serde(with = "crate::rational")]
    pub a: Rational,
    #[serde(with = "crate::rational")]
    pub b: Rational,
    #[serde(with = "crate::rational")]
    pub a_prime: Rational,
    #[serde(with = "crate::rational")]
    pub b_prime: Rational,
    #[serde(with = "crate::rational")]
    pub alpha: Rational,
}

impl Default for MatherParams {
    fn default() -> Self {
        MatherParams { a: q(3, 8), b: q(5, 8), a_prime: q(5, 16), b_prime: q(3, 4), alpha: q(1, 16) }
    }
}

impl MatherParams {
    fn check(&self) -> Result<(), ConstructionError> {
        let half = q(1, 2);
        let ordered = self.a_prime > Rational::zero()
            && self.a_prime < self.a
            && self.a < half
            && half < self.b
            && self.b < self.b_prime
            && self.b_prime < Rational::one();
        if !ordered {
            return Err(ConstructionError::InvalidParameters("need 0 < a' < a < 1/2 < b < b' < 1".into()));
        }
        if &self.b_prime - &self.a_prime >= half {
            return Err(ConstructionError::InvalidParameters("need b' - a' < 1/2".into()));
        }
        if self.alpha <= Rational::zero() || &self.alpha + &self.b >= Rational::one() {
            return Err(ConstructionError::InvalidParameters("need 0 < alpha < 1 - b".into()));
        }
        Ok(())
    }
}

/// Least `m₀ ≥ 0` with `2^m₀·α > width`.
pub fn minimal_m0(alpha: &Rational, width: &Rational) -> u64 {
    assert!(*alpha > Rational::zero(), "alpha must be positive");
    let mut m0 = 0;
    while pow2(m0 as i64) * alpha <= *width {
        m0 += 1;
    }
    m0
}

/// `x/4^m + Σ_{k=m+2}^{2m+1} 2^{-k}`, the value of `r^{-m}h^{-m}(x)` for `x`
/// in `[a′, b′]`.
pub fn t_closed_form(x: &Rational, m: u64) -> Rational {
    let m = m as i64;
    let tail: Rational = (m + 2..=2 * m + 1).map(|k| pow2(-k)).sum();
    x * pow2(-2 * m) + tail
}

/// `h`, `r`, `f̃`, the schemes behind `F_m`, `T_m`, `T′_m`, and the two
/// generalized maps `F̃`, `G̃` built from the piece sequences.
#[derive(Debug, Clone)]
pub struct MatherData {
    pub params: MatherParams,
    pub m0: u64,
    pub h: PlMap,
    pub r: PlMap,
    pub f_tilde: PlMap,
    /// `m ↦ r^{-m}h^{-m}`.
    pub f_scheme: ConjugationScheme,
    /// `m ↦ r^{-m}h^{-m₀-m}`.
    pub t_scheme: ConjugationScheme,
    pub big_f: GplMap,
    pub big_g: GplMap,
    pub f_seq: Arc<dyn PieceSequence>,
    pub g_seq: Arc<dyn PieceSequence>,
    /// Largest `m` whose interval bookkeeping was verified.
    pub checked_up_to: u64,
    env: Environment,
}

/// Builds the data and checks the closed form of `T_m`, `T_{m+1} ∩ T_m = ∅`
/// and `T′_m ∩ F_m(T′_m) = ∅` for `1 ≤ m ≤ check_up_to`.
pub fn mather_setup(
    params: &MatherParams,
    f_seq: Arc<dyn PieceSequence>,
    g_seq: Arc<dyn PieceSequence>,
    check_up_to: u64,
) -> Result<MatherData, ConstructionError> {
    params.check()?;
    let MatherParams { a, b, a_prime, b_prime, alpha } = params;
    let h = mather_h(a_prime, b_prime)?;
    let r = mather_r();
    let f_tilde = bump(a_prime, a, b, b_prime, alpha)?;
    if !f_tilde.eta().in_kernel() || !f_tilde.dominates_identity() {
        return Err(ConstructionError::InvalidParameters("f~ must be in ker eta and above the identity".into()));
    }
    let m0 = minimal_m0(alpha, &(b - a));
    let f_scheme = ConjugationScheme::new(r.invert(), h.invert(), 0, 1);
    let t_scheme = ConjugationScheme::new(r.invert(), h.invert(), m0, 1);

    let family = |seq: &Arc<dyn PieceSequence>| MapFamily {
        limit: Rational::zero(),
        direction: Direction::Above,
        scheme: t_scheme.clone(),
        core_hull: Interval::new(a.clone(), b.clone()),
        pieces: MapPieces::Sequence(seq.clone()),
        cofinal: true,
    };
    let big_f = GplMap::new(PlMap::identity(), vec![family(&f_seq)])?;
    let big_g = GplMap::new(PlMap::identity(), vec![family(&g_seq)])?;

    let mut env = Environment::new();
    env.bind("F", big_f.clone());
    env.bind("G", big_g.clone());
    env.bind("h", h.clone());
    env.bind("r", r.clone());
    env.bind("ft", f_tilde.clone());

    let data = MatherData {
        params: params.clone(),
        m0,
        h,
        r,
        f_tilde,
        f_scheme,
        t_scheme,
        big_f,
        big_g,
        f_seq,
        g_seq,
        checked_up_to: check_up_to,
        env,
    };
    for m in 1..=check_up_to {
        data.check_intervals(m)?;
    }
    Ok(data)
}

impl MatherData {
    /// `T_m = r^{-m}h^{-m}[a′, b′] ⊇ supp F_m`.
    pub fn t_interval(&self, m: u64) -> Interval {
        self.f_scheme.image(m, &Interval::new(self.params.a_prime.clone(), self.params.b_prime.clone()))
    }

    /// `T′_m = r^{-m}h^{-m₀-m}[a, b]`, the `m`-th hull of `F̃` and `G̃`.
    pub fn t_prime(&self, m: u64) -> Interval {
        self.t_scheme.image(m, &Interval::new(self.params.a.clone(), self.params.b.clone()))
    }

    /// `F_m(x)`, evaluated through the scheme.
    pub fn f_m(&self, m: u64, x: &Rational) -> Rational {
        let y = self.f_scheme.apply_inverse(m, x);
        self.f_scheme.apply(m, &self.f_tilde.evaluate(&y).expect("in [0,1]"))
    }

    fn check_intervals(&self, m: u64) -> Result<(), ConstructionError> {
        let t = self.t_interval(m);
        let closed = Interval::new(
            t_closed_form(&self.params.a_prime, m),
            t_closed_form(&self.params.b_prime, m),
        );
        if t != closed {
            return Err(ConstructionError::IdentityFailed(format!("T_{m} = {t:?}, closed form {closed:?}")));
        }
        if self.t_interval(m + 1).hi >= t.lo {
            return Err(ConstructionError::DisjointnessFailed { what: "T_(m+1) and T_m".into(), m: Some(m) });
        }
        // F_m ≥ id, so disjointness is one comparison
        let tp = self.t_prime(m);
        if self.f_m(m, &tp.lo) <= tp.hi {
            return Err(ConstructionError::DisjointnessFailed { what: "T'_m and F_m(T'_m)".into(), m: Some(m) });
        }
        if !t.contains_interval(&tp) {
            return Err(ConstructionError::IdentityFailed(format!("T'_{m} is not inside T_{m}")));
        }
        Ok(())
    }

    /// `r^{-m}h^{-m} f̃ h^m r^m`.
    pub fn f_m_word(&self, m: u64) -> Word {
        let c = Word::power_of("r", -(m as i64)).mul(&Word::power_of("h", -(m as i64)));
        Word::gen("ft").conjugated_by(&c)
    }

    /// `h^{m₀+m} r^m`, which carries `T′_m` back onto `[a, b]`.
    fn back_word(&self, m: u64) -> Word {
        Word::power_of("h", (self.m0 + m) as i64).mul(&Word::power_of("r", m as i64))
    }

    /// `H_m = h^{m₀+m} r^m A_m B_m C_m r^{-m} h^{-m₀-m}` and the number of
    /// letters in the product before free reduction.
    pub fn h_m_word(&self, m: u64) -> (Word, usize) {
        let fm = self.f_m_word(m);
        let (big_f, big_g) = (Word::gen("F"), Word::gen("G"));
        let fg_inv = big_f.inverse().mul(&big_g.inverse());
        let a = Word::commutator(&big_f, &fm);
        let b = Word::commutator(&big_g, &fm);
        let c = Word::commutator(&fg_inv, &fm);
        let back = self.back_word(m);
        let raw = |x: &Word, y: &Word| 2 * (x.len() + y.len());
        let unreduced = 2 * back.len() + raw(&big_f, &fm) + raw(&big_g, &fm) + raw(&fg_inv, &fm);
        let abc = a.mul(&b).mul(&c);
        (abc.conjugated_by(&back), unreduced)
    }

    /// The region on which `H_m` is compared with `[f_m, g_m]`: everything
    /// that `r^{-m}h^{-m₀-m}` sends above `T_{m+1}`, so only hulls up to
    /// `m + 1` are touched. It contains `[a, b] ⊇ supp [f_m, g_m]`.
    pub fn comparison_window(&self, m: u64) -> Interval {
        let lo = self.t_scheme.apply_inverse(m, &self.t_interval(m + 1).lo);
        Interval::new(lo, Rational::one())
    }

    pub fn environment(&self) -> &Environment {
        &self.env
    }

    /// Rank of `BP(F̃)`.
    pub fn big_f_rank(&self) -> Result<RankResult, ConstructionError> {
        Ok(self.big_f.rank()?)
    }

    /// Compares `H_m` with `[f_m, g_m]` exactly on
    /// [`comparison_window`](Self::comparison_window), then at `samples`
    /// seeded random points of the window.
    pub fn verify_commutator(&self, m: u64, samples: usize, seed: u64) -> Result<CommutatorCheck, ConstructionError> {
        let (hm, _) = self.h_m_word(m);
        let mut env = self.env.clone();
        env.bind("fm", self.f_seq.piece(m).as_ref().clone().into_gpl());
        env.bind("gm", self.g_seq.piece(m).as_ref().clone().into_gpl());
        let rhs = Word::commutator(&Word::gen("fm"), &Word::gen("gm"));
        let window = self.comparison_window(m);
        let compare = env.compare_on(&hm, &rhs, &window, 1 << 12)?;
        if let Some(cell) = &compare.mismatch {
            return Err(ConstructionError::IdentityFailed(format!("H_{m} != [f_m, g_m] on {cell:?}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ m);
        for _ in 0..samples {
            let x = &window.lo + window.width() * crate::sample::unit_rational(&mut rng, 1 << 20);
            if env.evaluate(&hm, &x)? != env.evaluate(&rhs, &x)? {
                return Err(ConstructionError::IdentityFailed(format!(
                    "H_{m} != [f_m, g_m] at {}",
                    crate::rational::format_rational(&x)
                )));
            }
        }
        Ok(CommutatorCheck { m, window, compare, samples })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutatorCheck {
    pub m: u64,
    pub window: Interval,
    pub compare: CompareReport,
    pub samples: usize,
}

impl CommutatorCheck {
    /// No neighbourhood had to be cut out, so the comparison was a complete
    /// PL equality on the window.
    pub fn is_exact(&self) -> bool {
        self.compare.excluded.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommutatorReport {
    pub m: u64,
    /// `H_m`, freely reduced, in generator notation.
    pub word: String,
    pub letters: usize,
    pub unreduced_letters: usize,
    /// `28m + 2m₀ + 14`.
    pub bound: usize,
}

/// Builds `H_m` and checks its reduced length against `28m + 2m₀ + 14`.
pub fn mather_commutators(data: &MatherData, m: u64) -> Result<CommutatorReport, ConstructionError> {
    if m == 0 {
        return Err(ConstructionError::InvalidParameters("H_m needs m >= 1".into()));
    }
    let (word, unreduced) = data.h_m_word(m);
    let bound = (28 * m + 2 * data.m0 + 14) as usize;
    if word.len() > bound {
        return Err(ConstructionError::BoundExceeded { m, count: word.len(), bound });
    }
    Ok(CommutatorReport { m, word: word.to_string(), letters: word.len(), unreduced_letters: unreduced, bound })
}
