use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{ConstructionConfig, ConstructionError, IndexRule, TheoremASetup};
use crate::cbset::SequenceDescriptor;
use crate::gpl::{Environment, GplMap, MapResolver, Piece, PieceCache, PieceSequence, Word};
use crate::plcore::{Interval, PlMap};

/// The four commutator entries of `f^{i+1} = [a_i, b_i][c_i, d_i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagonalEntry {
    /// `h^{-(i+1)} Δ_i(f₁) h^{i+1}`
    A,
    /// `h^{-(i+1)} Δ_i(t) h^{i+1}`
    B,
    /// `h`
    C,
    /// `h^{-(i+1)} f′ h^{i+1}`
    D,
}

/// `f₁`, `t`, `h` and `J`, with `h(J) ∩ J = ∅` checked.
#[derive(Debug, Clone)]
pub struct DiagonalData {
    pub n: usize,
    pub f1: GplMap,
    pub t: PlMap,
    pub h: PlMap,
    /// Hull of `supp f₁ ∪ supp t`, which contains `supp f`.
    pub j: Interval,
    pub f: GplMap,
}

impl DiagonalData {
    pub fn new(setup: &TheoremASetup, h: PlMap) -> Result<Self, ConstructionError> {
        let bad = |msg: &str| Err(ConstructionError::InvalidParameters(msg.into()));
        if !h.eta().in_kernel() {
            return bad("h is not in the kernel of eta");
        }
        if !h.dominates_identity() {
            return bad("h < id somewhere");
        }
        let (Some(s1), Some(st)) = (setup.f1.support_hull(), setup.t.support_hull()) else {
            return bad("f1 and t must be nontrivial");
        };
        let j = s1.hull(&st);
        if !h.image(&j).is_disjoint(&j) {
            return Err(ConstructionError::DisjointnessFailed { what: "h(J) and J".into(), m: None });
        }
        let f = setup.f_map()?;
        match f.support_hull() {
            Some(s) if j.contains_interval(&s) => {}
            _ => return bad("supp f is not inside J"),
        }
        Ok(DiagonalData { n: setup.n, f1: setup.f1.clone(), t: setup.t.clone(), h, j, f })
    }

    /// `Δ_i(g) = ∏_{k=0}^{i} h^k g h^{-k}`.
    fn delta(&self, g: &GplMap, i: u64) -> Result<GplMap, ConstructionError> {
        let mut acc = GplMap::identity();
        let mut hk = PlMap::identity();
        for _ in 0..=i {
            acc = acc.compose(&g.conjugate_by(&hk))?;
            hk = self.h.compose(&hk);
        }
        Ok(acc)
    }

    /// `f′ = ∏_{k=0}^{i} h^k f^{k+1} h^{-k}`.
    fn f_prime(&self, i: u64) -> Result<GplMap, ConstructionError> {
        let mut acc = GplMap::identity();
        let mut hk = PlMap::identity();
        let mut fk = GplMap::identity();
        for _ in 0..=i {
            fk = fk.compose(&self.f)?;
            acc = acc.compose(&fk.conjugate_by(&hk))?;
            hk = self.h.compose(&hk);
        }
        Ok(acc)
    }

    pub fn entry(&self, i: u64, which: DiagonalEntry) -> Result<GplMap, ConstructionError> {
        let back = self.h.power(-(i as i64 + 1));
        Ok(match which {
            DiagonalEntry::A => self.delta(&self.f1, i)?.conjugate_by(&back),
            DiagonalEntry::B => self.delta(&GplMap::from_pl(self.t.clone()), i)?.conjugate_by(&back),
            DiagonalEntry::C => GplMap::from_pl(self.h.clone()),
            DiagonalEntry::D => self.f_prime(i)?.conjugate_by(&back),
        })
    }

    fn environment(&self) -> Environment {
        let mut env = Environment::new();
        env.bind("f1", self.f1.clone());
        env.bind("t", self.t.clone());
        env.bind("h", self.h.clone());
        env
    }
}

/// `m ↦` entry `i_m` of the diagonal trick, as Mather pieces.
#[derive(Debug)]
pub struct DiagonalSequence {
    data: Arc<DiagonalData>,
    entry: DiagonalEntry,
    rule: IndexRule,
    config: ConstructionConfig,
    cache: PieceCache,
}

impl DiagonalSequence {
    pub fn shared(data: Arc<DiagonalData>, entry: DiagonalEntry, rule: IndexRule, config: ConstructionConfig) -> Arc<dyn PieceSequence> {
        Arc::new(DiagonalSequence { data, entry, rule, config, cache: PieceCache::default() })
    }
}

impl PieceSequence for DiagonalSequence {
    fn piece(&self, m: u64) -> Arc<Piece> {
        self.cache.get_or_build(m, || {
            let g = self
                .data
                .entry(self.rule.index(m), self.entry)
                .expect("diagonal entries have disjoint perturbations");
            Piece::from(g)
        })
    }

    fn uniform_rank(&self) -> usize {
        match self.entry {
            DiagonalEntry::A | DiagonalEntry::D => self.data.n,
            DiagonalEntry::B | DiagonalEntry::C => 0,
        }
    }

    fn descriptor(&self) -> SequenceDescriptor {
        SequenceDescriptor {
            tag: "diagonal-entry".into(),
            params: json!({
                "n": self.data.n,
                "entry": self.entry,
                "index": self.rule,
                "config": self.config,
            }),
        }
    }
}

/// Rebuilds [`DiagonalSequence`]s from their descriptors.
pub struct ConstructionResolver;

impl MapResolver for ConstructionResolver {
    fn resolve_map(&self, d: &SequenceDescriptor) -> Option<Arc<dyn PieceSequence>> {
        if d.tag != "diagonal-entry" {
            return None;
        }
        let n: usize = serde_json::from_value(d.params.get("n")?.clone()).ok()?;
        let entry: DiagonalEntry = serde_json::from_value(d.params.get("entry")?.clone()).ok()?;
        let rule: IndexRule = serde_json::from_value(d.params.get("index")?.clone()).ok()?;
        let config: ConstructionConfig = serde_json::from_value(d.params.get("config")?.clone()).ok()?;
        let setup = TheoremASetup::new(n, &config).ok()?;
        let data = Arc::new(DiagonalData::new(&setup, config.h.clone()).ok()?);
        Some(DiagonalSequence::shared(data, entry, rule, config))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagonalReport {
    pub n: usize,
    pub m: u64,
    /// Reduced lengths over `{f1, t, h}` of `f^{m+1}`, `a`, `b`, `c`, `d`.
    pub word_lengths: [usize; 5],
    /// Both identities were checked as equalities of PL maps.
    pub exact: bool,
    pub compared_cells: usize,
    pub samples: usize,
    pub supports_in_supp_h: bool,
}

fn h_pow(k: i64) -> Word {
    Word::power_of("h", k)
}

fn delta_word(g: &Word, m: u64) -> Word {
    (0..=m as i64).fold(Word::empty(), |acc, i| acc.mul(&g.conjugated_by(&h_pow(i))))
}

/// Checks `[f′, h] = Δ_m(f) h^{m+1} f^{-(m+1)} h^{-(m+1)}` and
/// `f^{m+1} = [a, b][c, d]` as words over `{f₁, t, h}`: exactly as PL maps
/// when `n = 0`, otherwise by restriction with neighbourhoods of
/// accumulation points cut out plus `samples` pointwise evaluations. Also
/// checks that the four entries are supported in `supp h` and agree with
/// [`DiagonalData::entry`].
pub fn diagonal_trick(data: &DiagonalData, m: u64, samples: usize, seed: u64) -> Result<DiagonalReport, ConstructionError> {
    let env = data.environment();
    let (f1, t, h) = (Word::gen("f1"), Word::gen("t"), Word::gen("h"));
    let f = Word::commutator(&f1, &t);
    let up = (m + 1) as i64;
    let f_prime = (0..=m as i64).fold(Word::empty(), |acc, i| acc.mul(&f.pow(i + 1).conjugated_by(&h_pow(i))));

    let lhs1 = Word::commutator(&f_prime, &h);
    let rhs1 = delta_word(&f, m).mul(&f.pow(-up).conjugated_by(&h_pow(up)));

    let back = h_pow(-up);
    let a = delta_word(&f1, m).conjugated_by(&back);
    let b = delta_word(&t, m).conjugated_by(&back);
    let c = h.clone();
    let d = f_prime.conjugated_by(&back);
    let lhs2 = f.pow(up);
    let rhs2 = Word::commutator(&a, &b).mul(&Word::commutator(&c, &d));

    let exact = data.n == 0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ m);
    let mut compared_cells = 0;
    let mut check = |env: &Environment, x: &Word, y: &Word, what: &str| -> Result<(), ConstructionError> {
        match same_map(env, x, y, exact, samples, &mut rng)? {
            Some(cells) => {
                compared_cells += cells;
                Ok(())
            }
            None => Err(ConstructionError::IdentityFailed(format!("{what} at m = {m}"))),
        }
    };
    check(&env, &lhs1, &rhs1, "[f', h] = Delta_m(f) h^(m+1) f^-(m+1) h^-(m+1)")?;
    check(&env, &lhs2, &rhs2, "f^(m+1) = [a, b][c, d]")?;

    let supp_h = data.h.support_hull().expect("h is not the identity");
    let mut supports_in_supp_h = true;
    for (which, word) in [(DiagonalEntry::A, &a), (DiagonalEntry::B, &b), (DiagonalEntry::C, &c), (DiagonalEntry::D, &d)] {
        let g = data.entry(m, which)?;
        if let Some(s) = g.support_hull() {
            supports_in_supp_h &= supp_h.contains_interval(&s);
        }
        let mut with_entry = env.clone();
        with_entry.bind("entry", g);
        check(&with_entry, word, &Word::gen("entry"), &format!("entry {which:?} equals its word"))?;
    }
    if !supports_in_supp_h {
        return Err(ConstructionError::IdentityFailed(format!("an entry leaves supp h at m = {m}")));
    }

    Ok(DiagonalReport {
        n: data.n,
        m,
        word_lengths: [lhs2.len(), a.len(), b.len(), c.len(), d.len()],
        exact,
        compared_cells,
        samples: if exact { 0 } else { samples },
        supports_in_supp_h,
    })
}

/// `Some(cells compared)` if the two words agree, `None` otherwise.
fn same_map(
    env: &Environment,
    x: &Word,
    y: &Word,
    exact: bool,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Option<usize>, ConstructionError> {
    if exact {
        return Ok((env.to_pl(x)? == env.to_pl(y)?).then_some(1));
    }
    let unit = Interval::new(crate::rational::int(0), crate::rational::int(1));
    let report = env.compare_on(x, y, &unit, 1 << 14)?;
    if !report.agrees() || env.sample_disagreement(x, y, samples, rng)?.is_some() {
        return Ok(None);
    }
    Ok(Some(report.cells))
}
