//! Word lengths and distortion in finitely generated groups with exactly
//! comparable elements.

mod elements;
pub mod examples;

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::gpl::{Letter, Word};
use crate::rational::{format_rational, Rational};

pub use elements::{DyadicAffine, UniTri5};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("ball exceeded {budget} elements while building radius {radius}")]
    BudgetExceeded { budget: usize, radius: usize },
    #[error("lengths are not subadditive: l({}) > l({a}) + l({b})", a + b)]
    SubadditivityViolation { a: usize, b: usize },
    #[error("generator `{0}` is not within the search radius")]
    GeneratorUnreachable(String),
    #[error("the element has finite order")]
    Torsion,
    #[error("identity check failed: {0}")]
    IdentityFailed(String),
    #[error("length comparison failed at {element}: {detail}")]
    ComparisonFailed { element: String, detail: String },
}

pub trait GroupElement: Clone + Eq + Hash + Send + Sync + fmt::Debug + 'static {
    const KIND: &'static str;

    fn identity() -> Self;

    /// `self · other`; for maps, `other` acts first.
    fn mul(&self, other: &Self) -> Self;

    fn inverse(&self) -> Self;

    /// `k` with `base^k = self`, if there is one.
    fn power_exponent(&self, base: &Self) -> Option<i64>;

    fn pow(&self, k: i64) -> Self {
        let mut base = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    fn is_identity(&self) -> bool {
        *self == Self::identity()
    }
}

/// A symmetric generating set: every generator comes with its inverse.
#[derive(Debug, Clone)]
pub struct GenSet<E> {
    gens: Vec<(Letter, E)>,
}

impl<E: GroupElement> GenSet<E> {
    /// Adds formal inverses; duplicate elements are dropped.
    pub fn new(named: Vec<(String, E)>) -> Self {
        let mut s = GenSet { gens: Vec::new() };
        for (name, e) in named {
            s.insert(name, e);
        }
        s
    }

    fn insert(&mut self, name: String, e: E) {
        let inv = e.inverse();
        for (l, x) in [(Letter { name: name.clone(), exp: 1 }, e), (Letter { name, exp: -1 }, inv)] {
            if !x.is_identity() && !self.gens.iter().any(|(_, y)| *y == x) {
                self.gens.push((l, x));
            }
        }
    }

    /// `self` with one more generator.
    pub fn with(&self, name: &str, e: E) -> Self {
        let mut s = self.clone();
        s.insert(name.to_string(), e);
        s
    }

    pub fn kind(&self) -> &'static str {
        E::KIND
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Letter, &E)> {
        self.gens.iter().map(|(l, e)| (l, e))
    }

    /// Named generators, positive letters only.
    pub fn named(&self) -> Vec<(String, E)> {
        self.gens
            .iter()
            .filter(|(l, _)| l.exp > 0)
            .map(|(l, e)| (l.name.clone(), e.clone()))
            .collect()
    }

    fn lookup(&self, l: &Letter) -> Option<E> {
        if let Some((_, e)) = self.gens.iter().find(|(m, _)| m == l) {
            return Some(e.clone());
        }
        // an inverse dropped as a duplicate is still the inverse
        self.gens.iter().find(|(m, _)| *m == l.inverse()).map(|(_, e)| e.inverse())
    }

    /// Multiplies a word out, or `None` if it uses an unknown letter.
    pub fn evaluate(&self, w: &Word) -> Option<E> {
        let mut acc = E::identity();
        for l in w.letters() {
            acc = acc.mul(&self.lookup(l)?);
        }
        Some(acc)
    }
}

/// Exact word lengths of every element within a radius.
#[derive(Debug, Clone)]
pub struct BallTable<E> {
    gens: GenSet<E>,
    radius: usize,
    elements: Vec<E>,
    lengths: Vec<u32>,
    /// Element `i` is `elements[p] · gens[g]`.
    parents: Vec<Option<(u32, u16)>>,
    index: HashMap<E, u32>,
}

impl<E: GroupElement> BallTable<E> {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn generators(&self) -> &GenSet<E> {
        &self.gens
    }

    pub fn length_of(&self, e: &E) -> Option<usize> {
        self.index.get(e).map(|&i| self.lengths[i as usize] as usize)
    }

    pub fn contains(&self, e: &E) -> bool {
        self.index.contains_key(e)
    }

    /// `(element, length)` in breadth-first order.
    pub fn iter(&self) -> impl Iterator<Item = (&E, usize)> {
        self.elements.iter().zip(self.lengths.iter().map(|&l| l as usize))
    }

    /// A geodesic word for `e`.
    pub fn witness(&self, e: &E) -> Option<Word> {
        let mut i = *self.index.get(e)?;
        let mut letters = Vec::new();
        while let Some((p, g)) = self.parents[i as usize] {
            letters.push(self.gens.gens[g as usize].0.clone());
            i = p;
        }
        letters.reverse();
        Some(Word::new(letters))
    }

    /// `|S(r)|` for `r = 0..=radius`.
    pub fn sphere_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.radius + 1];
        for &l in &self.lengths {
            sizes[l as usize] += 1;
        }
        sizes
    }
}

/// Breadth-first ball of radius `radius`, failing once it holds more than
/// `budget` elements.
pub fn bfs_ball<E: GroupElement>(gens: &GenSet<E>, radius: usize, budget: usize) -> Result<BallTable<E>, GroupError> {
    grow(gens, radius, budget, |_| false)
}

fn grow<E: GroupElement>(
    gens: &GenSet<E>,
    radius: usize,
    budget: usize,
    stop: impl Fn(&E) -> bool,
) -> Result<BallTable<E>, GroupError> {
    let id = E::identity();
    let mut table = BallTable {
        gens: gens.clone(),
        radius: 0,
        elements: vec![id.clone()],
        lengths: vec![0],
        parents: vec![None],
        index: HashMap::from([(id.clone(), 0)]),
    };
    if stop(&id) {
        return Ok(table);
    }
    let mut start = 0;
    for r in 1..=radius {
        let end = table.elements.len();
        // products are computed in parallel; the merge below is sequential
        // in (parent, generator) order, so the table does not depend on
        // scheduling
        let candidates: Vec<(u32, u16, E)> = {
            let t = &table;
            (start..end)
                .into_par_iter()
                .flat_map_iter(|p| {
                    t.gens.gens.iter().enumerate().filter_map(move |(g, (_, s))| {
                        let e = t.elements[p].mul(s);
                        (!t.index.contains_key(&e)).then_some((p as u32, g as u16, e))
                    })
                })
                .collect()
        };
        let mut found = false;
        for (p, g, e) in candidates {
            if table.index.contains_key(&e) {
                continue;
            }
            found |= stop(&e);
            let i = table.elements.len() as u32;
            table.index.insert(e.clone(), i);
            table.elements.push(e);
            table.lengths.push(r as u32);
            table.parents.push(Some((p, g)));
        }
        table.radius = r;
        if table.elements.len() > budget {
            return Err(GroupError::BudgetExceeded { budget, radius: r });
        }
        if found {
            break;
        }
        start = end;
    }
    Ok(table)
}

/// Exact `l_S(g)`, or the radius beyond which it lies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WordLength {
    Exact { length: usize },
    NotFound { radius: usize },
}

pub fn word_length<E: GroupElement>(g: &E, gens: &GenSet<E>, radius: usize, budget: usize) -> Result<WordLength, GroupError> {
    let table = grow(gens, radius, budget, |e| e == g)?;
    Ok(match table.length_of(g) {
        Some(length) => WordLength::Exact { length },
        None => WordLength::NotFound { radius },
    })
}

/// `D(m) = max{k : l_S(f^k) ≤ m}` for `m = 0..=n`, from one ball of radius `n`.
pub fn distortion_table<E: GroupElement>(f: &E, gens: &GenSet<E>, n: usize, budget: usize) -> Result<Vec<u64>, GroupError> {
    if f.is_identity() {
        return Err(GroupError::Torsion);
    }
    let ball = bfs_ball(gens, n, budget)?;
    distortion_from_ball(f, &ball)
}

/// [`distortion_table`] over an existing ball.
pub fn distortion_from_ball<E: GroupElement>(f: &E, ball: &BallTable<E>) -> Result<Vec<u64>, GroupError> {
    let mut best = vec![0u64; ball.radius() + 1];
    let found: Vec<(usize, u64)> = ball
        .elements
        .par_iter()
        .zip(ball.lengths.par_iter())
        .filter_map(|(e, &l)| e.power_exponent(f).map(|k| (l as usize, k.unsigned_abs())))
        .collect();
    for (l, k) in found {
        best[l] = best[l].max(k);
    }
    for m in 1..best.len() {
        best[m] = best[m].max(best[m - 1]);
    }
    Ok(best)
}

pub fn distortion_function<E: GroupElement>(f: &E, gens: &GenSet<E>, n: usize, budget: usize) -> Result<u64, GroupError> {
    Ok(distortion_table(f, gens, n, budget)?[n])
}

/// `l_S(f^k)` for `k = 1..=kmax`, `None` where it exceeds the ball radius.
pub fn power_lengths<E: GroupElement>(f: &E, ball: &BallTable<E>, kmax: u64) -> Vec<(u64, Option<usize>)> {
    let mut p = E::identity();
    (1..=kmax)
        .map(|k| {
            p = p.mul(f);
            (k, ball.length_of(&p))
        })
        .collect()
}

/// `min_{1≤m≤M} l(m)/m` for `lengths[m-1] = l(m)`, after checking
/// subadditivity on the inspected range.
pub fn fekete_estimate(lengths: &[u64]) -> Result<Rational, GroupError> {
    assert!(!lengths.is_empty(), "need at least one length");
    let l = |m: usize| lengths[m - 1];
    let big_m = lengths.len();
    for a in 1..big_m {
        for b in a..=big_m - a {
            if l(a + b) > l(a) + l(b) {
                return Err(GroupError::SubadditivityViolation { a, b });
            }
        }
    }
    Ok((1..=big_m)
        .map(|m| Rational::new((l(m) as i64).into(), (m as i64).into()))
        .min()
        .expect("nonempty"))
}

/// Outcome of [`genset_comparison`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    /// `C = max_{s∈S} l_T(s)`.
    pub constant: Rational,
    /// Elements of the `S`-ball on which `l_T ≤ C·l_S` was confirmed.
    pub checked: usize,
}

impl Serialize for Comparison {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> Result<Ser::Ok, Ser::Error> {
        #[derive(Serialize)]
        struct Doc {
            constant: String,
            checked: usize,
        }
        Doc { constant: format_rational(&self.constant), checked: self.checked }.serialize(s)
    }
}

/// Computes `C = max_{s∈S} l_T(s)` and checks `l_T(g) ≤ C·l_S(g)` on the
/// `S`-ball of radius `radius`.
pub fn genset_comparison<E: GroupElement>(
    s: &GenSet<E>,
    t: &GenSet<E>,
    radius: usize,
    budget: usize,
) -> Result<Comparison, GroupError> {
    let mut c = 0usize;
    for (l, e) in s.iter() {
        match word_length(e, t, radius, budget)? {
            WordLength::Exact { length } => c = c.max(length),
            WordLength::NotFound { .. } => return Err(GroupError::GeneratorUnreachable(l.name.clone())),
        }
    }
    let s_ball = bfs_ball(s, radius, budget)?;
    let t_ball = bfs_ball(t, c * radius, budget)?;
    for (g, ls) in s_ball.iter() {
        match t_ball.length_of(g) {
            Some(lt) if lt <= c * ls => {}
            Some(lt) => {
                return Err(GroupError::ComparisonFailed {
                    element: format!("{g:?}"),
                    detail: format!("l_T = {lt} > {c}·{ls}"),
                })
            }
            None => {
                return Err(GroupError::ComparisonFailed {
                    element: format!("{g:?}"),
                    detail: format!("l_T > {}", c * radius),
                })
            }
        }
    }
    Ok(Comparison { constant: Rational::from_integer((c as i64).into()), checked: s_ball.len() })
}

#[cfg(test)]
mod tests;
