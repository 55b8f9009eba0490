//! Free-group words over named maps, evaluated lazily.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{GplDoc, GplError, GplMap, MapResolver, DEFAULT_FUEL};
use crate::plcore::{Interval, PlGraph, PlMap};
use crate::rational::Rational;
use crate::sample;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub name: String,
    /// `1` or `-1`.
    pub exp: i8,
}

impl Letter {
    pub fn inverse(&self) -> Letter {
        Letter { name: self.name.clone(), exp: -self.exp }
    }

    fn cancels(&self, other: &Letter) -> bool {
        self.name == other.name && self.exp == -other.exp
    }
}

/// A freely reduced word `s_1 s_2 ... s_n`, read as the composition
/// `s_1 ∘ s_2 ∘ ... ∘ s_n`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut w = Word::empty();
        for l in letters {
            w.push(l);
        }
        w
    }

    pub fn gen(name: &str) -> Self {
        Word { letters: vec![Letter { name: name.to_string(), exp: 1 }] }
    }

    /// `name^k`.
    pub fn power_of(name: &str, k: i64) -> Self {
        let exp = if k < 0 { -1 } else { 1 };
        Word {
            letters: (0..k.unsigned_abs()).map(|_| Letter { name: name.to_string(), exp }).collect(),
        }
    }

    fn push(&mut self, l: Letter) {
        match self.letters.last() {
            Some(last) if last.cancels(&l) => {
                self.letters.pop();
            }
            _ => self.letters.push(l),
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// `self · other`, reduced at the junction.
    pub fn mul(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for l in &other.letters {
            w.push(l.clone());
        }
        w
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(Letter::inverse).collect() }
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        (0..k.unsigned_abs()).fold(Word::empty(), |acc, _| acc.mul(&base))
    }

    /// `a b a⁻¹ b⁻¹`.
    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.mul(b).mul(&a.inverse()).mul(&b.inverse())
    }

    /// `c · self · c⁻¹`.
    pub fn conjugated_by(&self, c: &Word) -> Word {
        c.mul(self).mul(&c.inverse())
    }

    /// Parses space-separated letters such as `F h^-1 r^3`.
    pub fn parse(s: &str) -> Result<Word, GplError> {
        let mut w = Word::empty();
        for tok in s.split_whitespace() {
            let (name, k) = match tok.split_once('^') {
                Some((n, e)) => (
                    n,
                    e.parse::<i64>()
                        .map_err(|_| GplError::Malformed(format!("bad exponent in `{tok}`")))?,
                ),
                None => (tok, 1),
            };
            w = w.mul(&Word::power_of(name, k));
        }
        Ok(w)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        // runs of equal letters are written as powers
        let mut i = 0;
        let mut first = true;
        while i < self.letters.len() {
            let l = &self.letters[i];
            let mut j = i;
            while j < self.letters.len() && self.letters[j] == *l {
                j += 1;
            }
            let k = (j - i) as i64 * l.exp as i64;
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if k == 1 {
                write!(f, "{}", l.name)?;
            } else {
                write!(f, "{}^{}", l.name, k)?;
            }
            i = j;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Bound {
    map: GplMap,
    inverse: GplMap,
}

/// Named maps that words are evaluated in.
#[derive(Debug, Clone, Default)]
pub struct Environment {
    maps: BTreeMap<String, Bound>,
}

/// Outcome of [`Environment::compare_on`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    /// Cells on which both restrictions were computed and compared.
    pub cells: usize,
    /// Points whose small neighbourhoods were skipped because a factor is
    /// not PL there.
    #[serde(serialize_with = "serialize_points")]
    pub excluded: Vec<Rational>,
    /// First cell where the graphs differ.
    pub mismatch: Option<Interval>,
}

fn serialize_points<S: serde::Serializer>(pts: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(pts.iter().map(crate::rational::format_rational))
}

impl CompareReport {
    pub fn agrees(&self) -> bool {
        self.mismatch.is_none()
    }
}

#[derive(Serialize, Deserialize)]
struct WordDoc {
    letters: Vec<(String, i8)>,
    environment: BTreeMap<String, GplDoc>,
}

impl Environment {
    pub fn new() -> Self {
        Environment::default()
    }

    pub fn bind(&mut self, name: &str, map: impl Into<GplMap>) {
        let map = map.into();
        let inverse = map.inverse();
        self.maps.insert(name.to_string(), Bound { map, inverse });
    }

    pub fn get(&self, name: &str) -> Option<&GplMap> {
        self.maps.get(name).map(|b| &b.map)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.maps.keys().map(|s| s.as_str())
    }

    fn lookup(&self, l: &Letter) -> Result<&GplMap, GplError> {
        let b = self
            .maps
            .get(&l.name)
            .ok_or_else(|| GplError::UnboundGenerator(l.name.clone()))?;
        Ok(if l.exp > 0 { &b.map } else { &b.inverse })
    }

    /// Right-to-left evaluation.
    pub fn evaluate(&self, w: &Word, x: &Rational) -> Result<Rational, GplError> {
        let mut y = x.clone();
        for l in w.letters().iter().rev() {
            y = self.lookup(l)?.evaluate(&y)?;
        }
        Ok(y)
    }

    /// Pushes `j` through the letters right to left, restricting each factor
    /// on the running interval. A failure point is reported in `j`'s
    /// coordinates.
    pub fn restrict_pl(&self, w: &Word, j: &Interval, fuel: usize) -> Result<PlGraph, GplError> {
        let mut acc = PlGraph::identity(j);
        for l in w.letters().iter().rev() {
            let f = self.lookup(l)?;
            let g = match f.restrict_pl(&acc.range(), fuel) {
                Ok(g) => g,
                Err(GplError::NotPiecewiseLinearHere { point }) => {
                    let back = acc.invert().evaluate(&point)?;
                    return Err(GplError::NotPiecewiseLinearHere { point: back });
                }
                Err(e) => return Err(e),
            };
            acc = g.after(&acc)?;
        }
        Ok(acc)
    }

    /// The product as a PL map, when every letter is PL.
    pub fn to_pl(&self, w: &Word) -> Result<PlMap, GplError> {
        let mut acc = PlMap::identity();
        for l in w.letters() {
            let f = self.lookup(l)?;
            let p = f
                .as_pl()
                .ok_or_else(|| GplError::Malformed(format!("`{}` is not PL", l.name)))?;
            acc = acc.compose(p);
        }
        Ok(acc)
    }

    /// The product as a generalized map, when consecutive perturbations stay
    /// apart.
    pub fn to_gpl(&self, w: &Word) -> Result<GplMap, GplError> {
        let mut acc = GplMap::identity();
        for l in w.letters() {
            acc = acc.compose(self.lookup(l)?)?;
        }
        Ok(acc)
    }

    /// Compares two words on `region` by exact PL restriction, cutting out
    /// neighbourhoods of points where some factor accumulates.
    pub fn compare_on(&self, a: &Word, b: &Word, region: &Interval, max_cells: usize) -> Result<CompareReport, GplError> {
        let mut report = CompareReport { cells: 0, excluded: Vec::new(), mismatch: None };
        let mut stack = vec![region.clone()];
        let mut visited = 0usize;
        while let Some(cell) = stack.pop() {
            visited += 1;
            if visited > max_cells {
                return Err(GplError::FuelExhausted(max_cells));
            }
            let ra = self.restrict_pl(a, &cell, DEFAULT_FUEL);
            let rb = ra.as_ref().ok().map(|_| self.restrict_pl(b, &cell, DEFAULT_FUEL));
            let bad = match (&ra, &rb) {
                (Err(GplError::NotPiecewiseLinearHere { point }), _) => point.clone(),
                (Ok(_), Some(Err(GplError::NotPiecewiseLinearHere { point }))) => point.clone(),
                (Err(e), _) => return Err(e.clone()),
                (Ok(_), Some(Err(e))) => return Err(e.clone()),
                (Ok(ga), Some(Ok(gb))) => {
                    if ga != gb {
                        report.mismatch = Some(cell);
                        return Ok(report);
                    }
                    report.cells += 1;
                    continue;
                }
                (Ok(_), None) => unreachable!(),
            };
            let rho = cell.width() / Rational::from_integer(64.into());
            report.excluded.push(bad.clone());
            let left = &bad - &rho;
            let right = &bad + &rho;
            if left > cell.lo {
                stack.push(Interval::new(cell.lo.clone(), left));
            }
            if right < cell.hi {
                stack.push(Interval::new(right, cell.hi.clone()));
            }
        }
        report.excluded.sort();
        Ok(report)
    }

    /// Evaluates both words at `samples` random rationals; returns the first
    /// point where they differ.
    pub fn sample_disagreement<R: Rng + ?Sized>(
        &self,
        a: &Word,
        b: &Word,
        samples: usize,
        rng: &mut R,
    ) -> Result<Option<Rational>, GplError> {
        for _ in 0..samples {
            let x = sample::unit_rational(rng, 1 << 20);
            if self.evaluate(a, &x)? != self.evaluate(b, &x)? {
                return Ok(Some(x));
            }
        }
        Ok(None)
    }

    /// `{"letters": [[name, ±1], ...], "environment": {name: map}}` with only
    /// the generators the word uses.
    pub fn word_to_json(&self, w: &Word) -> Result<serde_json::Value, GplError> {
        let mut environment = BTreeMap::new();
        for l in w.letters() {
            if !environment.contains_key(&l.name) {
                let b = self
                    .maps
                    .get(&l.name)
                    .ok_or_else(|| GplError::UnboundGenerator(l.name.clone()))?;
                environment.insert(l.name.clone(), GplDoc::from(&b.map));
            }
        }
        let doc = WordDoc {
            letters: w.letters().iter().map(|l| (l.name.clone(), l.exp)).collect(),
            environment,
        };
        Ok(serde_json::to_value(doc).expect("word documents always serialize"))
    }

    pub fn word_from_json(value: serde_json::Value, resolver: &dyn MapResolver) -> Result<(Word, Environment), GplError> {
        let doc: WordDoc = serde_json::from_value(value).map_err(|e| GplError::Malformed(e.to_string()))?;
        let mut env = Environment::new();
        for (name, map) in doc.environment {
            env.bind(&name, map.resolve(resolver)?);
        }
        let mut letters = Vec::with_capacity(doc.letters.len());
        for (name, exp) in doc.letters {
            if exp != 1 && exp != -1 {
                return Err(GplError::Malformed(format!("exponent {exp} on `{name}`")));
            }
            letters.push(Letter { name, exp });
        }
        Ok((Word::new(letters), env))
    }
}
