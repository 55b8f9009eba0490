use std::fmt;

use num_traits::{One, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::GroupElement;
use crate::plcore::PlMap;
use crate::rational::{self, format_rational, Rational};

/// 5×5 upper unitriangular integer matrix, stored as its ten entries above the
/// diagonal in row-major order: a12 a13 a14 a15 a23 a24 a25 a34 a35 a45.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct UniTri5([i64; 10]);

const fn idx(i: usize, j: usize) -> usize {
    // rows 1..4 hold 4, 3, 2, 1 entries
    let row_start = [0, 0, 4, 7, 9];
    row_start[i] + (j - i - 1)
}

impl UniTri5 {
    pub fn from_entries(a: [i64; 10]) -> Self {
        UniTri5(a)
    }

    pub fn entries(&self) -> [i64; 10] {
        self.0
    }

    /// `Id + e_{i,j}`, 1-based, `i < j`.
    pub fn elementary(i: usize, j: usize) -> Self {
        assert!(1 <= i && i < j && j <= 5, "E_({i},{j}) is not above the diagonal");
        let mut a = [0; 10];
        a[idx(i, j)] = 1;
        UniTri5(a)
    }

    /// Entry `(i, j)`, 1-based; 1 on the diagonal and 0 below it.
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.0[idx(i, j)],
            std::cmp::Ordering::Equal => 1,
            std::cmp::Ordering::Greater => 0,
        }
    }

    fn set(&mut self, i: usize, j: usize, v: i64) {
        self.0[idx(i, j)] = v;
    }
}

fn add(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("matrix entry overflow")
}

fn mul(a: i64, b: i64) -> i64 {
    a.checked_mul(b).expect("matrix entry overflow")
}

impl GroupElement for UniTri5 {
    const KIND: &'static str = "unitri5";

    fn identity() -> Self {
        UniTri5([0; 10])
    }

    fn mul(&self, other: &Self) -> Self {
        let mut c = UniTri5::identity();
        for i in 1..5 {
            for j in i + 1..=5 {
                let mut v = add(self.entry(i, j), other.entry(i, j));
                for k in i + 1..j {
                    v = add(v, mul(self.entry(i, k), other.entry(k, j)));
                }
                c.set(i, j, v);
            }
        }
        c
    }

    fn inverse(&self) -> Self {
        // back substitution, shortest superdiagonals first
        let mut x = UniTri5::identity();
        for d in 1..5 {
            for i in 1..=5 - d {
                let j = i + d;
                let mut v = -self.entry(i, j);
                for k in i + 1..j {
                    v = add(v, -mul(self.entry(i, k), x.entry(k, j)));
                }
                x.set(i, j, v);
            }
        }
        x
    }

    /// On the lowest superdiagonal where `base` is nonzero, powers scale
    /// linearly, which pins down the only candidate exponent.
    fn power_exponent(&self, base: &Self) -> Option<i64> {
        for d in 1..5 {
            for i in 1..=5 - d {
                let b = base.entry(i, i + d);
                if b != 0 {
                    let g = self.entry(i, i + d);
                    if g % b != 0 {
                        return None;
                    }
                    let k = g / b;
                    return (base.pow(k) == *self).then_some(k);
                }
            }
        }
        None
    }
}

impl fmt::Debug for UniTri5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniTri5{:?}", self.0)
    }
}

impl fmt::Display for UniTri5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=5 {
            let row: Vec<String> = (1..=5).map(|j| self.entry(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for UniTri5 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for UniTri5 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(UniTri5(<[i64; 10]>::deserialize(d)?))
    }
}

/// `x ↦ 2^k·x + q` on the real line, `q` dyadic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DyadicAffine {
    log_slope: i64,
    shift: Rational,
}

impl DyadicAffine {
    pub fn new(log_slope: i64, shift: Rational) -> Option<Self> {
        rational::is_dyadic(&shift).then_some(DyadicAffine { log_slope, shift })
    }

    pub fn translation(q: Rational) -> Option<Self> {
        Self::new(0, q)
    }

    pub fn scaling(k: i64) -> Self {
        DyadicAffine { log_slope: k, shift: Rational::zero() }
    }

    pub fn log_slope(&self) -> i64 {
        self.log_slope
    }

    pub fn shift(&self) -> &Rational {
        &self.shift
    }

    pub fn evaluate(&self, x: &Rational) -> Rational {
        rational::pow2(self.log_slope) * x + &self.shift
    }
}

impl GroupElement for DyadicAffine {
    const KIND: &'static str = "dyadic-affine";

    fn identity() -> Self {
        DyadicAffine::scaling(0)
    }

    fn mul(&self, other: &Self) -> Self {
        DyadicAffine {
            log_slope: self.log_slope + other.log_slope,
            shift: self.evaluate(&other.shift),
        }
    }

    fn inverse(&self) -> Self {
        DyadicAffine {
            log_slope: -self.log_slope,
            shift: -(rational::pow2(-self.log_slope) * &self.shift),
        }
    }

    fn power_exponent(&self, base: &Self) -> Option<i64> {
        let k = if base.log_slope != 0 {
            if self.log_slope % base.log_slope != 0 {
                return None;
            }
            self.log_slope / base.log_slope
        } else if !base.shift.is_zero() {
            let r = &self.shift / &base.shift;
            if !r.is_integer() || self.log_slope != 0 {
                return None;
            }
            i64::try_from(r.to_integer()).ok()?
        } else {
            return None;
        };
        (base.pow(k) == *self).then_some(k)
    }
}

impl fmt::Debug for DyadicAffine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x ↦ 2^{}·x + {}", self.log_slope, format_rational(&self.shift))
    }
}

#[derive(Serialize, Deserialize)]
struct AffineDoc {
    p: String,
    q: String,
}

impl Serialize for DyadicAffine {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        AffineDoc { p: format!("2^{}", self.log_slope), q: format_rational(&self.shift) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DyadicAffine {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = AffineDoc::deserialize(d)?;
        let k = doc
            .p
            .strip_prefix("2^")
            .and_then(|e| e.parse::<i64>().ok())
            .ok_or_else(|| de::Error::custom(format!("slope `{}` is not of the form 2^k", doc.p)))?;
        let q = rational::parse_rational(&doc.q).map_err(de::Error::custom)?;
        DyadicAffine::new(k, q).ok_or_else(|| de::Error::custom("shift is not dyadic"))
    }
}

/// Largest `|k|` tried when no endpoint slope determines the exponent.
const PL_SEARCH: i64 = 64;

impl GroupElement for PlMap {
    const KIND: &'static str = "pl";

    fn identity() -> Self {
        PlMap::identity()
    }

    fn mul(&self, other: &Self) -> Self {
        self.compose(other)
    }

    fn inverse(&self) -> Self {
        self.invert()
    }

    /// Reads the exponent off an endpoint slope when `base` is not flat there;
    /// otherwise searches `|k| ≤ 64`.
    fn power_exponent(&self, base: &Self) -> Option<i64> {
        let (be, ge) = (base.eta(), self.eta());
        for (s, t) in [(be.slope_at_zero, ge.slope_at_zero), (be.slope_at_one, ge.slope_at_one)] {
            if !s.is_one() {
                let k = integer_log(&s, &t)?;
                return (base.pow(k) == *self).then_some(k);
            }
        }
        if base.is_identity() {
            return None;
        }
        let (mut up, mut down) = (PlMap::identity(), PlMap::identity());
        let inv = base.invert();
        for k in 1..=PL_SEARCH {
            up = up.compose(base);
            down = down.compose(&inv);
            if up == *self {
                return Some(k);
            }
            if down == *self {
                return Some(-k);
            }
        }
        (self.is_identity()).then_some(0)
    }
}

/// `k` with `s^k = t`, for `s ≠ 1` positive.
fn integer_log(s: &Rational, t: &Rational) -> Option<i64> {
    if t.is_one() {
        return Some(0);
    }
    let grows = (s > &Rational::one()) == (t > &Rational::one());
    let step = if grows { s.clone() } else { s.recip() };
    let sign = if grows { 1 } else { -1 };
    let mut acc = Rational::one();
    for k in 1..=4096 {
        acc *= &step;
        if acc == *t {
            return Some(sign * k);
        }
        let passed = if step > Rational::one() { acc > *t } else { acc < *t };
        if passed {
            return None;
        }
    }
    None
}
