//! Seeded random generators for maps and points.

use num_bigint::BigInt;
use rand::Rng;

use crate::plcore::PlMap;
use crate::rational::Rational;

/// A rational in the open interval `(0,1)` with denominator dividing `denom`.
pub fn interior_rational<R: Rng + ?Sized>(rng: &mut R, denom: i64) -> Rational {
    let n = rng.gen_range(1..denom);
    Rational::new(BigInt::from(n), BigInt::from(denom))
}

/// A rational in `[0,1]` with a random denominator up to `max_denom`.
pub fn unit_rational<R: Rng + ?Sized>(rng: &mut R, max_denom: i64) -> Rational {
    let d = rng.gen_range(1..=max_denom);
    let n = rng.gen_range(0..=d);
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// A random canonical PL map with at most `max_breaks` break points on the
/// grid of multiples of `1/denom`.
pub fn pl_map<R: Rng + ?Sized>(rng: &mut R, max_breaks: usize, denom: i64) -> PlMap {
    let k = rng.gen_range(0..=max_breaks).min(denom as usize - 1);
    let mut xs = distinct_grid(rng, k, denom);
    let mut ys = distinct_grid(rng, k, denom);
    xs.sort();
    ys.sort();
    PlMap::new(xs.into_iter().zip(ys).collect()).expect("sorted grid points are monotone")
}

fn distinct_grid<R: Rng + ?Sized>(rng: &mut R, k: usize, denom: i64) -> Vec<Rational> {
    let mut picks: Vec<i64> = Vec::with_capacity(k);
    while picks.len() < k {
        let n = rng.gen_range(1..denom);
        if !picks.contains(&n) {
            picks.push(n);
        }
    }
    picks
        .into_iter()
        .map(|n| Rational::new(BigInt::from(n), BigInt::from(denom)))
        .collect()
}
