//! The specific PL maps used by the constructions.

use num_traits::{One, Zero};

use super::{fmt_q, PlError, PlMap};
use crate::rational::{q, Rational};

/// Identity outside `[a', b']`, translation by `alpha` on `[a, b]`, affine on
/// `[a', a]` and `[b, b']`. Graph points `(a',a')`, `(a, a+α)`, `(b, b+α)`,
/// `(b', b')`.
pub fn bump(
    outer_lo: &Rational,
    lo: &Rational,
    hi: &Rational,
    outer_hi: &Rational,
    alpha: &Rational,
) -> Result<PlMap, PlError> {
    let shifted = hi + alpha;
    let ok = *outer_lo > Rational::zero()
        && outer_lo < lo
        && lo < hi
        && *alpha > Rational::zero()
        && shifted < *outer_hi
        && *outer_hi < Rational::one();
    if !ok {
        return Err(PlError::InvalidBump(format!(
            "need 0 < {} < {} < {} < {} < {} < 1",
            fmt_q(outer_lo),
            fmt_q(lo),
            fmt_q(hi),
            fmt_q(&shifted),
            fmt_q(outer_hi)
        )));
    }
    PlMap::new(vec![
        (outer_lo.clone(), outer_lo.clone()),
        (lo.clone(), lo + alpha),
        (hi.clone(), shifted),
        (outer_hi.clone(), outer_hi.clone()),
    ])
}

/// The map `h` whose inverse is `x/2 + 1/4` on `[a', b']` and affine on
/// `[0, a']` and `[b', 1]`.
pub fn mather_h(outer_lo: &Rational, outer_hi: &Rational) -> Result<PlMap, PlError> {
    if !(*outer_lo > Rational::zero() && outer_lo < outer_hi && *outer_hi < Rational::one()) {
        return Err(PlError::InvalidBump(format!(
            "need 0 < {} < {} < 1",
            fmt_q(outer_lo),
            fmt_q(outer_hi)
        )));
    }
    let contract = |x: &Rational| x / q(2, 1) + q(1, 4);
    let h_inv = PlMap::new(vec![
        (outer_lo.clone(), contract(outer_lo)),
        (outer_hi.clone(), contract(outer_hi)),
    ])?;
    Ok(h_inv.invert())
}

/// `r(x) = 2x` on `[0, 3/8]`, affine from `(3/8, 3/4)` to `(1, 1)`.
pub fn mather_r() -> PlMap {
    PlMap::new(vec![(q(3, 8), q(3, 4))]).expect("static graph is monotone")
}
