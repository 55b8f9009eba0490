//! A small catalog of symbolic sets used by tests, the CLI and reports.

use super::{AccumFamily, Direction, SetExpr, SetPieces};
use crate::plcore::{mather_r, ConjugationScheme, Interval, PlMap};
use crate::rational::{q, Rational};

/// `x ↦ x/2` on `[0, 3/4]`.
pub fn halving() -> PlMap {
    PlMap::new(vec![(q(3, 4), q(3, 8))]).expect("valid map")
}

/// `{1/2^m : m ≥ 1}`, accumulating at 0 from above.
pub fn dyadic_sequence() -> SetExpr {
    SetExpr::Family(AccumFamily {
        limit: q(0, 1),
        direction: Direction::Above,
        scheme: ConjugationScheme::with_transport(mather_r(), halving(), PlMap::identity(), 0, 1),
        core_hull: Interval::new(q(3, 8), q(5, 8)),
        pieces: SetPieces::Constant(Box::new(SetExpr::finite(vec![q(1, 2)]))),
        cofinal_nonempty: true,
    })
}

/// Contracts `[1/2, 3/4]` onto `1/2` by half.
fn toward_half() -> PlMap {
    PlMap::new(vec![(q(1, 2), q(1, 2)), (q(3, 4), q(5, 8))]).expect("valid map")
}

/// `{1/2 + 1/2^(m+3) : m ≥ 1}`, accumulating at `1/2` from above.
pub fn sequence_near_half() -> SetExpr {
    SetExpr::Family(AccumFamily {
        limit: q(1, 2),
        direction: Direction::Above,
        scheme: ConjugationScheme::new(toward_half(), PlMap::identity(), 0, 1),
        core_hull: Interval::new(q(19, 32), q(5, 8)),
        pieces: SetPieces::Constant(Box::new(SetExpr::finite(vec![q(5, 8)]))),
        cofinal_nonempty: true,
    })
}

/// A family at 0 whose pieces are copies of [`sequence_near_half`].
pub fn nested_sequence() -> SetExpr {
    SetExpr::Family(AccumFamily {
        limit: q(0, 1),
        direction: Direction::Above,
        scheme: ConjugationScheme::with_transport(mather_r(), halving(), PlMap::identity(), 0, 1),
        core_hull: Interval::new(q(3, 8), q(5, 8)),
        pieces: SetPieces::Constant(Box::new(sequence_near_half())),
        cofinal_nonempty: true,
    })
}

pub fn finite(points: &[(i64, i64)]) -> SetExpr {
    SetExpr::finite(points.iter().map(|&(n, d)| q(n, d)).collect::<Vec<Rational>>())
}

/// Named catalog entries with their expected ranks.
pub fn catalog() -> Vec<(&'static str, SetExpr, usize)> {
    vec![
        ("empty", SetExpr::empty(), 0),
        ("finite", finite(&[(1, 4), (1, 2), (3, 4)]), 0),
        ("dyadic", dyadic_sequence(), 1),
        (
            "dyadic-closed",
            SetExpr::Union(vec![dyadic_sequence(), finite(&[(0, 1)])]),
            1,
        ),
        ("near-half", sequence_near_half(), 1),
        (
            "two-sequences",
            SetExpr::Union(vec![dyadic_sequence(), sequence_near_half(), finite(&[(7, 8)])]),
            1,
        ),
        ("nested", nested_sequence(), 2),
        (
            "nested-image",
            SetExpr::image(halving(), SetExpr::Union(vec![nested_sequence(), finite(&[(9, 10)])])),
            2,
        ),
    ]
}
