//! The unitriangular and Baumslag–Solitar examples.

use serde::Serialize;

use super::{DyadicAffine, GenSet, GroupElement, GroupError, UniTri5};
use crate::gpl::Word;
use crate::rational::{int, pow2};

pub fn e(i: usize, j: usize) -> UniTri5 {
    UniTri5::elementary(i, j)
}

fn e_name(i: usize, j: usize) -> String {
    format!("E{i}{j}")
}

fn elementary_set(pairs: &[(usize, usize)]) -> GenSet<UniTri5> {
    GenSet::new(pairs.iter().map(|&(i, j)| (e_name(i, j), e(i, j))).collect())
}

/// All `E_{i,j}`, generating the full unitriangular group.
pub fn h5_generators() -> GenSet<UniTri5> {
    let pairs: Vec<(usize, usize)> = (1..5).flat_map(|i| (i + 1..=5).map(move |j| (i, j))).collect();
    elementary_set(&pairs)
}

/// Generators of the subgroup where only a25, a34, a35, a45 may be nonzero.
pub fn gamma1_generators() -> GenSet<UniTri5> {
    elementary_set(&[(2, 5), (3, 4), (3, 5), (4, 5)])
}

/// Generators of the subgroup where a12 = a13 = a14 = 0.
pub fn gamma2_generators() -> GenSet<UniTri5> {
    elementary_set(&[(1, 5), (2, 3), (2, 4), (2, 5), (3, 4), (3, 5), (4, 5)])
}

pub fn in_gamma1(a: &UniTri5) -> bool {
    [(1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4)].iter().all(|&(i, j)| a.entry(i, j) == 0)
}

pub fn in_gamma2(a: &UniTri5) -> bool {
    [(1, 2), (1, 3), (1, 4)].iter().all(|&(i, j)| a.entry(i, j) == 0)
}

/// `|a25|`, a length function on the first subgroup.
pub fn l1(a: &UniTri5) -> u64 {
    a.entry(2, 5).unsigned_abs()
}

/// `|a15|`, a length function on the second subgroup.
pub fn l2(a: &UniTri5) -> u64 {
    a.entry(1, 5).unsigned_abs()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct H5Report {
    pub n: u64,
    /// Letters in `[E34^n, E45^n]`, a word for `E35^{n²}`.
    pub e35_word_length: usize,
    /// Letters in `[E23, [E34^n, E45^n]]`, a word for `E25^{n²}`.
    pub e25_word_length: usize,
    /// Letters in `[[E12^n, E23^n], [E34^n, E45^n]]`, a word for `E15^{n⁴}`.
    pub e15_word_length: usize,
    pub bound_e35: u64,
    pub bound_e25: u64,
    pub bound_e15: u64,
    /// `L1(E25^{n²})`.
    pub l1: u64,
    /// `L2(E15^{n⁴})`.
    pub l2: u64,
}

fn check<E: GroupElement>(what: &str, lhs: &E, rhs: &E) -> Result<(), GroupError> {
    if lhs == rhs {
        Ok(())
    } else {
        Err(GroupError::IdentityFailed(format!("{what}: {lhs:?} ≠ {rhs:?}")))
    }
}

fn pow_word(i: usize, j: usize, n: i64) -> Word {
    Word::power_of(&e_name(i, j), n)
}

pub fn verify_h5_identities(n: u64) -> Result<H5Report, GroupError> {
    assert!(n >= 1, "n must be positive");
    let k = n as i64;
    let sq = k.checked_mul(k).expect("n² overflows");
    let quad = sq.checked_mul(sq).expect("n⁴ overflows");
    let s = h5_generators();

    let inner = Word::commutator(&pow_word(3, 4, k), &pow_word(4, 5, k));
    let outer = Word::commutator(&pow_word(1, 2, k), &pow_word(2, 3, k));
    let w35 = inner.clone();
    let w25 = Word::commutator(&Word::gen(&e_name(2, 3)), &inner);
    let w15 = Word::commutator(&outer, &inner);

    let e35 = e(3, 5).pow(sq);
    let e25 = e(2, 5).pow(sq);
    let e15 = e(1, 5).pow(quad);
    let eval = |w: &Word| s.evaluate(w).expect("words use E_ij letters");
    check("E35^(n^2) = [E34^n, E45^n]", &eval(&w35), &e35)?;
    check("E25^(n^2) = [E23, E35^(n^2)]", &eval(&Word::commutator(&Word::gen(&e_name(2, 3)), &pow_word(3, 5, sq))), &e25)?;
    check("E25^(n^2) = [E23, [E34^n, E45^n]]", &eval(&w25), &e25)?;
    check("E15^(n^4) = [E13^(n^2), E35^(n^2)]", &eval(&Word::commutator(&pow_word(1, 3, sq), &pow_word(3, 5, sq))), &e15)?;
    check("E15^(n^4) = [[E12^n, E23^n], [E34^n, E45^n]]", &eval(&w15), &e15)?;

    Ok(H5Report {
        n,
        e35_word_length: w35.len(),
        e25_word_length: w25.len(),
        e15_word_length: w15.len(),
        bound_e35: 4 * n,
        bound_e25: 8 * n + 2,
        bound_e15: 16 * n,
        l1: l1(&e25),
        l2: l2(&e15),
    })
}

/// `f(x) = x + 1`, `g(x) = 2x`.
pub fn bs_realization() -> (DyadicAffine, DyadicAffine) {
    (DyadicAffine::translation(int(1)).expect("1 is dyadic"), DyadicAffine::scaling(1))
}

pub fn bs_generators() -> GenSet<DyadicAffine> {
    let (f, g) = bs_realization();
    GenSet::new(vec![("f".into(), f), ("g".into(), g)])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BsReport {
    pub n: u64,
    /// Letters in `g^n f g^{-n}`.
    pub word_length: usize,
    pub bound: u64,
    /// `f^{2^n}(0)` as a decimal string.
    pub image_of_zero: String,
}

pub fn verify_bs_identity(n: u64) -> Result<BsReport, GroupError> {
    assert!((1..63).contains(&n), "n must be in 1..63");
    let (f, _) = bs_realization();
    let s = bs_generators();
    let w = Word::gen("f").conjugated_by(&Word::power_of("g", n as i64));
    let lhs = s.evaluate(&w).expect("words use f and g");
    let rhs = f.pow(1i64 << n);
    check("g^n f g^-n = f^(2^n)", &lhs, &rhs)?;
    let zero = rhs.evaluate(&int(0));
    check("f^(2^n)(0) = 2^n", &DyadicAffine::translation(zero.clone()).unwrap(), &DyadicAffine::translation(pow2(n as i64)).unwrap())?;
    Ok(BsReport { n, word_length: w.len(), bound: 2 * n + 1, image_of_zero: zero.to_string() })
}
