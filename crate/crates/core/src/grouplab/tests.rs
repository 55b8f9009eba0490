use std::collections::HashMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::examples::*;
use super::*;
use crate::plcore::PlMap;
use crate::rational::{int, q};

const BUDGET: usize = 1_000_000;

/// Shortest length of every element reachable by a word of length ≤ `radius`,
/// by listing all words.
fn naive_lengths<E: GroupElement>(gens: &GenSet<E>, radius: usize) -> HashMap<E, usize> {
    let letters: Vec<E> = gens.iter().map(|(_, e)| e.clone()).collect();
    let mut best = HashMap::from([(E::identity(), 0)]);
    let mut words = vec![E::identity()];
    for r in 1..=radius {
        let mut next = Vec::with_capacity(words.len() * letters.len());
        for w in &words {
            for s in &letters {
                let e = w.mul(s);
                best.entry(e.clone()).or_insert(r);
                next.push(e);
            }
        }
        words = next;
    }
    best
}

fn pl_pair() -> GenSet<PlMap> {
    let a = PlMap::new(vec![(q(1, 2), q(1, 4))]).unwrap();
    let b = PlMap::new(vec![(q(1, 4), q(1, 2)), (q(1, 2), q(5, 8))]).unwrap();
    GenSet::new(vec![("a".into(), a), ("b".into(), b)])
}

fn h34_45() -> GenSet<UniTri5> {
    GenSet::new(vec![("E34".into(), e(3, 4)), ("E45".into(), e(4, 5))])
}

#[test]
fn radius_zero_ball_is_identity() {
    let ball = bfs_ball(&gamma1_generators(), 0, BUDGET).unwrap();
    assert_eq!(ball.len(), 1);
    assert_eq!(ball.length_of(&UniTri5::identity()), Some(0));
}

#[test]
fn product_of_two_generators_has_length_two() {
    let s = gamma1_generators();
    let ball = bfs_ball(&s, 2, BUDGET).unwrap();
    let p = e(3, 4).mul(&e(4, 5));
    assert_eq!(ball.length_of(&p), Some(2));
    assert!(s.iter().all(|(_, g)| *g != p));
    assert_eq!(ball.length_of(&e(3, 5)), Some(1));
}

#[test]
fn word_length_examples() {
    let s = gamma1_generators();
    assert_eq!(word_length(&UniTri5::identity(), &s, 3, BUDGET).unwrap(), WordLength::Exact { length: 0 });
    // four copies of a generator beat the eight-letter commutator here
    assert_eq!(word_length(&e(3, 5).pow(4), &s, 8, BUDGET).unwrap(), WordLength::Exact { length: 4 });
    assert_eq!(word_length(&e(3, 5).pow(9), &s, 3, BUDGET).unwrap(), WordLength::NotFound { radius: 3 });
    let (f, _) = bs_realization();
    assert_eq!(word_length(&f.pow(4), &bs_generators(), 5, BUDGET).unwrap(), WordLength::Exact { length: 4 });
}

#[test]
fn budget_is_enforced() {
    assert_eq!(
        bfs_ball(&gamma1_generators(), 6, 100).unwrap_err(),
        GroupError::BudgetExceeded { budget: 100, radius: 3 }
    );
}

#[test]
fn gamma1_sphere_sizes_match_oracle() {
    let ball = bfs_ball(&gamma1_generators(), 8, BUDGET).unwrap();
    assert_eq!(ball.sphere_sizes(), vec![1, 8, 36, 112, 272, 568, 1076, 1896, 3152]);
}

#[test]
fn distortion_tables_match_oracle() {
    let s = gamma1_generators();
    let d35 = distortion_table(&e(3, 5), &s, 8, BUDGET).unwrap();
    assert_eq!(d35, (0..=8).collect::<Vec<u64>>());
    assert_eq!(distortion_function(&e(3, 5), &s, 0, BUDGET).unwrap(), 0);

    let (f, _) = bs_realization();
    let df = distortion_table(&f, &bs_generators(), 7, BUDGET).unwrap();
    assert_eq!(df, vec![0, 1, 2, 3, 4, 6, 8, 12]);
    assert!(df[5] >= 4);
    assert_eq!(distortion_table(&UniTri5::identity(), &s, 2, BUDGET), Err(GroupError::Torsion));
}

#[test]
fn e25_is_undistorted_in_gamma1() {
    let d = distortion_table(&e(2, 5), &gamma1_generators(), 12, BUDGET).unwrap();
    assert_eq!(d, (0..=12).collect::<Vec<u64>>());
}

#[test]
fn bs_power_lengths_match_oracle() {
    let (f, _) = bs_realization();
    let ball = bfs_ball(&bs_generators(), 7, BUDGET).unwrap();
    let got: Vec<Option<usize>> = power_lengths(&f, &ball, 12).into_iter().map(|(_, l)| l).collect();
    let want = [1, 2, 3, 4, 5, 5, 6, 6, 7, 7].map(Some).into_iter().chain([None, Some(7)]).collect::<Vec<_>>();
    assert_eq!(got, want);
    assert_eq!(ball.sphere_sizes(), vec![1, 4, 12, 26, 50, 98, 184, 336]);
}

#[test]
fn fekete_examples() {
    assert_eq!(fekete_estimate(&[3; 6]).unwrap(), q(3, 6));
    let linear: Vec<u64> = (1..=10).collect();
    assert_eq!(fekete_estimate(&linear).unwrap(), int(1));
    assert_eq!(fekete_estimate(&[1, 5]), Err(GroupError::SubadditivityViolation { a: 1, b: 1 }));
}

#[test]
fn h5_identities_small() {
    let r1 = verify_h5_identities(1).unwrap();
    assert_eq!((r1.e35_word_length, r1.e25_word_length, r1.e15_word_length), (4, 10, 16));
    let r2 = verify_h5_identities(2).unwrap();
    assert_eq!(r2.e35_word_length as u64, r2.bound_e35);
    assert_eq!(r2.l1, 4);
    assert_eq!(r2.l2, 16);
    let s = h5_generators();
    let w = Word::commutator(&Word::gen("E34"), &Word::gen("E45"));
    assert_eq!(s.evaluate(&w).unwrap(), e(3, 5));
}

#[test]
fn h5_identities_up_to_fifty() {
    for n in 1..=50 {
        let r = verify_h5_identities(n).unwrap();
        assert_eq!(r.e35_word_length as u64, 4 * n);
        assert_eq!(r.e25_word_length as u64, 8 * n + 2);
        assert_eq!(r.e15_word_length as u64, 16 * n);
        assert_eq!(l1(&e(2, 5).pow(n as i64)), n);
    }
}

#[test]
fn bs_identities() {
    for n in 1..=20 {
        let r = verify_bs_identity(n).unwrap();
        assert_eq!(r.word_length as u64, r.bound);
        assert_eq!(r.image_of_zero, (1u64 << n).to_string());
    }
    let (f, g) = bs_realization();
    assert_eq!(g.mul(&f).mul(&g.inverse()), f.pow(2));
}

#[test]
fn genset_comparison_examples() {
    let s = gamma1_generators();
    assert_eq!(genset_comparison(&s, &s, 3, BUDGET).unwrap().constant, int(1));
    let t = s.with("P", e(3, 4).mul(&e(4, 5)));
    let c = genset_comparison(&s, &t, 4, BUDGET).unwrap();
    assert_eq!(c.constant, int(1));
    let tb = bfs_ball(&t, 4, BUDGET).unwrap();
    for (g, l) in bfs_ball(&s, 4, BUDGET).unwrap().iter() {
        assert!(tb.length_of(g).unwrap() <= l);
    }
    let back = genset_comparison(&t, &s, 5, BUDGET).unwrap();
    assert_eq!(back.constant, int(2));
    assert!(back.checked > 1000);
    let lone = GenSet::new(vec![("E34".to_string(), e(3, 4))]);
    assert_eq!(
        genset_comparison(&s, &lone, 3, BUDGET).unwrap_err(),
        GroupError::GeneratorUnreachable("E25".into())
    );
}

fn assert_matches_naive<E: GroupElement>(gens: &GenSet<E>, radius: usize) {
    let ball = bfs_ball(gens, radius, BUDGET).unwrap();
    let naive = naive_lengths(gens, radius);
    assert_eq!(ball.len(), naive.len());
    for (e, l) in &naive {
        assert_eq!(ball.length_of(e), Some(*l), "{e:?}");
    }
}

#[test]
fn bfs_matches_naive_enumeration() {
    assert_matches_naive(&bs_generators(), 5);
    assert_matches_naive(&h34_45(), 5);
    assert_matches_naive(&pl_pair(), 5);
}

#[test]
fn ball_is_symmetric_and_witnesses_are_sound() {
    let s = gamma1_generators();
    let ball = bfs_ball(&s, 5, BUDGET).unwrap();
    for (g, l) in ball.iter() {
        assert_eq!(ball.length_of(&g.inverse()), Some(l));
        let w = ball.witness(g).unwrap();
        assert_eq!(w.len(), l);
        assert_eq!(s.evaluate(&w).unwrap(), *g);
    }
}

#[test]
fn triangle_inequality_on_half_ball() {
    let s = bs_generators();
    let ball = bfs_ball(&s, 6, BUDGET).unwrap();
    let half: Vec<(&DyadicAffine, usize)> = ball.iter().filter(|(_, l)| *l <= 3).collect();
    for (a, la) in &half {
        for (b, lb) in &half {
            assert!(ball.length_of(&a.mul(b)).unwrap() <= la + lb);
        }
    }
}

#[test]
fn ball_does_not_depend_on_thread_count() {
    let s = gamma1_generators();
    let build = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| bfs_ball(&s, 6, BUDGET).unwrap())
    };
    let (one, four) = (build(1), build(4));
    let a: Vec<(UniTri5, usize)> = one.iter().map(|(e, l)| (*e, l)).collect();
    let b: Vec<(UniTri5, usize)> = four.iter().map(|(e, l)| (*e, l)).collect();
    assert_eq!(a, b);
}

#[test]
fn gamma1_growth_is_polynomial() {
    let ball = bfs_ball(&gamma1_generators(), 12, BUDGET).unwrap();
    let sizes = ball.sphere_sizes();
    let cumulative: Vec<usize> = sizes.iter().scan(0, |acc, s| { *acc += s; Some(*acc) }).collect();
    // |B(r+1)|/|B(r)| keeps shrinking, unlike exponential growth
    for r in 2..11 {
        let (a, b, c) = (cumulative[r - 1] as u128, cumulative[r] as u128, cumulative[r + 1] as u128);
        assert!(c * b < b * b * b / a, "radius {r}");
    }
}

#[test]
fn power_exponents() {
    assert_eq!(e(3, 5).pow(-7).power_exponent(&e(3, 5)), Some(-7));
    assert_eq!(e(3, 4).mul(&e(4, 5)).power_exponent(&e(3, 4)), None);
    let a = e(3, 4).mul(&e(4, 5));
    assert_eq!(a.pow(5).power_exponent(&a), Some(5));
    let (f, g) = bs_realization();
    assert_eq!(f.pow(12).power_exponent(&f), Some(12));
    assert_eq!(g.pow(-3).power_exponent(&g), Some(-3));
    assert_eq!(g.power_exponent(&f), None);
    let p = pl_pair().named()[0].1.clone();
    assert_eq!(p.pow(9).power_exponent(&p), Some(9));
    assert_eq!(p.pow(-4).power_exponent(&p), Some(-4));
}

#[test]
fn element_json() {
    let a = e(2, 5).mul(&e(3, 4));
    let v = serde_json::to_value(a).unwrap();
    assert_eq!(v, serde_json::json!([0, 0, 0, 0, 0, 0, 1, 1, 0, 0]));
    assert_eq!(serde_json::from_value::<UniTri5>(v).unwrap(), a);
    let (f, g) = bs_realization();
    let h = g.mul(&f).inverse();
    let v = serde_json::to_value(&h).unwrap();
    assert_eq!(v, serde_json::json!({"p": "2^-1", "q": "-1/1"}));
    assert_eq!(serde_json::from_value::<DyadicAffine>(v).unwrap(), h);
    assert!(serde_json::from_value::<DyadicAffine>(serde_json::json!({"p": "3", "q": "0"})).is_err());
    assert!(serde_json::from_value::<DyadicAffine>(serde_json::json!({"p": "2^0", "q": "1/3"})).is_err());
}

fn random_in(rng: &mut ChaCha8Rng, free: &[(usize, usize)]) -> UniTri5 {
    free.iter().fold(UniTri5::identity(), |acc, &(i, j)| acc.mul(&e(i, j).pow(rng.gen_range(-6..=6))))
}

#[test]
fn length_function_axioms() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g1 = [(2, 5), (3, 4), (3, 5), (4, 5)];
    let g2 = [(1, 5), (2, 3), (2, 4), (2, 5), (3, 4), (3, 5), (4, 5)];
    assert_eq!(l1(&UniTri5::identity()), 0);
    assert_eq!(l2(&UniTri5::identity()), 0);
    for _ in 0..200 {
        let (a, b) = (random_in(&mut rng, &g1), random_in(&mut rng, &g1));
        assert!(in_gamma1(&a) && in_gamma1(&a.mul(&b)));
        assert_eq!(l1(&a), l1(&a.inverse()));
        assert!(l1(&a.mul(&b)) <= l1(&a) + l1(&b));
        let (a, b) = (random_in(&mut rng, &g2), random_in(&mut rng, &g2));
        assert!(in_gamma2(&a) && in_gamma2(&a.mul(&b)));
        assert_eq!(l2(&a), l2(&a.inverse()));
        assert!(l2(&a.mul(&b)) <= l2(&a) + l2(&b));
    }
}

proptest! {
    #[test]
    fn matrix_group_laws(xs in prop::array::uniform10(-20i64..20), ys in prop::array::uniform10(-20i64..20), zs in prop::array::uniform10(-20i64..20)) {
        let (a, b, c) = (UniTri5::from_entries(xs), UniTri5::from_entries(ys), UniTri5::from_entries(zs));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert!(a.mul(&a.inverse()).is_identity());
        prop_assert!(a.inverse().mul(&a).is_identity());
    }

    #[test]
    fn affine_action_is_composition(k1 in -5i64..5, k2 in -5i64..5, n1 in -64i64..64, n2 in -64i64..64, x in -100i64..100) {
        let a = DyadicAffine::new(k1, q(n1, 8)).unwrap();
        let b = DyadicAffine::new(k2, q(n2, 4)).unwrap();
        let x = q(x, 16);
        prop_assert_eq!(a.mul(&b).evaluate(&x), a.evaluate(&b.evaluate(&x)));
        prop_assert_eq!(a.inverse().evaluate(&a.evaluate(&x)), x);
    }
}
