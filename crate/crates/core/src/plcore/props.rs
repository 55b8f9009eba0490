use num_traits::One;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::sample;

fn maps(seed: u64, count: usize) -> (Vec<PlMap>, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = (0..count).map(|_| sample::pl_map(&mut rng, 5, 48)).collect();
    (v, rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_laws(seed in any::<u64>()) {
        let (m, _) = maps(seed, 3);
        let (f, g, k) = (&m[0], &m[1], &m[2]);
        prop_assert_eq!(f.compose(g).compose(k), f.compose(&g.compose(k)));
        prop_assert!(f.compose(&f.invert()).is_identity());
        prop_assert_eq!(&f.invert().invert(), f);
    }

    #[test]
    fn chain_rule_containment(seed in any::<u64>()) {
        let (m, _) = maps(seed, 2);
        let (f, g) = (&m[0], &m[1]);
        let mut allowed: Vec<Rational> = f.breakpoints().iter().map(|y| g.evaluate_inverse(y).unwrap()).collect();
        allowed.extend(g.breakpoints());
        for b in f.compose(g).breakpoints() {
            prop_assert!(allowed.contains(&b));
        }
    }

    #[test]
    fn eta_is_multiplicative(seed in any::<u64>()) {
        let (m, _) = maps(seed, 2);
        let (f, g) = (&m[0], &m[1]);
        let (ef, eg, efg) = (f.eta(), g.eta(), f.compose(g).eta());
        prop_assert_eq!(efg.slope_at_zero, ef.slope_at_zero * eg.slope_at_zero);
        prop_assert_eq!(efg.slope_at_one, ef.slope_at_one * eg.slope_at_one);
    }

    #[test]
    fn slope_norm_is_submultiplicative(seed in any::<u64>()) {
        let (m, _) = maps(seed, 2);
        let (f, g) = (&m[0], &m[1]);
        prop_assert!(f.compose(g).slope_norm() <= f.slope_norm() * g.slope_norm());
        prop_assert!(f.slope_norm() >= Rational::one());
    }

    #[test]
    fn evaluate_and_invert_cohere(seed in any::<u64>()) {
        let (m, mut rng) = maps(seed, 1);
        let f = &m[0];
        let inv = f.invert();
        for _ in 0..16 {
            let x = sample::unit_rational(&mut rng, 97);
            prop_assert_eq!(inv.evaluate(&f.evaluate(&x).unwrap()).unwrap(), x);
        }
    }

    #[test]
    fn endpoint_slopes_grow_along_powers(x in 1i64..32, y in 1i64..32) {
        prop_assume!(x != y);
        let f = PlMap::new(vec![(crate::rational::q(x, 32), crate::rational::q(y, 32))]).unwrap();
        let s = f.eta().slope_at_zero;
        let c = if s > Rational::one() { s } else { s.recip() };
        let mut p = PlMap::identity();
        for n in 1..=8u32 {
            p = p.compose(&f);
            prop_assert!(p.slope_norm() >= num_traits::pow(c.clone(), n as usize));
        }
    }
}
