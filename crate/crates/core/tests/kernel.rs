mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use workbench::algebroid::Algebroid;
use workbench::kernel::{eval_expr, parse_expr_free, rf, RatFn};

fn rand_frac(rng: &mut ChaCha8Rng) -> RatFn {
    let v = plane().vars.clone();
    let num = rand_poly(rng, &v, 2, 3);
    let mut den = rand_poly(rng, &v, 1, 2);
    if den.is_zero() {
        den = RatFn::one();
    }
    &num / &den
}

fn reparse(f: &RatFn) -> RatFn {
    eval_expr(&parse_expr_free(&f.to_string()).unwrap()).unwrap()
}

#[test]
fn normal_form_is_canonical() {
    assert_eq!(rf("(x^2 - y^2)/(x + y)"), rf("x - y"));
    assert_eq!(rf("1/x + 1/y"), rf("(x + y)/(x*y)"));
    assert_eq!(rf("(2*x)/(4*x*y)"), rf("1/(2*y)"));
    assert_eq!(rf("x/(-y)"), rf("-x/y"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn field_axioms(seed in 0u64..100_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (rand_frac(&mut rng), rand_frac(&mut rng), rand_frac(&mut rng));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        if !b.is_zero() {
            prop_assert_eq!(&(&a / &b) * &b, a.clone());
        }
    }

    #[test]
    fn partials_obey_leibniz_and_commute(seed in 0u64..100_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = plane().vars.clone();
        let (f, g) = (rand_frac(&mut rng), rand_frac(&mut rng));
        let (x, y) = (v[0], v[1]);
        prop_assert_eq!((&f * &g).partial(x), &(&f.partial(x) * &g) + &(&f * &g.partial(x)));
        prop_assert_eq!(f.partial(x).partial(y), f.partial(y).partial(x));
        prop_assert_eq!((&f + &g).partial(y), &f.partial(y) + &g.partial(y));
    }

    #[test]
    fn printed_form_parses_back(seed in 0u64..100_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = rand_frac(&mut rng);
        prop_assert_eq!(reparse(&f), f);
    }

    #[test]
    fn exterior_derivative_squares_to_zero_and_is_a_derivation(seed in 0u64..100_000, p in 0usize..2, r in 0usize..2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Algebroid::tangent(&space());
        let alpha = rand_tensor(&mut rng, &a, p, 0, 2);
        let beta = rand_tensor(&mut rng, &a, r, 0, 2);
        prop_assert!(alpha.d_formwise().d_formwise().is_zero());
        let lhs = alpha.w(&beta).d_formwise();
        let sign = if p % 2 == 0 { 1 } else { -1 };
        let rhs = alpha.d_formwise().w(&beta).add(&alpha.w(&beta.d_formwise()).scale_int(sign));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn wedge_is_graded_commutative_and_associative(seed in 0u64..100_000, p in 0usize..3, r in 0usize..2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Algebroid::tangent(&space());
        let alpha = rand_tensor(&mut rng, &a, p, 0, 1);
        let beta = rand_tensor(&mut rng, &a, r, 0, 1);
        let gamma = rand_tensor(&mut rng, &a, 1, 0, 1);
        let sign = if (p * r) % 2 == 0 { 1 } else { -1 };
        prop_assert_eq!(alpha.w(&beta), beta.w(&alpha).scale_int(sign));
        prop_assert_eq!(alpha.w(&beta).w(&gamma), alpha.w(&beta.w(&gamma)));
    }
}
