mod common;

use std::sync::Arc;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use workbench::algebroid::Algebroid;
use workbench::geometry::MixedTensor;
use workbench::im::{
    coboundary, im_check, im_check_with, im_redundancy, prelie_from_im20, IMForm, IMTensor, ImEq, Outcome, Probes,
    QDifferential,
};
use workbench::kernel::{rf, RatFn};

fn canonical() -> IMTensor {
    IMTensor::canonical_cotangent(&arc(so3star())).unwrap()
}

/// Canonical triple with `l(dx1) = 2dx1`.
fn mutated_canonical() -> IMTensor {
    let mut t = canonical();
    let l = t.l_frame.as_mut().unwrap();
    l[0] = l[0].scale_int(2);
    t
}

#[test]
fn canonical_leibniz_value() {
    let t = canonical();
    let a = &t.alg;
    let got = t.d_of(&[RatFn::zero(), rf("x1"), RatFn::zero()]);
    assert_eq!(got, a.dx(0).w(&a.dx(1)));
    assert_eq!(t.d_of(&a.frame(2)), t.d_frame[2]);
}

#[test]
fn leibniz_rule_holds_for_arbitrary_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for alg in [arc(so3star()), arc(tangent_plane())] {
        for (p, qd) in [(1, 1), (2, 0), (0, 2), (1, 2)] {
            let t = coboundary(&alg, &rand_phi(&mut rng, &alg, p, qd, 2)).unwrap();
            let vars = alg.chart.vars.clone();
            let a = rand_vec(&mut rng, &vars, alg.rank(), 2);
            let f = rand_poly(&mut rng, &vars, 2, 3);
            let fa: Vec<RatFn> = a.iter().map(|c| c * &f).collect();
            let df = MixedTensor::one_form(&alg.chart, alg.rank(), &alg.chart.gradient(&f));
            let mut rhs = t.d_of(&a).scale(&f);
            if let Some(l) = t.l_of(&a) {
                rhs = rhs.add(&df.w(&l));
            }
            if let Some(r) = t.r_of(&alg.chart.gradient(&f)) {
                rhs = rhs.sub(&alg.section_tensor(&a).w(&r));
            }
            assert_eq!(t.d_of(&fa), rhs);
        }
    }
}

#[test]
fn canonical_cotangent_triple_is_im() {
    let rep = im_check(&canonical());
    assert!(rep.passed(), "{rep}");
    assert!(rep.evaluated["IM1"] > 0 && rep.evaluated["IM2"] > 0 && rep.evaluated["IM4"] > 0);
}

#[test]
fn uniform_rescale_of_l_stays_im() {
    let t = canonical();
    let mut u = t.clone();
    u.l_frame = Some(t.l_frame.as_ref().unwrap().iter().map(|l| l.scale_int(2)).collect());
    assert!(im_check(&u).passed());
}

#[test]
fn single_frame_rescale_fails_im2_and_im4() {
    let t = mutated_canonical();
    let rep = im_check(&t);
    assert!(rep.fails("IM2") && rep.fails("IM4"));
    // with IM2 broken the IM1 defect is no longer tensorial: frames miss it
    let frames = im_check_with(&t, Probes::Frames, &[ImEq::IM1]);
    assert!(frames.passed() && rep.fails("IM1"));
    let a = &t.alg;
    let r = t.residual(ImEq::IM2, &a.frame(1), &a.frame(2), &[], &[]).unwrap();
    assert_eq!(r, a.dx(0));
    let r = t.residual(ImEq::IM4, &a.frame(0), &a.frame(1), &[], &[]).unwrap();
    assert_eq!(r, a.scalar(rf("-x3")));
}

#[test]
fn frame_failures_are_scaled_failures() {
    let t = mutated_canonical();
    let frames = im_check_with(&t, Probes::Frames, &ImEq::ALL);
    assert!(frames.failing_checks().is_subset(&im_check(&t).failing_checks()));
    assert!(im_check_with(&canonical(), Probes::Frames, &ImEq::ALL).passed());
}

#[test]
fn coboundaries_pass() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let shapes = [(0, 1), (1, 0), (1, 1), (2, 0), (0, 2), (2, 1), (1, 2)];
    for alg in [arc(so3star()), arc(tangent_plane())] {
        for &(p, qd) in &shapes {
            let deg = rng.gen_range(1..=2);
            let phi = rand_phi(&mut rng, &alg, p, qd, deg);
            let t = coboundary(&alg, &phi).unwrap();
            let rep = im_check(&t);
            assert!(rep.passed(), "Φ = {}\n{rep}", phi);
        }
    }
}

#[test]
fn coboundary_of_zero_is_zero() {
    let alg = arc(so3star());
    let t = coboundary(&alg, &alg.zero_tensor(1, 1)).unwrap();
    assert_eq!(t, IMTensor::zero(&alg, 1, 1));
}

#[test]
fn coboundary_of_two_form_on_so3star() {
    let alg = arc(so3star());
    let phi = MixedTensor::monomial(&alg.chart, 3, rf("x1"), &[1, 2], &[]);
    let t = coboundary(&alg, &phi).unwrap();
    // D(dx1) = ℒ_{ρ(dx1)}Φ with ρ(dx1) = x3 ∂2 − x2 ∂3 and Φ = x1 dx2∧dx3
    assert!(t.d_frame[0].is_zero());
    // ρ(dx2) = −x3 ∂1 + x1 ∂3
    let want = MixedTensor::monomial(&alg.chart, 3, rf("-x3"), &[1, 2], &[])
        .add(&MixedTensor::monomial(&alg.chart, 3, rf("-x1"), &[0, 1], &[]));
    assert_eq!(t.d_frame[1], want);
    assert!(im_check(&t).passed());
    assert_eq!(t.l_frame.as_ref().unwrap()[0], phi.i_form(&alg.anchor.row(0)));
}

#[test]
fn redundancy_on_valid_triples() {
    let alg = arc(so3star());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let t = coboundary(&alg, &rand_phi(&mut rng, &alg, 1, 1, 2)).unwrap();
    let r = im_redundancy(&t, &[ImEq::IM1, ImEq::IM2, ImEq::IM6]).unwrap();
    assert!(r.holds());
    assert!([ImEq::IM3, ImEq::IM4, ImEq::IM5].iter().all(|e| r.derived().contains(e)));
    let r = im_redundancy(&t, &[ImEq::IM1, ImEq::IM3, ImEq::IM6]).unwrap();
    assert!(r.holds());
    assert!(r.derived().contains(&ImEq::IM2));
    let r = im_redundancy(&canonical(), &[ImEq::IM1, ImEq::IM2, ImEq::IM6]).unwrap();
    assert!(r.holds());
    assert!(r.derived().contains(&ImEq::IM4));
}

#[test]
fn redundancy_is_vacuous_when_premises_fail() {
    let r = im_redundancy(&mutated_canonical(), &[ImEq::IM1, ImEq::IM2, ImEq::IM6]).unwrap();
    assert!(r.outcomes.iter().any(|(_, o)| *o == Outcome::Vacuous));
    assert!(r.holds());
}

#[test]
fn redundancy_rejects_degrees_beyond_the_bundle() {
    let alg = arc(tangent_plane());
    let t = IMTensor::zero(&alg, 0, 3);
    assert!(im_redundancy(&t, &[ImEq::IM1]).is_err());
}

#[test]
fn qdiff_sign_and_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for alg in [arc(so3star()), arc(tangent_plane())] {
        for q in [1, 2] {
            let t = coboundary(&alg, &rand_phi(&mut rng, &alg, 0, q, 2)).unwrap();
            let d = QDifferential::from_im(&t).unwrap();
            let r = t.r_frame.as_ref().unwrap();
            let s = if q == 1 { -1 } else { 1 };
            for j in 0..alg.m() {
                assert_eq!(d.delta0[j], r[j].scale_int(s));
            }
            assert_eq!(d.to_im(), t);
        }
    }
}

#[test]
fn qdiff_rejects_forms() {
    assert!(QDifferential::from_im(&canonical()).is_err());
}

#[test]
fn qdiff_rules_hold_iff_im() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for alg in [arc(so3star()), arc(tangent_plane())] {
        for q in [1, 2] {
            let t = coboundary(&alg, &rand_phi(&mut rng, &alg, 0, q, 2)).unwrap();
            assert!(im_check(&t).passed());
            assert!(QDifferential::from_im(&t).unwrap().check(Probes::Scaled).passed());
            let mut bad = t.clone();
            bad.d_frame[0] = bad.d_frame[0].add(&rand_phi(&mut rng, &alg, 0, q, 1));
            let im_ok = im_check(&bad).passed();
            let qd_ok = QDifferential::from_im(&bad).unwrap().check(Probes::Scaled).passed();
            assert_eq!(im_ok, qd_ok);
        }
    }
}

#[test]
fn imform_of_canonical_triple() {
    let t = canonical();
    let f = IMForm::from_im(&t).unwrap();
    for i in 0..3 {
        assert_eq!(f.mu[i], t.alg.dx(i));
        assert!(f.nu[i].is_zero());
    }
    assert!(f.check(Probes::Scaled).passed());
    assert_eq!(f.to_im(), t);
    let df = f.differential();
    assert!(df.is_zero());
}

#[test]
fn imform_of_coboundary_and_differential() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for alg in [arc(so3star()), arc(tangent_plane())] {
        for p in [1, 2] {
            let phi = rand_phi(&mut rng, &alg, p, 0, 2);
            let t = coboundary(&alg, &phi).unwrap();
            let f = IMForm::from_im(&t).unwrap();
            for i in 0..alg.rank() {
                assert_eq!(f.mu[i], phi.i_form(&alg.anchor.row(i)));
                let want = alg.action(&alg.frame(i), &phi).sub(&f.mu[i].d_formwise());
                assert_eq!(f.nu[i], want);
            }
            assert!(f.check(Probes::Scaled).passed());
            let df = f.differential();
            assert!(df.check(Probes::Scaled).passed(), "d(μ,ν) not IM");
            assert!(im_check(&df.to_im()).passed());
            assert!(df.differential().is_zero());
        }
    }
}

#[test]
fn imform_fails_with_source() {
    let f = IMForm::from_im(&mutated_canonical()).unwrap();
    assert!(!f.check(Probes::Scaled).passed());
}

#[test]
fn prelie_of_symplectic_plane_is_abelian() {
    let alg = arc(tangent_plane());
    let pi = MixedTensor::monomial(&alg.chart, 2, RatFn::one(), &[], &[0, 1]);
    let t = coboundary(&alg, &pi).unwrap();
    let pl = prelie_from_im20(&t).unwrap();
    assert!(pl.table.iter().flatten().flatten().all(RatFn::is_zero));
}

#[test]
fn prelie_of_zero_triple_is_trivial() {
    let alg = arc(so3star());
    let pl = prelie_from_im20(&IMTensor::zero(&alg, 2, 0)).unwrap();
    assert!(pl.anchor.is_zero());
    assert!(pl.table.iter().flatten().flatten().all(RatFn::is_zero));
}

#[test]
fn prelie_of_poisson_coboundary_is_cotangent_of_negated_bivector() {
    let c = space();
    let alg = arc(Algebroid::tangent(&c));
    let pi = pi_so3(&c);
    let pl = prelie_from_im20(&coboundary(&alg, &pi).unwrap()).unwrap();
    let oracle = Algebroid::cotangent(&c, &pi.neg()).unwrap();
    assert_eq!(pl.anchor, oracle.anchor);
    assert_eq!(pl.table, oracle.table);
    assert!(pl.check().passed());
    let pl2 = prelie_from_im20(&coboundary(&alg, &pi.neg()).unwrap()).unwrap();
    let oracle2 = Algebroid::cotangent(&c, &pi).unwrap();
    assert_eq!(pl2.table, oracle2.table);
}

#[test]
fn prelie_of_non_poisson_bivector_fails_jacobi() {
    let c = space();
    let alg = arc(Algebroid::tangent(&c));
    let pi = pi_so3(&c).add(&MixedTensor::monomial(&c, 3, rf("x1^2"), &[], &[0, 1]));
    let t = alg.schouten(&pi, &pi);
    assert!(!t.is_zero());
    let pl = prelie_from_im20(&coboundary(&alg, &pi).unwrap()).unwrap();
    assert!(!pl.check().passed());
}

fn small_poly() -> impl Strategy<Value = RatFn> {
    let terms = ["0", "1", "x1", "x2", "x3", "x1*x2", "x3^2", "2*x1 - x2"];
    (0..terms.len(), -2i64..=2).prop_map(move |(i, c)| rf(terms[i]).scale_int(c))
}

fn defect_l(t: &IMTensor, a: &[RatFn], b: &[RatFn]) -> MixedTensor {
    t.residual(ImEq::IM2, a, b, &[], &[]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn im2_defect_is_tensorial_given_im4_to_im6(
        f in small_poly(),
        i in 0usize..3,
        j in 0usize..3,
        seed in 0u64..1000,
    ) {
        // a triple with IM4 and IM6 intact but D perturbed
        let alg = Arc::new(so3star());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = coboundary(&alg, &rand_phi(&mut rng, &alg, 1, 1, 1)).unwrap();
        t.d_frame[i] = t.d_frame[i].add(&rand_phi(&mut rng, &alg, 1, 1, 1));
        let (a, b) = (alg.frame(i), alg.frame(j));
        let fa: Vec<RatFn> = a.iter().map(|c| c * &f).collect();
        let fb: Vec<RatFn> = b.iter().map(|c| c * &f).collect();
        let base = defect_l(&t, &a, &b).scale(&f);
        prop_assert_eq!(defect_l(&t, &fa, &b), base.clone());
        prop_assert_eq!(defect_l(&t, &a, &fb), base);
    }

    #[test]
    fn imform_round_trip(seed in 0u64..1000, p in 1usize..3) {
        let alg = Arc::new(tangent_plane());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = (0..2).map(|_| rand_phi(&mut rng, &alg, p - 1, 0, 2)).collect();
        let nu = (0..2).map(|_| rand_phi(&mut rng, &alg, p, 0, 2)).collect();
        let f = IMForm { alg: alg.clone(), p, mu, nu };
        prop_assert_eq!(IMForm::from_im(&f.to_im()).unwrap(), f);
    }

    #[test]
    fn qdiff_round_trip(seed in 0u64..1000, q in 1usize..3) {
        let alg = Arc::new(so3star());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d1 = (0..3).map(|_| rand_phi(&mut rng, &alg, 0, q, 2)).collect();
        let d0 = (0..3).map(|_| rand_phi(&mut rng, &alg, 0, q - 1, 2)).collect();
        let d = QDifferential { alg: alg.clone(), q, delta0: d0, delta1: d1 };
        prop_assert_eq!(QDifferential::from_im(&d.to_im()).unwrap(), d);
    }
}
