#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use workbench::algebroid::Algebroid;
use workbench::geometry::index::subsets;
use workbench::geometry::{Chart, Matrix, MixedTensor};
use workbench::im::coboundary;
use workbench::kernel::{q, rf, Monomial, Poly, RatFn, Var};
use workbench::vvforms::IM11;

pub fn plane() -> Arc<Chart> {
    Chart::new("R2", &["x", "y"])
}

pub fn space() -> Arc<Chart> {
    Chart::new("R3", &["x1", "x2", "x3"])
}

/// `Π = x3 ∂1∧∂2 + x1 ∂2∧∂3 + x2 ∂3∧∂1`.
pub fn pi_so3(c: &Arc<Chart>) -> MixedTensor {
    let mut pi = MixedTensor::zero(c, 3, 0, 2);
    pi = pi.add(&MixedTensor::monomial(c, 3, c.coord(2), &[], &[0, 1]));
    pi = pi.add(&MixedTensor::monomial(c, 3, c.coord(0), &[], &[1, 2]));
    pi.add(&MixedTensor::monomial(c, 3, c.coord(1), &[], &[2, 0]))
}

pub fn so3star() -> Algebroid {
    let c = space();
    Algebroid::cotangent(&c, &pi_so3(&c)).unwrap().with_name("so3star")
}

pub fn tangent_plane() -> Algebroid {
    Algebroid::tangent(&plane()).with_name("tangent-plane")
}

/// Random polynomial in `vars` with small integer coefficients.
pub fn rand_poly(rng: &mut ChaCha8Rng, vars: &[Var], max_deg: u32, terms: usize) -> RatFn {
    let mut p = Poly::zero();
    for _ in 0..terms {
        let exps = vars.iter().map(|&v| (v, rng.gen_range(0..=max_deg))).collect::<Vec<_>>();
        let mut m = Monomial::from_exps(exps);
        while m.degree() > max_deg {
            let e: Vec<(Var, u32)> = m.exps().iter().map(|&(v, e)| (v, e.saturating_sub(1))).collect();
            m = Monomial::from_exps(e);
        }
        p.add_term(m, q(rng.gen_range(-3..=3)));
    }
    RatFn::poly(p)
}

pub fn rand_tensor(rng: &mut ChaCha8Rng, a: &Algebroid, p: usize, qd: usize, max_deg: u32) -> MixedTensor {
    let mut t = a.zero_tensor(p, qd);
    for i in subsets(a.m(), p) {
        for j in subsets(a.rank(), qd) {
            t.set(i, j, rand_poly(rng, &a.chart.vars, max_deg, 2));
        }
    }
    t
}

pub fn rand_vec(rng: &mut ChaCha8Rng, vars: &[Var], len: usize, max_deg: u32) -> Vec<RatFn> {
    (0..len).map(|_| rand_poly(rng, vars, max_deg, 2)).collect()
}

pub fn arc(a: Algebroid) -> std::sync::Arc<Algebroid> {
    std::sync::Arc::new(a)
}

/// Random `Φ ∈ Γ(∧ᵖT*M⊗∧ᵠA)` with entries of degree ≤ `max_deg`.
pub fn rand_phi(rng: &mut ChaCha8Rng, a: &Algebroid, p: usize, qd: usize, max_deg: u32) -> MixedTensor {
    rand_tensor(rng, a, p, qd, max_deg)
}

pub fn cob11(alg: &Arc<Algebroid>, phi: &MixedTensor) -> IM11 {
    IM11::new(coboundary(alg, phi).unwrap()).unwrap()
}

/// `Σ_{ij} m[i][j] dx_j ⊗ ∂_i`, i.e. the endomorphism with matrix `m`.
pub fn endo(c: &Arc<Chart>, m: &[&[&str]]) -> MixedTensor {
    let mut t = MixedTensor::zero(c, c.dim(), 1, 1);
    for (i, row) in m.iter().enumerate() {
        for (j, s) in row.iter().enumerate() {
            t = t.add(&MixedTensor::monomial(c, c.dim(), rf(s), &[j], &[i]));
        }
    }
    t
}

/// On the rank-2 bare bundle over `ℝ³` with `l = e1⊗e¹` and `r = dx3⊗∂3`:
/// `D_{∂1}e_i = g_i e1`, `D_{∂2}e_i = h_i e1`, `D_{∂3}e_i = k_i e2`.
pub fn bare_projection(g: [RatFn; 2], h: [RatFn; 2], k: [RatFn; 2]) -> IM11 {
    let c = space();
    let a = arc(Algebroid::bare(&c, 2));
    let d = (0..2)
        .map(|i| {
            let mut t = a.zero_tensor(1, 1);
            t = t.add(&MixedTensor::monomial(&c, 2, g[i].clone(), &[0], &[0]));
            t = t.add(&MixedTensor::monomial(&c, 2, h[i].clone(), &[1], &[0]));
            t.add(&MixedTensor::monomial(&c, 2, k[i].clone(), &[2], &[1]))
        })
        .collect();
    let l = Matrix::from_rows(vec![vec![RatFn::one(), RatFn::zero()], vec![RatFn::zero(), RatFn::zero()]]);
    let mut r = Matrix::zero(3, 3);
    r.set(2, 2, RatFn::one());
    IM11::from_parts(&a, d, &l, &r).unwrap()
}

/// A random member of the bare family; each `Λ` entry is zero with
/// probability ½ and the `∇⁺` pair is a gradient with probability ½.
pub fn rand_bare_projection(rng: &mut ChaCha8Rng) -> IM11 {
    let v = space().vars.clone();
    let maybe = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.5) { RatFn::zero() } else { rand_poly(rng, &v, 2, 2) };
    let (g2, h2, k1) = (maybe(rng), maybe(rng), maybe(rng));
    let (g1, h1) = if rng.gen_bool(0.5) {
        let phi = rand_poly(rng, &v, 3, 3);
        (phi.partial(v[0]), phi.partial(v[1]))
    } else {
        (rand_poly(rng, &v, 2, 2), rand_poly(rng, &v, 2, 2))
    };
    let k2 = rand_poly(rng, &v, 2, 2);
    bare_projection([g1, g2], [h1, h2], [k1, k2])
}

/// Projection instances: flat and non-flat, coboundaries and otherwise.
pub fn projection_instances() -> Vec<(&'static str, IM11)> {
    let p = plane();
    let tp = arc(Algebroid::tangent(&p));
    let s = space();
    let ts = arc(Algebroid::tangent(&s));
    let x = || rf("x1");
    vec![
        ("split-plane", cob11(&tp, &endo(&p, &[&["0", "0"], &["0", "1"]]))),
        ("graph-plane", cob11(&tp, &endo(&p, &[&["1", "x"], &["0", "0"]]))),
        ("non-involutive", cob11(&ts, &endo(&s, &[&["1", "0", "0"], &["0", "1", "0"], &["0", "x1", "0"]]))),
        ("bare-flat", bare_projection([x(), RatFn::zero()], [RatFn::zero(), RatFn::zero()], [RatFn::zero(), x()])),
        ("bare-lambda", bare_projection([RatFn::zero(), x()], [RatFn::zero(), RatFn::zero()], [RatFn::zero(), RatFn::zero()])),
        ("bare-curved", bare_projection([RatFn::zero(), RatFn::zero()], [x(), RatFn::zero()], [RatFn::zero(), RatFn::zero()])),
    ]
}
