//! Lie bialgebroid data as a 2-differential `δ` on `Γ(∧•A)`, and the
//! `δ_K`, `Θ` criteria for an IM `(1,1)`-tensor on `A`.

use std::sync::Arc;

use crate::algebroid::Algebroid;
use crate::geometry::{vecops, Matrix, MixedTensor};
use crate::im::{Probes, QDifferential};
use crate::kernel::RatFn;
use crate::report::Report;

use super::im11::{sections, IM11};
use super::VvError;

/// `(A, δ)` with `δ² = 0`; `A*` carries `ρ_*(ξ)f = ⟨δf, ξ⟩` and the
/// Koszul bracket.
#[derive(Clone, Debug)]
pub struct BialgebroidData {
    pub alg: Arc<Algebroid>,
    pub delta: QDifferential,
}

impl BialgebroidData {
    pub fn new(alg: &Arc<Algebroid>, delta: QDifferential) -> Result<Self, VvError> {
        if delta.q != 2 {
            return Err(VvError::Degree { expected: 2, got: delta.q });
        }
        if !Arc::ptr_eq(&delta.alg, alg) && *delta.alg != **alg {
            return Err(VvError::AlgebroidMismatch);
        }
        let mut probes: Vec<(String, MixedTensor)> = Vec::new();
        for (j, x) in alg.chart.var_names().into_iter().enumerate() {
            probes.push((x, alg.scalar(alg.chart.coord(j))));
        }
        for (i, e) in alg.frame_names.iter().enumerate() {
            probes.push((e.clone(), alg.frame_tensor(i)));
        }
        for (label, x) in probes {
            let dd = delta.apply(&delta.apply(&x));
            if !dd.is_zero() {
                return Err(VvError::DeltaSquare { probe: label, value: dd.to_string() });
            }
        }
        Ok(BialgebroidData { alg: alg.clone(), delta })
    }

    /// `δ` from a second algebroid structure on the dual bundle, whose
    /// frame is dual to that of `A`: `δx_j = Σ_k ρ_*(e^k)_j e_k`,
    /// `δe_i = −Σ_{k<l} c_*^{kl}_i e_k∧e_l`.
    pub fn from_dual(alg: &Arc<Algebroid>, dual: &Algebroid) -> Result<Self, VvError> {
        let (n, m) = (alg.rank(), alg.m());
        if dual.rank() != n || dual.chart.vars != alg.chart.vars {
            return Err(VvError::AlgebroidMismatch);
        }
        let delta0 = (0..m).map(|j| alg.section_tensor(&dual.anchor.col(j))).collect();
        let delta1 = (0..n)
            .map(|i| {
                let mut t = alg.zero_tensor(0, 2);
                for k in 0..n {
                    for l in k + 1..n {
                        t.set(0, (1 << k) | (1 << l), -&dual.c(k, l)[i]);
                    }
                }
                t
            })
            .collect();
        BialgebroidData::new(alg, QDifferential { alg: alg.clone(), q: 2, delta0, delta1 })
    }

    /// `ρ_*(e^k)` as a vector field.
    pub fn dual_anchor(&self, k: usize) -> Vec<RatFn> {
        self.delta.delta0.iter().map(|d| d.get(0, 1 << k)).collect()
    }

    /// `ρ_*(ξ)`.
    pub fn dual_anchor_of(&self, xi: &[RatFn]) -> Vec<RatFn> {
        let mut out = vecops::zeros(self.alg.m());
        for (k, c) in xi.iter().enumerate() {
            if !c.is_zero() {
                out = vecops::add(&out, &vecops::scale(c, &self.dual_anchor(k)));
            }
        }
        out
    }

    pub fn delta_of(&self, a: &[RatFn]) -> MixedTensor {
        self.delta.apply(&self.alg.section_tensor(a))
    }
}

#[derive(Clone, Debug)]
pub struct DeltaKOutcome {
    pub report: Report,
    /// `Θ(e_i)` as bivectors.
    pub theta: Vec<MixedTensor>,
}

fn l_star(lm: &Matrix, mu: &[RatFn]) -> Vec<RatFn> {
    lm.transpose().apply(mu)
}

fn pair2(t: &MixedTensor, m1: &[RatFn], m2: &[RatFn]) -> RatFn {
    t.eval_multi(&[m1.to_vec(), m2.to_vec()]).as_scalar()
}

/// `δ_K(a)(μ₁, μ₂) = δ(a)(μ₁, l*μ₂) − ⟨D_{ρ_*μ₁}a, μ₂⟩`.
fn delta_k(b: &BialgebroidData, t: &IM11, a: &[RatFn], m1: &[RatFn], m2: &[RatFn]) -> RatFn {
    let lm = t.l_matrix();
    let first = pair2(&b.delta_of(a), m1, &l_star(&lm, m2));
    let second = vecops::dot(&t.d_x(&b.dual_anchor_of(m1), a), m2);
    &first - &second
}

/// `⟨Θ(μ₁,μ₂), a⟩ = ⟨D_{ρ_*μ₁}a, μ₂⟩ + δ(a)(l*μ₁, μ₂) − δ(la)(μ₁, μ₂)`.
fn theta_at(b: &BialgebroidData, t: &IM11, a: &[RatFn], m1: &[RatFn], m2: &[RatFn]) -> RatFn {
    let lm = t.l_matrix();
    let d = vecops::dot(&t.d_x(&b.dual_anchor_of(m1), a), m2);
    let x = pair2(&b.delta_of(a), &l_star(&lm, m1), m2);
    let y = pair2(&b.delta_of(&t.l_of(a)), m1, m2);
    &(&d + &x) - &y
}

fn i_theta(alg: &Algebroid, theta: &[MixedTensor], x: &MixedTensor) -> MixedTensor {
    let k = x.q();
    let mut out = alg.zero_tensor(0, k + 1);
    if k == 0 {
        return out;
    }
    for (&(_, j), c) in x.entries() {
        let idx: Vec<usize> = crate::geometry::index::bits(j).collect();
        // i_Θ(e_{j1}∧…∧e_{jk}) = Σ_s (−1)^s e_{j1}∧…∧Θ(e_{js})∧…∧e_{jk}
        for (s, &js) in idx.iter().enumerate() {
            let before = idx[..s].iter().fold(0, |m, &r| m | (1 << r));
            let after = idx[s + 1..].iter().fold(0, |m, &r| m | (1 << r));
            let term = alg.frames(before).w(&theta[js]).w(&alg.frames(after));
            let sgn = if s % 2 == 0 { 1 } else { -1 };
            out = out.add(&term.scale(&c.scale_int(sgn)));
        }
    }
    out
}

pub fn deltak_theta(b: &BialgebroidData, t: &IM11) -> Result<DeltaKOutcome, VvError> {
    let alg = &b.alg;
    if !Arc::ptr_eq(alg, t.alg()) && **alg != **t.alg() {
        return Err(VvError::AlgebroidMismatch);
    }
    let n = alg.rank();
    let lm = t.l_matrix();
    let rm = t.r_matrix();
    let mut rep = Report::new(format!("δ_K and Θ on {}", alg.name));
    let co: Vec<(String, Vec<RatFn>)> =
        (0..n).map(|k| (format!("{}*", alg.frame_names[k]), vecops::unit(n, k))).collect();

    for a in sections(alg, Probes::Scaled) {
        for (ia, (l1, m1)) in co.iter().enumerate() {
            for (l2, m2) in co.iter().skip(ia) {
                let v = &delta_k(b, t, &a.value, m1, m2) + &delta_k(b, t, &a.value, m2, m1);
                rep.record("skew", format!("({}; {l1}, {l2})", a.label), v);
            }
        }
    }
    for (l, mu) in &co {
        let lhs = rm.apply(&b.dual_anchor_of(mu));
        let rhs = b.dual_anchor_of(&l_star(&lm, mu));
        rep.record("anchor", l, vecops::sub(&lhs, &rhs));
    }

    let mut theta = Vec::with_capacity(n);
    for i in 0..n {
        let e = alg.frame(i);
        let mut th = alg.zero_tensor(0, 2);
        for k in 0..n {
            for l in 0..n {
                let v = theta_at(b, t, &e, &co[k].1, &co[l].1);
                if k < l {
                    th.set(0, (1 << k) | (1 << l), v.clone());
                }
                if k <= l {
                    let w = theta_at(b, t, &e, &co[l].1, &co[k].1);
                    rep.record("theta-skew", format!("({}; {}, {})", alg.frame_names[i], co[k].0, co[l].0), &v + &w);
                }
            }
        }
        theta.push(th);
    }
    for a in sections(alg, Probes::Scaled).into_iter().skip(n) {
        let mut want = alg.zero_tensor(0, 2);
        for (i, c) in a.value.iter().enumerate() {
            if !c.is_zero() {
                want = want.add(&theta[i].scale(c));
            }
        }
        for (k, (l1, m1)) in co.iter().enumerate() {
            for (l2, m2) in co.iter().skip(k + 1) {
                let v = &theta_at(b, t, &a.value, m1, m2) - &pair2(&want, m1, m2);
                rep.record("theta-tensorial", format!("({}; {l1}, {l2})", a.label), v);
            }
        }
    }

    let delta = &b.delta;
    let mut probes: Vec<(String, MixedTensor)> = Vec::new();
    for (j, x) in alg.chart.var_names().into_iter().enumerate() {
        probes.push((x, alg.scalar(alg.chart.coord(j))));
    }
    for a in sections(alg, Probes::Scaled) {
        probes.push((a.label, alg.section_tensor(&a.value)));
    }
    for (label, x) in probes {
        let v = delta.apply(&i_theta(alg, &theta, &x)).add(&i_theta(alg, &theta, &delta.apply(&x)));
        rep.record("delta-theta", label, v);
    }
    Ok(DeltaKOutcome { report: rep, theta })
}
