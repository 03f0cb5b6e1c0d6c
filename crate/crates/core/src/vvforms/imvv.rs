//! IM vector-valued forms: `(D, l, r)` of degrees `(1, p)`, their extension
//! to `Ω•(M, A)` and the bracket induced by the Frölicher–Nijenhuis bracket.

use std::sync::Arc;

use crate::geometry::chart::same_chart;
use crate::geometry::MixedTensor;
use crate::im::IMTensor;
use crate::kernel::RatFn;

use super::fn_calculus::{fn_bracket, VvForm};
use super::{sign, VvError};

fn need_q1(t: &IMTensor) -> Result<(), VvError> {
    if t.q != 1 {
        return Err(VvError::Degree { expected: 1, got: t.q });
    }
    Ok(())
}

/// `r` as an element of `Ωᵖ(M, TM)`.
pub fn r_as_vvform(t: &IMTensor) -> Result<VvForm, VvError> {
    need_q1(t)?;
    let r = t.r_frame.as_ref().expect("q = 1 carries r");
    let comps: Vec<MixedTensor> = r.iter().map(|f| f.with_rank(t.alg.m())).collect();
    Ok(VvForm::from_components(&t.alg.chart, t.p, &comps))
}

fn check_eta(t: &IMTensor, eta: &MixedTensor) -> Result<(), VvError> {
    if !same_chart(eta.chart(), &t.alg.chart) || eta.rank() != t.alg.rank() {
        return Err(VvError::AlgebroidMismatch);
    }
    if eta.q() != 1 {
        return Err(VvError::Degree { expected: 1, got: eta.q() });
    }
    Ok(())
}

/// `l(α ⊗ a) = α ∧ l(a)`; `None` when `p = 0`.
pub fn extend_l(t: &IMTensor, eta: &MixedTensor) -> Result<Option<MixedTensor>, VvError> {
    need_q1(t)?;
    check_eta(t, eta)?;
    let Some(l) = t.l_frame.as_ref() else {
        return Ok(None);
    };
    let mut out = t.alg.zero_tensor(eta.p() + t.p - 1, 1);
    for (mask, alpha) in eta.split_multi() {
        let i = mask.trailing_zeros() as usize;
        out = out.add(&alpha.w(&l[i]));
    }
    Ok(Some(out))
}

/// `D(α ⊗ a) = α ∧ D(a) + (−1)ʲ(dα ∧ l(a) − (−1)^{j(p−1)} L_rα ⊗ a)` for
/// `α ∈ Ωʲ(M)`, applied to the frame expansion of `η`.
pub fn extend_d(t: &IMTensor, eta: &MixedTensor) -> Result<MixedTensor, VvError> {
    need_q1(t)?;
    check_eta(t, eta)?;
    let j = eta.p();
    let mut out = t.alg.zero_tensor(j + t.p, 1);
    for (mask, alpha) in eta.split_multi() {
        let i = mask.trailing_zeros() as usize;
        let frame = t.alg.frame(i);
        out = out.add(&pair_formula(t, &alpha, &frame, &t.d_frame[i], t.l_frame.as_ref().map(|l| &l[i]))?);
    }
    Ok(out)
}

/// The same formula for a single `α ⊗ a` with an arbitrary section `a`,
/// using the Leibniz extension of `D` and `l`.
pub fn extend_d_pair(t: &IMTensor, alpha: &MixedTensor, a: &[RatFn]) -> Result<MixedTensor, VvError> {
    need_q1(t)?;
    let da = t.d_of(a);
    let la = t.l_of(a);
    pair_formula(t, alpha, a, &da, la.as_ref())
}

fn pair_formula(
    t: &IMTensor,
    alpha: &MixedTensor,
    a: &[RatFn],
    da: &MixedTensor,
    la: Option<&MixedTensor>,
) -> Result<MixedTensor, VvError> {
    let alg = &t.alg;
    let n = alg.rank();
    if alpha.q() != 0 {
        return Err(VvError::Degree { expected: 0, got: alpha.q() });
    }
    let alpha = if alpha.rank() == n { alpha.clone() } else { alpha.with_rank(n) };
    let j = alpha.p() as i64;
    let p = t.p as i64;
    let mut out = alpha.w(da);
    let mut inner = alg.zero_tensor(alpha.p() + t.p, 1);
    if let Some(la) = la {
        inner = inner.add(&alpha.d_formwise().w(la));
    }
    let r = r_as_vvform(t)?;
    let lr = r.lie(&alpha).with_rank(n).w(&alg.section_tensor(a));
    inner = inner.sub(&lr.scale_int(sign(j * (p - 1))));
    out = out.add(&inner.scale_int(sign(j)));
    Ok(out)
}

fn same_alg(t1: &IMTensor, t2: &IMTensor) -> Result<(), VvError> {
    if Arc::ptr_eq(&t1.alg, &t2.alg) || t1.alg == t2.alg {
        Ok(())
    } else {
        Err(VvError::AlgebroidMismatch)
    }
}

/// `[D, l](x) = D(l x) − (−1)^{p_D (p_l − 1)} l(D x)` with `p_l` the form
/// degree of `l(e_i)` plus one.
fn commutator_dl(td: &IMTensor, tl: &IMTensor, i: usize) -> Result<Option<MixedTensor>, VvError> {
    let Some(l) = tl.l_frame.as_ref() else {
        return Ok(None);
    };
    let x = td.alg.frame_tensor(i);
    let first = extend_d(td, &l[i])?;
    let dx = extend_d(td, &x)?;
    let second = extend_l(tl, &dx)?.expect("l present");
    let s = sign((td.p * (tl.p - 1)) as i64);
    Ok(Some(first.sub(&second.scale_int(s))))
}

/// The bracket of two IM vector-valued forms of degrees `p1`, `p2`:
/// `D = D2∘D1 − (−1)^{p1p2} D1∘D2`, `l = [D2,l1] − (−1)^{p1p2}[D1,l2]`,
/// `r = [r1, r2]`.
pub fn imvv_bracket(t1: &IMTensor, t2: &IMTensor) -> Result<IMTensor, VvError> {
    need_q1(t1)?;
    need_q1(t2)?;
    same_alg(t1, t2)?;
    let alg = t1.alg.clone();
    let (p1, p2) = (t1.p, t2.p);
    let s = sign((p1 * p2) as i64);
    let n = alg.rank();
    let mut d_frame = Vec::with_capacity(n);
    for i in 0..n {
        let a = extend_d(t2, &t1.d_frame[i])?;
        let b = extend_d(t1, &t2.d_frame[i])?;
        d_frame.push(a.sub(&b.scale_int(s)));
    }
    let l_frame = if p1 + p2 > 0 {
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let mut out = alg.zero_tensor(p1 + p2 - 1, 1);
            if let Some(c) = commutator_dl(t2, t1, i)? {
                out = out.add(&c);
            }
            if let Some(c) = commutator_dl(t1, t2, i)? {
                out = out.sub(&c.scale_int(s));
            }
            v.push(out);
        }
        Some(v)
    } else {
        None
    };
    let r = fn_bracket(&r_as_vvform(t1)?, &r_as_vvform(t2)?)?;
    let r_frame = (0..alg.m()).map(|s| r.component(s).with_rank(n)).collect();
    Ok(IMTensor::new(alg, 1, p1 + p2, d_frame, l_frame, Some(r_frame))?)
}
