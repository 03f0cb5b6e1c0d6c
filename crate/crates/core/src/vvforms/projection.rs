//! Projections `K² = K` at the infinitesimal level: the splittings
//! `A = A⁰ ⊕ A¹`, `TM = T⁰ ⊕ T¹` cut out by `l` and `r`, the pieces `Λ±`,
//! `∇±` of `D`, and the three flatness criteria.

use std::sync::Arc;

use crate::algebroid::Algebroid;
use crate::geometry::{vecops, Matrix};
use crate::im::Probes;
use crate::kernel::RatFn;
use crate::report::{Report, Value};

use super::fn_calculus::torsion_on;
use super::im11::{coord_fields, nijenhuis_components, sections, IM11};
use super::VvError;

/// Checks whose conjunction is the flatness criterion.
pub const CRITERIA: [&str; 6] = ["lambda-plus", "lambda-minus", "T0-involutive", "T1-involutive", "flat-plus", "flat-minus"];

#[derive(Clone, Debug)]
pub struct ProjectionAnalysis {
    pub t: IM11,
    /// Projector onto `A¹ = im l` along `A⁰ = ker l`, and its complement.
    pub a1: Matrix,
    pub a0: Matrix,
    /// Projector onto `T¹ = im r` along `T⁰ = ker r`, and its complement.
    pub t1: Matrix,
    pub t0: Matrix,
    /// Ranks of `A¹` and `T¹` (traces of the projectors), when constant.
    pub ranks: Option<(i64, i64)>,
    pub report: Report,
    /// `Λ± = 0`, `T⁰`, `T¹` involutive, `∇±` flat.
    pub criteria: bool,
    /// `(D², [D,l], 𝒩_r) = 0`.
    pub torsion_free: bool,
}

impl ProjectionAnalysis {
    /// `Λ⁺_X(a) = D_{X⁰}(a⁰)`.
    pub fn lambda_plus(&self, x: &[RatFn], a: &[RatFn]) -> Vec<RatFn> {
        self.t.d_x(&self.t0.apply(x), &self.a0.apply(a))
    }

    /// `Λ⁻_X(a) = D_{X¹}(a¹)`.
    pub fn lambda_minus(&self, x: &[RatFn], a: &[RatFn]) -> Vec<RatFn> {
        self.t.d_x(&self.t1.apply(x), &self.a1.apply(a))
    }

    /// `∇⁺_X(a) = D_{X⁰}(a¹)`, a `T⁰`-connection on `A¹`.
    pub fn nabla_plus(&self, x: &[RatFn], a: &[RatFn]) -> Vec<RatFn> {
        self.t.d_x(&self.t0.apply(x), &self.a1.apply(a))
    }

    /// `∇⁻_X(a) = −D_{X¹}(a⁰)`, a `T¹`-connection on `A⁰`.
    pub fn nabla_minus(&self, x: &[RatFn], a: &[RatFn]) -> Vec<RatFn> {
        vecops::neg(&self.t.d_x(&self.t1.apply(x), &self.a0.apply(a)))
    }
}

fn trace_rank(p: &Matrix) -> Option<i64> {
    let mut tr = RatFn::zero();
    for i in 0..p.rows {
        tr = &tr + &p.get(i, i);
    }
    let q = tr.as_constant()?;
    q.is_integer().then(|| q.to_integer().try_into().ok()).flatten()
}

fn columns(p: &Matrix) -> Vec<(usize, Vec<RatFn>)> {
    (0..p.cols).map(|i| (i, p.col(i))).filter(|(_, c)| !vecops::is_zero(c)).collect()
}

pub(crate) fn complement(p: &Matrix) -> Matrix {
    Matrix::identity(p.rows).sub(p)
}

/// Curvature of a connection `∇` along the fields `xs` on the sections `secs`,
/// with `[X,Y]` fed through `∇` as is.
fn curvature(
    rep: &mut Report,
    check: &str,
    alg: &Algebroid,
    xs: &[(String, Vec<RatFn>)],
    secs: &[(String, Vec<RatFn>)],
    nabla: impl Fn(&[RatFn], &[RatFn]) -> Vec<RatFn>,
) {
    let chart = &alg.chart;
    for (ix, (lx, x)) in xs.iter().enumerate() {
        for (ly, y) in xs.iter().skip(ix + 1) {
            let xy = chart.bracket(x, y);
            for (la, a) in secs {
                let mut v = nabla(x, &nabla(y, a));
                v = vecops::sub(&v, &nabla(y, &nabla(x, a)));
                v = vecops::sub(&v, &nabla(&xy, a));
                rep.record(check, format!("({lx}, {ly}; {la})"), v);
            }
        }
    }
}

pub fn projection_analysis(t: &IM11) -> Result<ProjectionAnalysis, VvError> {
    let alg = t.alg().clone();
    let (lm, rm) = (t.l_matrix(), t.r_matrix());
    if !lm.mul(&lm).sub(&lm).is_zero() || !rm.mul(&rm).sub(&rm).is_zero() {
        return Err(VvError::Precondition("l and r must be idempotent".to_string()));
    }
    let chart = alg.chart.clone();
    let names = chart.var_names();
    let mut rep = Report::new(format!("projection on {}", alg.name));
    let (a1, a0, t1, t0) = (lm.clone(), complement(&lm), rm.clone(), complement(&rm));
    let ranks = match (trace_rank(&a1), trace_rank(&t1)) {
        (Some(ra), Some(rt)) => Some((ra, rt)),
        _ => {
            rep.record("rank", "trace", Value::Note("projector trace is not a constant integer".to_string()));
            None
        }
    };
    let an = analysis(t, a1, a0, t1, t0, ranks);

    let fe = |p: &Matrix| -> Vec<(String, Vec<RatFn>)> {
        columns(p).into_iter().map(|(i, c)| (alg.frame_names[i].clone(), c)).collect()
    };
    let ff = |p: &Matrix| -> Vec<(String, Vec<RatFn>)> {
        columns(p).into_iter().map(|(c, v)| (format!("d/d{}", names[c]), v)).collect()
    };
    let (sec0, sec1, fld0, fld1) = (fe(&an.a0), fe(&an.a1), ff(&an.t0), ff(&an.t1));

    for (l, a) in &sec0 {
        rep.record("inclusion-A0", l, an.t1.apply(&alg.anchor_of(a)));
    }
    for (l, a) in &sec1 {
        rep.record("inclusion-A1", l, an.t0.apply(&alg.anchor_of(a)));
    }
    let fields = coord_fields(&alg);
    for s in sections(&alg, Probes::Frames) {
        for x in &fields {
            let p = format!("({}, {})", s.label, x.label);
            rep.record("range-plus", &p, an.a0.apply(&t.d_x(&an.t0.apply(&x.value), &s.value)));
            rep.record("range-minus", &p, an.a1.apply(&t.d_x(&an.t1.apply(&x.value), &s.value)));
        }
    }

    // Tensoriality of Λ± and the Leibniz rules of ∇± in the section slot.
    for (j, xj) in names.iter().enumerate() {
        let f = chart.coord(j);
        let df = chart.gradient(&f);
        for x in &fields {
            for (la, a) in sec0.iter().chain(&sec1) {
                let fa = vecops::scale(&f, a);
                let p = format!("({}, {xj}·{la})", x.label);
                let lp = vecops::sub(&an.lambda_plus(&x.value, &fa), &vecops::scale(&f, &an.lambda_plus(&x.value, a)));
                rep.record("lambda-plus-tensorial", &p, lp);
                let lmn = vecops::sub(&an.lambda_minus(&x.value, &fa), &vecops::scale(&f, &an.lambda_minus(&x.value, a)));
                rep.record("lambda-minus-tensorial", &p, lmn);
                let x0f = vecops::dot(&an.t0.apply(&x.value), &df);
                let mut np = vecops::sub(&an.nabla_plus(&x.value, &fa), &vecops::scale(&f, &an.nabla_plus(&x.value, a)));
                np = vecops::sub(&np, &vecops::scale(&x0f, &an.a1.apply(a)));
                rep.record("nabla-plus-leibniz", &p, np);
                let x1f = vecops::dot(&an.t1.apply(&x.value), &df);
                let mut nm = vecops::sub(&an.nabla_minus(&x.value, &fa), &vecops::scale(&f, &an.nabla_minus(&x.value, a)));
                nm = vecops::sub(&nm, &vecops::scale(&x1f, &an.a0.apply(a)));
                rep.record("nabla-minus-leibniz", &p, nm);
            }
        }
    }

    for x in &fields {
        for (la, a) in &sec0 {
            rep.record("lambda-plus", format!("({}, {la})", x.label), an.lambda_plus(&x.value, a));
        }
        for (lb, b) in &sec1 {
            rep.record("lambda-minus", format!("({}, {lb})", x.label), an.lambda_minus(&x.value, b));
        }
    }

    // Curvature R_r(X,Y) = r[X⁰,Y⁰] and co-curvature R̄_r(X,Y) = (id − r)[X¹,Y¹];
    // their sum is 𝒩_r.
    for (ia, xa) in fields.iter().enumerate() {
        for xb in fields.iter().skip(ia + 1) {
            let p = format!("({}, {})", xa.label, xb.label);
            let (u, v) = (&xa.value, &xb.value);
            let curv = an.t1.apply(&chart.bracket(&an.t0.apply(u), &an.t0.apply(v)));
            let cocurv = an.t0.apply(&chart.bracket(&an.t1.apply(u), &an.t1.apply(v)));
            let n = torsion_on(&chart, &rm, u, v);
            rep.record("torsion-split", &p, vecops::sub(&n, &vecops::add(&curv, &cocurv)));
            rep.record("T0-involutive", &p, curv);
            rep.record("T1-involutive", &p, cocurv);
        }
    }

    curvature(&mut rep, "flat-plus", &alg, &fld0, &sec1, |x, a| an.nabla_plus(x, a));
    curvature(&mut rep, "flat-minus", &alg, &fld1, &sec0, |x, a| an.nabla_minus(x, a));

    let criteria = CRITERIA.iter().all(|c| !rep.fails(c));
    let nc = nijenhuis_components(t)?;
    let torsion_free = nc.d_frame.iter().chain(nc.l_frame.iter().flatten()).chain(nc.r_frame.iter().flatten()).all(|x| x.is_zero());
    if criteria != torsion_free {
        rep.record(
            "equivalence",
            "criteria vs torsion",
            Value::Note(format!("criteria hold: {criteria}, torsion components vanish: {torsion_free}")),
        );
    }
    Ok(ProjectionAnalysis { report: rep, criteria, torsion_free, ..an })
}

fn analysis(t: &IM11, a1: Matrix, a0: Matrix, t1: Matrix, t0: Matrix, ranks: Option<(i64, i64)>) -> ProjectionAnalysis {
    ProjectionAnalysis {
        t: t.clone(),
        a1,
        a0,
        t1,
        t0,
        ranks,
        report: Report::new(""),
        criteria: false,
        torsion_free: false,
    }
}

/// The projection `K = (Q + id)/2` of a product structure `Q`:
/// `l = (l′ + id)/2`, `r = (r′ + id)/2`, `D = D′/2` (the identity has `D = 0`).
pub fn projection_from_product(q: &IM11) -> Result<IM11, VvError> {
    let alg: &Arc<Algebroid> = q.alg();
    let half = crate::kernel::rf("1/2");
    let (n, m) = (alg.rank(), alg.m());
    let l = q.l_matrix().add(&Matrix::identity(n)).scale(&half);
    let r = q.r_matrix().add(&Matrix::identity(m)).scale(&half);
    let d = q.tensor().d_frame.iter().map(|x| x.scale(&half)).collect();
    IM11::from_parts(alg, d, &l, &r)
}
