//! IM `(1,1)`-tensors in the dualized presentation: `l ∈ End(A)`,
//! `r ∈ End(TM)` and `D_X(a) = i_X D(a)`.

use std::fmt;
use std::sync::Arc;

use crate::algebroid::Algebroid;
use crate::geometry::{vecops, Matrix, MixedTensor};
use crate::im::check::{section_probes, Probe};
use crate::im::{IMTensor, Probes};
use crate::kernel::RatFn;
use crate::report::Report;

use super::fn_calculus::{nijenhuis_torsion, VvForm};
use super::imvv::{extend_d, extend_l, r_as_vvform};
use super::VvError;

#[derive(Clone, Debug, PartialEq)]
pub struct IM11(IMTensor);

impl IM11 {
    pub fn new(t: IMTensor) -> Result<Self, VvError> {
        if (t.q, t.p) != (1, 1) {
            return Err(VvError::Degree { expected: 1, got: if t.q != 1 { t.q } else { t.p } });
        }
        Ok(IM11(t))
    }

    /// From `D(e_i)` and the matrices of `l` (column `i` is `l(e_i)`) and
    /// `r` (column `a` is `r(∂_a)`).
    pub fn from_parts(alg: &Arc<Algebroid>, d_frame: Vec<MixedTensor>, l: &Matrix, r: &Matrix) -> Result<Self, VvError> {
        let (n, m) = (alg.rank(), alg.m());
        if (l.rows, l.cols) != (n, n) || (r.rows, r.cols) != (m, m) {
            return Err(VvError::Precondition(format!(
                "l must be {n}×{n} and r {m}×{m}, got {}×{} and {}×{}",
                l.rows, l.cols, r.rows, r.cols
            )));
        }
        let l_frame = (0..n).map(|i| alg.section_tensor(&l.col(i))).collect();
        let r_frame = (0..m).map(|j| MixedTensor::one_form(&alg.chart, n, &r.row(j))).collect();
        IM11::new(IMTensor::new(alg.clone(), 1, 1, d_frame, Some(l_frame), Some(r_frame))?)
    }

    pub fn tensor(&self) -> &IMTensor {
        &self.0
    }

    pub fn into_tensor(self) -> IMTensor {
        self.0
    }

    pub fn alg(&self) -> &Arc<Algebroid> {
        &self.0.alg
    }

    pub fn l_matrix(&self) -> Matrix {
        let n = self.alg().rank();
        let l = self.0.l_frame.as_ref().expect("p = 1");
        let mut out = Matrix::zero(n, n);
        for (i, li) in l.iter().enumerate() {
            for k in 0..n {
                out.set(k, i, li.get(0, 1 << k));
            }
        }
        out
    }

    pub fn r_matrix(&self) -> Matrix {
        let m = self.alg().m();
        let r = self.0.r_frame.as_ref().expect("q = 1");
        let mut out = Matrix::zero(m, m);
        for (j, rj) in r.iter().enumerate() {
            for a in 0..m {
                out.set(j, a, rj.get(1 << a, 0));
            }
        }
        out
    }

    pub fn r_form(&self) -> VvForm {
        r_as_vvform(&self.0).expect("q = 1")
    }

    pub fn l_of(&self, a: &[RatFn]) -> Vec<RatFn> {
        self.0.l_of(a).expect("p = 1").as_section()
    }

    pub fn r_of(&self, x: &[RatFn]) -> Vec<RatFn> {
        self.r_matrix().apply(x)
    }

    /// `D_X(a)`.
    pub fn d_x(&self, x: &[RatFn], a: &[RatFn]) -> Vec<RatFn> {
        self.0.d_of(a).i_form(x).as_section()
    }
}

impl fmt::Display for IM11 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = &self.alg().frame_names;
        for (i, d) in self.0.d_frame.iter().enumerate() {
            writeln!(f, "D {} = {}", names[i], d.fmt_with(names))?;
        }
        for (i, l) in self.0.l_frame.as_ref().unwrap().iter().enumerate() {
            writeln!(f, "l {} = {}", names[i], l.fmt_with(names))?;
        }
        let vars = self.alg().chart.var_names();
        for (j, r) in self.0.r_frame.as_ref().unwrap().iter().enumerate() {
            writeln!(f, "r d{} = {}", vars[j], r.fmt_with(names))?;
        }
        Ok(())
    }
}

pub(crate) fn sections(alg: &Algebroid, which: Probes) -> Vec<Probe> {
    section_probes(&alg.frame_names, &alg.chart.var_names(), which)
}

pub(crate) fn coord_fields(alg: &Algebroid) -> Vec<Probe> {
    let names = alg.chart.var_names();
    (0..alg.m()).map(|c| Probe { label: format!("d/d{}", names[c]), value: alg.chart.coord_field(c) }).collect()
}

/// IM1*, IM2*, IM3* and IM6* on sections (frames and scaled) and coordinate
/// vector fields.
pub fn im11_check(t: &IM11) -> Report {
    let alg = t.alg();
    let chart = &alg.chart;
    let mut rep = Report::new(format!("IM (1,1) on {}", alg.name));
    let secs = sections(alg, Probes::Scaled);
    let fields = coord_fields(alg);
    let rm = t.r_matrix();
    for (ia, a) in secs.iter().enumerate() {
        let ra = alg.anchor_of(&a.value);
        for b in secs.iter().skip(ia + 1) {
            let rb = alg.anchor_of(&b.value);
            let ab = alg.bracket(&a.value, &b.value);
            for x in &fields {
                let xv = &x.value;
                let dxa = t.d_x(xv, &a.value);
                let dxb = t.d_x(xv, &b.value);
                let mut v = t.d_x(xv, &ab);
                v = vecops::sub(&v, &alg.bracket(&a.value, &dxb));
                v = vecops::add(&v, &alg.bracket(&b.value, &dxa));
                v = vecops::sub(&v, &t.d_x(&chart.bracket(&rb, xv), &a.value));
                v = vecops::add(&v, &t.d_x(&chart.bracket(&ra, xv), &b.value));
                rep.record("IM1*", format!("({}, {}, {})", a.label, b.label, x.label), v);
            }
        }
    }
    for a in &secs {
        for b in &secs {
            let rb = alg.anchor_of(&b.value);
            let mut v = t.l_of(&alg.bracket(&a.value, &b.value));
            v = vecops::sub(&v, &alg.bracket(&a.value, &t.l_of(&b.value)));
            v = vecops::add(&v, &t.d_x(&rb, &a.value));
            rep.record("IM2*", format!("({}, {})", a.label, b.label), v);
        }
    }
    for a in &secs {
        let ra = alg.anchor_of(&a.value);
        for x in &fields {
            let xv = &x.value;
            let mut v = rm.apply(&chart.bracket(&ra, xv));
            v = vecops::sub(&v, &chart.bracket(&ra, &rm.apply(xv)));
            v = vecops::add(&v, &alg.anchor_of(&t.d_x(xv, &a.value)));
            rep.record("IM3*", format!("({}, {})", a.label, x.label), v);
        }
    }
    for a in sections(alg, Probes::Frames) {
        let v = vecops::sub(&rm.apply(&alg.anchor_of(&a.value)), &alg.anchor_of(&t.l_of(&a.value)));
        rep.record("IM6*", &a.label, v);
    }
    rep
}

/// Components of `Kⁿ`: `l' = lⁿ`, `r' = rⁿ`,
/// `D'_X(a) = Σ_{j=1..n} l^{j−1} D_{r^{n−j}X}(a)`.
pub fn im11_power(t: &IM11, n: u32) -> Result<IM11, VvError> {
    if n == 0 {
        return Err(VvError::Precondition("the power must be positive".to_string()));
    }
    let alg = t.alg();
    let (lm, rm) = (t.l_matrix(), t.r_matrix());
    let rank = alg.rank();
    let mut d_frame = Vec::with_capacity(rank);
    for i in 0..rank {
        let e = alg.frame(i);
        let mut d = alg.zero_tensor(1, 1);
        for c in 0..alg.m() {
            let mut acc = vecops::zeros(rank);
            for j in 1..=n {
                let x = rm.pow(n - j).apply(&alg.chart.coord_field(c));
                let v = lm.pow(j - 1).apply(&t.d_x(&x, &e));
                acc = vecops::add(&acc, &v);
            }
            for (k, f) in acc.into_iter().enumerate() {
                d.set(1 << c, 1 << k, f);
            }
        }
        d_frame.push(d);
    }
    IM11::from_parts(alg, d_frame, &lm.pow(n), &rm.pow(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Structure {
    /// `K² = K`.
    Projection,
    /// `K² = id`.
    Product,
    /// `K² = −id`.
    Complex,
}

impl Structure {
    pub fn parse(s: &str) -> Option<Structure> {
        match s {
            "projection" => Some(Structure::Projection),
            "product" => Some(Structure::Product),
            "complex" => Some(Structure::Complex),
            _ => None,
        }
    }
}

/// `l² = l, r² = r, l D(a) + D(a) r = D(a)` for a projection, and
/// `l² = ±id, r² = ±id, l D(a) + D(a) r = 0` otherwise; the IM equations are
/// folded in under `im/`.
pub fn structure_conditions(t: &IM11, kind: Structure) -> Report {
    let alg = t.alg();
    let (n, m) = (alg.rank(), alg.m());
    let mut rep = Report::new(format!("{kind:?} structure on {}", alg.name));
    if kind == Structure::Complex {
        if n % 2 == 1 {
            rep.record("parity", "rank", crate::report::Value::Note(format!("rank {n} is odd; l² = −id is impossible")));
        }
        if m % 2 == 1 {
            rep.record("parity", "dim", crate::report::Value::Note(format!("dimension {m} is odd; r² = −id is impossible")));
        }
    }
    let (lm, rm) = (t.l_matrix(), t.r_matrix());
    let target = |mat: &Matrix, size: usize| match kind {
        Structure::Projection => mat.clone(),
        Structure::Product => Matrix::identity(size),
        Structure::Complex => Matrix::identity(size).scale(&RatFn::int(-1)),
    };
    let l2 = lm.mul(&lm).sub(&target(&lm, n));
    for i in 0..n {
        rep.record("l-square", &alg.frame_names[i], l2.col(i));
    }
    let r2 = rm.mul(&rm).sub(&target(&rm, m));
    let names = alg.chart.var_names();
    for c in 0..m {
        rep.record("r-square", format!("d/d{}", names[c]), r2.col(c));
    }
    for a in sections(alg, Probes::Scaled) {
        for x in coord_fields(alg) {
            let dxa = t.d_x(&x.value, &a.value);
            let mut v = vecops::add(&lm.apply(&dxa), &t.d_x(&rm.apply(&x.value), &a.value));
            if kind == Structure::Projection {
                v = vecops::sub(&v, &dxa);
            }
            rep.record("mixed", format!("({}, {})", a.label, x.label), v);
        }
    }
    rep.absorb("im", im11_check(t));
    rep
}

/// `(D', l', r') = (D², [D, l], 𝒩_r)`, with `D²` computed from the
/// extended operator and again from the pointwise expansion
/// `D_Y D_X − D_X D_Y − D_{[rX,Y]} + D_{[rY,X]} + l D_{[X,Y]} + D_{r[X,Y]}`.
pub fn nijenhuis_components(t: &IM11) -> Result<IMTensor, VvError> {
    let alg = t.alg();
    let it = t.tensor();
    let n = alg.rank();
    let mut d_frame = Vec::with_capacity(n);
    let mut l_frame = Vec::with_capacity(n);
    let l = it.l_frame.as_ref().expect("p = 1");
    for i in 0..n {
        let de = &it.d_frame[i];
        d_frame.push(extend_d(it, de)?);
        let a = extend_d(it, &l[i])?;
        let b = extend_l(it, de)?.expect("p = 1");
        l_frame.push(a.sub(&b));
    }
    let nr = nijenhuis_torsion(&t.r_form())?;
    let r_frame = (0..alg.m()).map(|s| nr.component(s).with_rank(n)).collect();
    let out = IMTensor::new(alg.clone(), 1, 2, d_frame, Some(l_frame), Some(r_frame))?;

    let chart = &alg.chart;
    let rm = t.r_matrix();
    let lm = t.l_matrix();
    let fields = coord_fields(alg);
    for s in sections(alg, Probes::Scaled) {
        let composed = out.d_of(&s.value);
        for (ia, x) in fields.iter().enumerate() {
            for y in fields.iter().skip(ia + 1) {
                let (xv, yv) = (&x.value, &y.value);
                let xy = chart.bracket(xv, yv);
                let mut v = t.d_x(yv, &t.d_x(xv, &s.value));
                v = vecops::sub(&v, &t.d_x(xv, &t.d_x(yv, &s.value)));
                v = vecops::sub(&v, &t.d_x(&chart.bracket(&rm.apply(xv), yv), &s.value));
                v = vecops::add(&v, &t.d_x(&chart.bracket(&rm.apply(yv), xv), &s.value));
                v = vecops::add(&v, &lm.apply(&t.d_x(&xy, &s.value)));
                v = vecops::add(&v, &t.d_x(&rm.apply(&xy), &s.value));
                let other = composed.eval_form(&[xv.clone(), yv.clone()]).as_section();
                let diff = vecops::sub(&other, &v);
                if !vecops::is_zero(&diff) {
                    let shown: Vec<String> = diff.iter().map(|f| f.to_string()).collect();
                    return Err(VvError::RouteMismatch {
                        probe: format!("({}, {}, {})", s.label, x.label, y.label),
                        diff: format!("[{}]", shown.join(", ")),
                    });
                }
            }
        }
    }
    Ok(out)
}
