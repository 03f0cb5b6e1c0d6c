//! Matched pairs of Lie algebroids, their morphisms, and the matched-pair
//! description of a flat projection.

use std::fmt;
use std::sync::Arc;

use crate::algebroid::Algebroid;
use crate::geometry::{vecops, Matrix};
use crate::im::Probes;
use crate::kernel::RatFn;
use crate::report::{Report, Value};

use super::im11::{coord_fields, sections, structure_conditions, Structure, IM11};
use super::projection::{complement, projection_analysis};
use super::VvError;

type Labeled = Vec<(String, Vec<RatFn>)>;

/// A subbundle `im(proj)` of an ambient algebroid, with `proj` idempotent.
#[derive(Clone, Debug)]
pub struct Side {
    pub ambient: Arc<Algebroid>,
    pub proj: Matrix,
    pub label: String,
}

impl Side {
    pub fn new(ambient: &Arc<Algebroid>, proj: Matrix, label: impl Into<String>) -> Result<Self, VvError> {
        let n = ambient.rank();
        if (proj.rows, proj.cols) != (n, n) {
            return Err(VvError::Precondition(format!("projector must be {n}×{n}")));
        }
        if !proj.mul(&proj).sub(&proj).is_zero() {
            return Err(VvError::Precondition("projector is not idempotent".to_string()));
        }
        Ok(Side { ambient: ambient.clone(), proj, label: label.into() })
    }

    /// Nonzero columns of the projector, labeled by the ambient frame.
    pub fn spanning(&self) -> Labeled {
        (0..self.proj.cols)
            .map(|i| (self.ambient.frame_names[i].clone(), self.proj.col(i)))
            .filter(|(_, c)| !vecops::is_zero(c))
            .collect()
    }

    /// `(id − proj)` applied to `s`; zero iff `s` lies in the side.
    pub fn defect(&self, s: &[RatFn]) -> Vec<RatFn> {
        complement(&self.proj).apply(s)
    }

    fn anchor(&self, s: &[RatFn]) -> Vec<RatFn> {
        self.ambient.anchor_of(s)
    }

    fn bracket(&self, s: &[RatFn], t: &[RatFn]) -> Vec<RatFn> {
        self.ambient.bracket(s, t)
    }

    /// `proj[s, t]` over spanning pairs: the subalgebroid condition.
    pub fn closure(&self) -> Labeled {
        let span = self.spanning();
        let mut out = Vec::new();
        for (i, (l1, s1)) in span.iter().enumerate() {
            for (l2, s2) in span.iter().skip(i + 1) {
                out.push((format!("({l1}, {l2})"), self.defect(&self.bracket(s1, s2))));
            }
        }
        out
    }
}

/// `(s, t) ↦ ∇_s t`.
pub type Rep = Arc<dyn Fn(&[RatFn], &[RatFn]) -> Vec<RatFn> + Send + Sync>;

#[derive(Clone)]
pub struct MatchedPairData {
    pub a: Side,
    pub b: Side,
    /// `∇_a b`.
    pub on_b: Rep,
    /// `∇_b a`.
    pub on_a: Rep,
}

impl fmt::Debug for MatchedPairData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatchedPairData({}, {})", self.a.label, self.b.label)
    }
}

impl MatchedPairData {
    pub fn new(a: Side, b: Side, on_b: Rep, on_a: Rep) -> Result<Self, VvError> {
        if a.ambient.chart.vars != b.ambient.chart.vars {
            return Err(VvError::ChartMismatch);
        }
        Ok(MatchedPairData { a, b, on_b, on_a })
    }

    /// `E = A ⊕ B` with `B = im(proj_b)`: `∇_a b = pr_B[a,b]`, `∇_b a = pr_A[b,a]`.
    pub fn from_splitting(ambient: &Arc<Algebroid>, proj_b: Matrix, labels: (&str, &str)) -> Result<Self, VvError> {
        let b = Side::new(ambient, proj_b, labels.1)?;
        let a = Side::new(ambient, complement(&b.proj), labels.0)?;
        let (amb, pa, pb) = (ambient.clone(), a.proj.clone(), b.proj.clone());
        let amb2 = ambient.clone();
        let on_b: Rep = Arc::new(move |x, y| pb.apply(&amb.bracket(x, y)));
        let on_a: Rep = Arc::new(move |y, x| pa.apply(&amb2.bracket(y, x)));
        MatchedPairData::new(a, b, on_b, on_a)
    }

    pub fn label(&self) -> String {
        format!("({}, {})", self.a.label, self.b.label)
    }
}

/// Both sides with `f·s` for the coordinate functions `f`.
fn scaled(side: &Side) -> Labeled {
    let chart = &side.ambient.chart;
    let span = side.spanning();
    let mut out = span.clone();
    for (j, x) in chart.var_names().iter().enumerate() {
        for (l, s) in &span {
            out.push((format!("{x}·{l}"), vecops::scale(&chart.coord(j), s)));
        }
    }
    out
}

/// Representation axioms of `∇ : Γ(S) × Γ(V) → Γ(V)`.
fn representation(rep: &mut Report, tag: &str, s: &Side, v: &Side, nabla: &Rep) {
    let chart = &s.ambient.chart;
    let (ss, vs) = (s.spanning(), v.spanning());
    for (ls, x) in &ss {
        for (lv, y) in scaled(v).iter() {
            rep.record(&format!("range-{tag}"), format!("({ls}, {lv})"), v.defect(&nabla(x, y)));
        }
    }
    for (j, name) in chart.var_names().iter().enumerate() {
        let f = chart.coord(j);
        for (ls, x) in &ss {
            for (lv, y) in &vs {
                let p = format!("({name}; {ls}, {lv})");
                let base = nabla(x, y);
                let t = vecops::sub(&nabla(&vecops::scale(&f, x), y), &vecops::scale(&f, &base));
                rep.record(&format!("tensorial-{tag}"), &p, t);
                let mut l = vecops::sub(&nabla(x, &vecops::scale(&f, y)), &vecops::scale(&f, &base));
                let sf = chart.apply(&s.anchor(x), &f);
                l = vecops::sub(&l, &vecops::scale(&sf, y));
                rep.record(&format!("leibniz-{tag}"), &p, l);
            }
        }
    }
    for (i, (l1, x1)) in ss.iter().enumerate() {
        for (l2, x2) in ss.iter().skip(i + 1) {
            let xx = s.bracket(x1, x2);
            for (lv, y) in &vs {
                let mut c = nabla(&xx, y);
                c = vecops::sub(&c, &nabla(x1, &nabla(x2, y)));
                c = vecops::add(&c, &nabla(x2, &nabla(x1, y)));
                rep.record(&format!("flat-{tag}"), format!("({l1}, {l2}; {lv})"), c);
            }
        }
    }
}

/// `∇_a[b₁,b₂] = [∇_a b₁, b₂] + [b₁, ∇_a b₂] + ∇_{∇_{b₂}a} b₁ − ∇_{∇_{b₁}a} b₂`.
fn bracket_compat(rep: &mut Report, check: &str, a: &Side, b: &Side, on_b: &Rep, on_a: &Rep) {
    let (sa, sb) = (a.spanning(), b.spanning());
    for (la, x) in &sa {
        for (i, (l1, y1)) in sb.iter().enumerate() {
            for (l2, y2) in sb.iter().skip(i + 1) {
                let mut v = on_b(x, &b.bracket(y1, y2));
                v = vecops::sub(&v, &b.bracket(&on_b(x, y1), y2));
                v = vecops::sub(&v, &b.bracket(y1, &on_b(x, y2)));
                v = vecops::sub(&v, &on_b(&on_a(y2, x), y1));
                v = vecops::add(&v, &on_b(&on_a(y1, x), y2));
                rep.record(check, format!("({la}; {l1}, {l2})"), v);
            }
        }
    }
}

/// Subalgebroid closure of both sides, representation axioms of both
/// actions, anchor compatibility `[ρa, ρb] = −ρ(∇_b a) + ρ(∇_a b)` and the
/// two bracket compatibilities, on spanning sections.
pub fn matched_pair_check(mp: &MatchedPairData) -> Report {
    let (a, b) = (&mp.a, &mp.b);
    let mut rep = Report::new(format!("matched pair {}", mp.label()));
    for (p, v) in a.closure() {
        rep.record("closure-A", p, v);
    }
    for (p, v) in b.closure() {
        rep.record("closure-B", p, v);
    }
    representation(&mut rep, "A-on-B", a, b, &mp.on_b);
    representation(&mut rep, "B-on-A", b, a, &mp.on_a);
    let chart = &a.ambient.chart;
    for (la, x) in scaled(a) {
        for (lb, y) in scaled(b) {
            let mut v = chart.bracket(&a.anchor(&x), &b.anchor(&y));
            v = vecops::add(&v, &a.anchor(&(mp.on_a)(&y, &x)));
            v = vecops::sub(&v, &b.anchor(&(mp.on_b)(&x, &y)));
            rep.record("anchor-compat", format!("({la}, {lb})"), v);
        }
    }
    bracket_compat(&mut rep, "bracket-compat-B", a, b, &mp.on_b, &mp.on_a);
    bracket_compat(&mut rep, "bracket-compat-A", b, a, &mp.on_a, &mp.on_b);
    rep
}

fn algebroid_morphism(rep: &mut Report, tag: &str, src: &Side, dst: &Side, f: &Matrix) {
    let span = src.spanning();
    for (l, s) in &span {
        let fs = f.apply(s);
        rep.record(&format!("range-{tag}"), l, dst.defect(&fs));
        rep.record(&format!("anchor-{tag}"), l, vecops::sub(&dst.anchor(&fs), &src.anchor(s)));
    }
    for (i, (l1, s1)) in span.iter().enumerate() {
        for (l2, s2) in span.iter().skip(i + 1) {
            let v = vecops::sub(&f.apply(&src.bracket(s1, s2)), &dst.bracket(&f.apply(s1), &f.apply(s2)));
            rep.record(&format!("bracket-{tag}"), format!("({l1}, {l2})"), v);
        }
    }
}

/// `(F_A, F_B)`: both algebroid morphisms, `∇_{F_A a}F_B b = F_B(∇_a b)` and
/// `∇_{F_B b}F_A a = F_A(∇_b a)`.
pub fn morphism_check(src: &MatchedPairData, dst: &MatchedPairData, fa: &Matrix, fb: &Matrix) -> Report {
    let mut rep = Report::new(format!("morphism {} -> {}", src.label(), dst.label()));
    algebroid_morphism(&mut rep, "A", &src.a, &dst.a, fa);
    algebroid_morphism(&mut rep, "B", &src.b, &dst.b, fb);
    for (la, a) in src.a.spanning() {
        for (lb, b) in src.b.spanning() {
            let p = format!("({la}, {lb})");
            let v = vecops::sub(&(dst.on_b)(&fa.apply(&a), &fb.apply(&b)), &fb.apply(&(src.on_b)(&a, &b)));
            rep.record("rep-B", &p, v);
            let v = vecops::sub(&(dst.on_a)(&fb.apply(&b), &fa.apply(&a)), &fa.apply(&(src.on_a)(&b, &a)));
            rep.record("rep-A", &p, v);
        }
    }
    rep
}

/// The splitting data of a projection `T = (D, l, r)` checked as matched
/// pairs: (i) `A⁰, A¹, T⁰, T¹` are subalgebroids; (ii) `(A⁰, T¹)` and
/// `(T⁰, A¹)` are matched pairs through `∇⁻`, `∇⁺` and the basic
/// connections; (iii) the four sides of the square
/// `(A⁰,A¹) → (A⁰,T¹), (T⁰,A¹) → (T⁰,T¹)` are morphisms; and `D` is
/// recovered as `∇⁺(l a) − ∇⁻(a − l a)`. On IM projections the verdict is
/// compared with the flatness criteria.
pub fn flat_splitting_check(t: &IM11) -> Result<Report, VvError> {
    let alg = t.alg().clone();
    let tm = Arc::new(Algebroid::tangent(&alg.chart));
    let (lm, rm) = (t.l_matrix(), t.r_matrix());
    let a0 = Side::new(&alg, complement(&lm), "A0")?;
    let a1 = Side::new(&alg, lm.clone(), "A1")?;
    let t0 = Side::new(&tm, complement(&rm), "T0")?;
    let t1 = Side::new(&tm, rm.clone(), "T1")?;
    let mut rep = Report::new(format!("flat splitting of {}", alg.name));

    for side in [&a0, &a1, &t0, &t1] {
        for (p, v) in side.closure() {
            rep.record(&format!("i/sub-{}", side.label), p, v);
        }
    }

    let aa = MatchedPairData::from_splitting(&alg, lm.clone(), ("A0", "A1"))?;
    let tt = MatchedPairData::from_splitting(&tm, rm.clone(), ("T0", "T1"))?;
    let d = |x: &[RatFn], a: &[RatFn]| t.d_x(x, a);
    // (A⁰, T¹): ∇⁻_Y a = −D_Y a and ∇_a Y = [ρa, Y] + ρ(∇⁻_Y a).
    let at = {
        let (t2, t3, al, ch) = (t.clone(), t.clone(), alg.clone(), alg.chart.clone());
        let on_a: Rep = Arc::new(move |y, a| vecops::neg(&t2.d_x(y, a)));
        let on_b: Rep = Arc::new(move |a, y| {
            let nm = vecops::neg(&t3.d_x(y, a));
            vecops::add(&ch.bracket(&al.anchor_of(a), y), &al.anchor_of(&nm))
        });
        MatchedPairData::new(a0.clone(), t1.clone(), on_b, on_a)?
    };
    // (T⁰, A¹): ∇⁺_X a = D_X a and ∇_a X = [ρa, X] + ρ(∇⁺_X a).
    let ta = {
        let (t2, t3, al, ch) = (t.clone(), t.clone(), alg.clone(), alg.chart.clone());
        let on_b: Rep = Arc::new(move |x, a| t2.d_x(x, a));
        let on_a: Rep = Arc::new(move |a, x| vecops::add(&ch.bracket(&al.anchor_of(a), x), &al.anchor_of(&t3.d_x(x, a))));
        MatchedPairData::new(t0.clone(), a1.clone(), on_b, on_a)?
    };
    rep.absorb(&format!("ii/{}", at.label()), matched_pair_check(&at));
    rep.absorb(&format!("ii/{}", ta.label()), matched_pair_check(&ta));

    let rho = alg.anchor.transpose();
    let (idn, idm) = (Matrix::identity(alg.rank()), Matrix::identity(alg.m()));
    let square = [(&aa, &at, &idn, &rho), (&aa, &ta, &rho, &idn), (&at, &tt, &rho, &idm), (&ta, &tt, &idm, &rho)];
    for (src, dst, fa, fb) in square {
        rep.absorb(&format!("iii/{}->{}", src.label(), dst.label()), morphism_check(src, dst, fa, fb));
    }

    let rm0 = complement(&rm);
    let lm0 = complement(&lm);
    for s in sections(&alg, Probes::Frames) {
        for x in coord_fields(&alg) {
            let mut v = d(&x.value, &s.value);
            v = vecops::sub(&v, &d(&rm0.apply(&x.value), &lm.apply(&s.value)));
            v = vecops::sub(&v, &d(&rm.apply(&x.value), &lm0.apply(&s.value)));
            rep.record("reconstruct", format!("({}, {})", s.label, x.label), v);
        }
    }

    let holds = rep.passed();
    if structure_conditions(t, Structure::Projection).passed() {
        let an = projection_analysis(t)?;
        if holds != an.criteria {
            rep.record(
                "equivalence",
                "splitting vs criteria",
                Value::Note(format!("splitting conditions hold: {holds}, flatness criteria hold: {}", an.criteria)),
            );
        }
    } else {
        rep.note("not an IM projection; the comparison with the flatness criteria is skipped");
    }
    Ok(rep)
}
