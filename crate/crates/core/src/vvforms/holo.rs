//! Holomorphic structures from IM `(1,1)`-tensors: the conditions on
//! `(D, l, r)`, the Dolbeault connection `∇_{X+ir(X)}a = −l(D_X a)` and the
//! defect operators `E_l`, `E_r`, `E_D`.

use std::fmt;

use crate::geometry::vecops;
use crate::im::Probes;
use crate::kernel::{Gauss, RatFn};
use crate::report::{Report, Value};

use super::im11::{coord_fields, im11_check, nijenhuis_components, sections, structure_conditions, Structure, IM11};

/// `Z_c = ∂_c + i r(∂_c)` and `∇_{Z_c} e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct DolbeaultTable {
    pub coords: Vec<String>,
    pub frame: Vec<String>,
    pub z: Vec<Vec<Gauss>>,
    /// `nabla[c][k] = ∇_{Z_c} e_k`, a real section (multiplication by `i`
    /// acts through `l`).
    pub nabla: Vec<Vec<Vec<RatFn>>>,
    /// `e_k` with `∇e_k = 0`.
    pub holomorphic_frames: Vec<bool>,
}

impl fmt::Display for DolbeaultTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, z) in self.z.iter().enumerate() {
            let parts: Vec<String> = z.iter().map(|g| g.to_string()).collect();
            writeln!(f, "Z_{} = [{}]", self.coords[c], parts.join(", "))?;
        }
        for (c, row) in self.nabla.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                let parts: Vec<String> = v.iter().map(|g| g.to_string()).collect();
                writeln!(f, "∇_{{Z_{}}} {} = [{}]", self.coords[c], self.frame[k], parts.join(", "))?;
            }
        }
        let hol: Vec<&str> =
            self.frame.iter().zip(&self.holomorphic_frames).filter(|(_, &h)| h).map(|(n, _)| n.as_str()).collect();
        writeln!(f, "holomorphic frame sections: [{}]", hol.join(", "))
    }
}

#[derive(Clone, Debug)]
pub struct HolomorphicOutcome {
    pub report: Report,
    pub table: Option<DolbeaultTable>,
}

impl HolomorphicOutcome {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

fn e_l(t: &IM11, a: &[RatFn], b: &[RatFn]) -> Vec<RatFn> {
    let alg = t.alg();
    let mut v = t.l_of(&alg.bracket(a, b));
    v = vecops::sub(&v, &alg.bracket(a, &t.l_of(b)));
    vecops::add(&v, &t.d_x(&alg.anchor_of(b), a))
}

fn e_r(t: &IM11, a: &[RatFn], x: &[RatFn]) -> Vec<RatFn> {
    let alg = t.alg();
    let chart = &alg.chart;
    let rm = t.r_matrix();
    let ra = alg.anchor_of(a);
    let mut v = rm.apply(&chart.bracket(&ra, x));
    v = vecops::sub(&v, &chart.bracket(&ra, &rm.apply(x)));
    vecops::add(&v, &alg.anchor_of(&t.d_x(x, a)))
}

fn e_d(t: &IM11, a: &[RatFn], b: &[RatFn], x: &[RatFn]) -> Vec<RatFn> {
    let alg = t.alg();
    let chart = &alg.chart;
    let (ra, rb) = (alg.anchor_of(a), alg.anchor_of(b));
    let mut v = t.d_x(x, &alg.bracket(a, b));
    v = vecops::sub(&v, &alg.bracket(a, &t.d_x(x, b)));
    v = vecops::add(&v, &alg.bracket(b, &t.d_x(x, a)));
    v = vecops::sub(&v, &t.d_x(&chart.bracket(&rb, x), a));
    vecops::add(&v, &t.d_x(&chart.bracket(&ra, x), b))
}

fn defects(t: &IM11, rep: &mut Report) {
    let alg = t.alg();
    let chart = &alg.chart;
    let secs = sections(alg, Probes::Frames);
    let fields = coord_fields(alg);
    let names = chart.var_names();
    for a in &secs {
        for b in &secs {
            rep.record("E_l", format!("({}, {})", a.label, b.label), e_l(t, &a.value, &b.value));
            for x in &fields {
                rep.record("E_D", format!("({}, {}, {})", a.label, b.label, x.label), e_d(t, &a.value, &b.value, &x.value));
            }
        }
        for x in &fields {
            rep.record("E_r", format!("({}, {})", a.label, x.label), e_r(t, &a.value, &x.value));
        }
    }
    // E_l, E_r tensorial, E_D skew, and
    // E_D(a, fb, X) = f E_D(a, b, X) + X(f) E_l(a, b) − E_r(a, X)(f) b
    for (s, xs) in names.iter().enumerate() {
        let f = chart.coord(s);
        for a in &secs {
            let fa = vecops::scale(&f, &a.value);
            for b in &secs {
                let fb = vecops::scale(&f, &b.value);
                let el = e_l(t, &a.value, &b.value);
                let probe = format!("({}, {}; f = {xs})", a.label, b.label);
                rep.record("E_l-tensorial", &probe, vecops::sub(&e_l(t, &fa, &b.value), &vecops::scale(&f, &el)));
                rep.record("E_l-tensorial", &probe, vecops::sub(&e_l(t, &a.value, &fb), &vecops::scale(&f, &el)));
                for x in &fields {
                    let xv = &x.value;
                    let probe = format!("({}, {}, {}; f = {xs})", a.label, b.label, x.label);
                    let skew = vecops::add(&e_d(t, &a.value, &b.value, xv), &e_d(t, &b.value, &a.value, xv));
                    rep.record("E_D-skew", &probe, skew);
                    let lhs = e_d(t, &a.value, &fb, xv);
                    let mut rhs = vecops::scale(&f, &e_d(t, &a.value, &b.value, xv));
                    rhs = vecops::add(&rhs, &vecops::scale(&chart.apply(xv, &f), &el));
                    let er = e_r(t, &a.value, xv);
                    rhs = vecops::sub(&rhs, &vecops::scale(&chart.apply(&er, &f), &b.value));
                    rep.record("E_D-leibniz", &probe, vecops::sub(&lhs, &rhs));
                }
            }
            for x in &fields {
                let er = e_r(t, &a.value, &x.value);
                let probe = format!("({}, {}; f = {xs})", a.label, x.label);
                rep.record("E_r-tensorial", &probe, vecops::sub(&e_r(t, &fa, &x.value), &vecops::scale(&f, &er)));
                let fx = vecops::scale(&f, &x.value);
                rep.record("E_r-tensorial", &probe, vecops::sub(&e_r(t, &a.value, &fx), &vecops::scale(&f, &er)));
            }
        }
    }
}

fn complex_bracket(t: &IM11, z: &[Gauss], w: &[Gauss]) -> Vec<Gauss> {
    let chart = &t.alg().chart;
    let re = |v: &[Gauss]| v.iter().map(|g| g.re.clone()).collect::<Vec<_>>();
    let im = |v: &[Gauss]| v.iter().map(|g| g.im.clone()).collect::<Vec<_>>();
    let (x, y, u, v) = (re(z), im(z), re(w), im(w));
    let real = vecops::sub(&chart.bracket(&x, &u), &chart.bracket(&y, &v));
    let imag = vecops::add(&chart.bracket(&x, &v), &chart.bracket(&y, &u));
    real.into_iter().zip(imag).map(|(a, b)| Gauss::new(a, b)).collect()
}

fn record_complex(rep: &mut Report, check: &str, probe: &str, v: &[Gauss]) {
    for (k, g) in v.iter().enumerate() {
        rep.record(check, format!("{probe}[{k}]"), Value::Complex(g.clone()));
    }
}

fn dolbeault(t: &IM11, rep: &mut Report, d_square_vanishes: bool) -> DolbeaultTable {
    let alg = t.alg();
    let (n, m) = (alg.rank(), alg.m());
    let chart = &alg.chart;
    let coords = chart.var_names();
    let rm = t.r_matrix();
    let lm = t.l_matrix();
    let nabla_real = |x: &[RatFn], a: &[RatFn]| vecops::neg(&lm.apply(&t.d_x(x, a)));

    let z: Vec<Vec<Gauss>> = (0..m)
        .map(|c| {
            let x = chart.coord_field(c);
            let rx = rm.apply(&x);
            x.into_iter().zip(rx).map(|(a, b)| Gauss::new(a, b)).collect()
        })
        .collect();
    for (c, zc) in z.iter().enumerate() {
        // r(Z) + iZ = 0 on T^{01}
        let rz: Vec<Gauss> = (0..m)
            .map(|s| {
                let re = vecops::dot(&rm.row(s), &zc.iter().map(|g| g.re.clone()).collect::<Vec<_>>());
                let im = vecops::dot(&rm.row(s), &zc.iter().map(|g| g.im.clone()).collect::<Vec<_>>());
                &Gauss::new(re, im) + &(&Gauss::i() * &zc[s])
            })
            .collect();
        record_complex(rep, "t01-eigen", &format!("Z_{}", coords[c]), &rz);
    }

    let mut nabla = vec![vec![vec![]; n]; m];
    for c in 0..m {
        let x = chart.coord_field(c);
        for k in 0..n {
            let e = alg.frame(k);
            nabla[c][k] = nabla_real(&x, &e);
            // ∇_{iZ} = l∇_Z, with iZ = Y + i r(Y) for Y = −r(X)
            let lhs = nabla_real(&vecops::neg(&rm.apply(&x)), &e);
            rep.record("complex-linear", format!("(Z_{}, {})", coords[c], alg.frame_names[k]), vecops::sub(&lhs, &lm.apply(&nabla[c][k])));
        }
    }
    for a in 0..m {
        for b in a + 1..m {
            let w = complex_bracket(t, &z[a], &z[b]);
            let u: Vec<RatFn> = w.iter().map(|g| g.re.clone()).collect();
            let closed: Vec<Gauss> =
                w.iter().zip(rm.apply(&u)).map(|(g, ru)| Gauss::real(&g.im - &ru)).collect();
            record_complex(rep, "t01-involutive", &format!("[Z_{}, Z_{}]", coords[a], coords[b]), &closed);
            let (xa, xb) = (chart.coord_field(a), chart.coord_field(b));
            for k in 0..n {
                let e = alg.frame(k);
                let ab = nabla_real(&xa, &nabla_real(&xb, &e));
                let ba = nabla_real(&xb, &nabla_real(&xa, &e));
                let curv = vecops::sub(&vecops::sub(&ab, &ba), &nabla_real(&u, &e));
                let ok = rep.record("flat", format!("(Z_{}, Z_{}; {})", coords[a], coords[b], alg.frame_names[k]), curv);
                if !ok && d_square_vanishes {
                    rep.record("flat-vs-D2", "curvature", Value::Note("∇ is not flat although D² = 0".to_string()));
                }
            }
        }
    }
    let mut holomorphic_frames = Vec::with_capacity(n);
    for k in 0..n {
        let d_zero = t.tensor().d_frame[k].is_zero();
        let nabla_zero = (0..m).all(|c| vecops::is_zero(&nabla[c][k]));
        if d_zero != nabla_zero {
            rep.record(
                "holomorphic-frames",
                &alg.frame_names[k],
                Value::Note(format!("De = 0 is {d_zero} but ∇e = 0 is {nabla_zero}")),
            );
        } else {
            rep.record("holomorphic-frames", &alg.frame_names[k], RatFn::zero());
        }
        holomorphic_frames.push(nabla_zero);
    }
    DolbeaultTable { coords, frame: alg.frame_names.clone(), z, nabla, holomorphic_frames }
}

/// `l D(a) + D(a) r = 0`, `l² = −id`, `r² = −id`, `D² = 0`, `[D,l] = 0`,
/// `𝒩_r = 0`, the IM equations and the defect identities; the Dolbeault
/// table is built when the first six hold.
pub fn holomorphic_check(t: &IM11) -> HolomorphicOutcome {
    let alg = t.alg();
    let mut rep = Report::new(format!("holomorphic structure on {}", alg.name));
    let mut sc = structure_conditions(t, Structure::Complex);
    // structure_conditions already folds in the IM equations; keep them once
    sc.residuals.retain(|r| !r.check.starts_with("im/"));
    sc.evaluated.retain(|k, _| !k.starts_with("im/"));
    rep.absorb("complex", sc);
    let mut d_square_vanishes = false;
    match nijenhuis_components(t) {
        Ok(nc) => {
            d_square_vanishes = nc.d_frame.iter().all(|d| d.is_zero());
            for (i, name) in alg.frame_names.iter().enumerate() {
                rep.record("integrable/D^2", name, nc.d_frame[i].clone());
                rep.record("integrable/[D,l]", name, nc.l_frame.as_ref().unwrap()[i].clone());
            }
            for (j, x) in alg.chart.var_names().iter().enumerate() {
                rep.record("integrable/N_r", format!("d{x}"), nc.r_frame.as_ref().unwrap()[j].clone());
            }
        }
        Err(e) => {
            rep.record("integrable", "routes", Value::Note(e.to_string()));
        }
    }
    let ready = rep.passed();
    rep.absorb("im", im11_check(t));
    defects(t, &mut rep);
    let table = if ready { Some(dolbeault(t, &mut rep, d_square_vanishes)) } else { None };
    HolomorphicOutcome { report: rep, table }
}
