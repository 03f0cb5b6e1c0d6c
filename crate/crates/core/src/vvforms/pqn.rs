//! Compatibility of a bivector `Π` with a `(1,1)`-tensor `r`, Poisson
//! quasi-Nijenhuis conditions and the IM `(1,1)`-tensor `(Dʳ, r*, r)` on `T*M`.

use std::sync::Arc;

use crate::algebroid::{sharp, Algebroid};
use crate::geometry::chart::same_chart;
use crate::geometry::{vecops, Chart, Matrix, MixedTensor};
use crate::im::check::form_probes;
use crate::im::{im_check_with, IMForm, Probes};
use crate::kernel::RatFn;
use crate::report::Report;

use super::fn_calculus::{nijenhuis_torsion, VvForm};
use super::im11::{nijenhuis_components, IM11};
use super::VvError;

#[derive(Clone, Debug, PartialEq)]
pub enum PqnMode {
    /// Compatibility only.
    Compat,
    /// Compatibility and `(𝒩_r*, 0)` an IM 3-form.
    Full,
    /// Compatibility and `𝒩_r(X,Y) = Π♯(φ(X,Y,·))` for a closed 3-form `φ`.
    Relative(MixedTensor),
}

fn cotangent(chart: &Arc<Chart>, pi: &MixedTensor) -> Result<Algebroid, VvError> {
    Algebroid::cotangent(chart, pi).map_err(|e| VvError::Precondition(e.to_string()))
}

fn require_poisson(chart: &Arc<Chart>, pi: &MixedTensor) -> Result<(), VvError> {
    if !same_chart(pi.chart(), chart) {
        return Err(VvError::ChartMismatch);
    }
    if pi.degrees() != (0, 2) || pi.rank() != chart.dim() {
        return Err(VvError::Precondition("Π must be a bivector on TM".to_string()));
    }
    let t = Algebroid::tangent(chart);
    let s = t.schouten(pi, pi);
    if !s.is_zero() {
        return Err(VvError::NotPoisson(s.to_string()));
    }
    Ok(())
}

/// `r*α = α ∘ r`.
fn r_star(rm: &Matrix, alpha: &[RatFn]) -> Vec<RatFn> {
    rm.transpose().apply(alpha)
}

/// `Π_r` with `Π_r♯ = r ∘ Π♯`, read off on `dx_i ∧ dx_j`, `i < j`.
fn pi_r(pi: &MixedTensor, rm: &Matrix) -> MixedTensor {
    let m = pi.rank();
    let mut out = MixedTensor::zero(pi.chart(), m, 0, 2);
    for i in 0..m {
        let v = rm.apply(&sharp(pi, &vecops::unit(m, i)));
        for (j, c) in v.into_iter().enumerate().skip(i + 1) {
            out.set(0, (1 << i) | (1 << j), c);
        }
    }
    out
}

/// `𝒩_r*(α) = ⟨α, 𝒩_r(·,·)⟩` as a 2-form.
fn n_star(n: &VvForm, alpha: &[RatFn]) -> MixedTensor {
    let m = n.m();
    let mut out = MixedTensor::zero(n.chart(), m, 2, 0);
    for (s, a) in alpha.iter().enumerate() {
        if !a.is_zero() {
            out = out.add(&n.component(s).scale(a));
        }
    }
    out
}

fn probe_pairs(chart: &Chart) -> Vec<(String, Vec<RatFn>)> {
    form_probes(&chart.var_names(), Probes::Scaled).into_iter().map(|p| (p.label, p.value)).collect()
}

pub fn pqn_check(pi: &MixedTensor, r: &VvForm, mode: &PqnMode) -> Result<Report, VvError> {
    let chart = r.chart().clone();
    require_poisson(&chart, pi)?;
    if r.degree() != 1 {
        return Err(VvError::Degree { expected: 1, got: r.degree() });
    }
    let m = chart.dim();
    let rm = r.matrix();
    let cot = cotangent(&chart, pi)?;
    let pir = pi_r(pi, &rm);
    let cot_r = cotangent(&chart, &pir)?;
    let mut rep = Report::new("Poisson quasi-Nijenhuis");
    let names = chart.var_names();
    for i in 0..m {
        let dx = vecops::unit(m, i);
        let lhs = sharp(pi, &r_star(&rm, &dx));
        let rhs = rm.apply(&sharp(pi, &dx));
        rep.record("anchor-compat", format!("d{}", names[i]), vecops::sub(&lhs, &rhs));
    }
    let probes = probe_pairs(&chart);
    for (ia, (la, a)) in probes.iter().enumerate() {
        for (lb, b) in probes.iter().skip(ia + 1) {
            let mut v = cot_r.bracket(a, b);
            v = vecops::sub(&v, &cot.bracket(&r_star(&rm, a), b));
            v = vecops::sub(&v, &cot.bracket(a, &r_star(&rm, b)));
            v = vecops::add(&v, &r_star(&rm, &cot.bracket(a, b)));
            rep.record("bracket-compat", format!("({la}, {lb})"), v);
        }
    }
    let t = Algebroid::tangent(&chart);
    rep.record("schouten-compat", "[Π, Π_r]", t.schouten(pi, &pir));

    match mode {
        PqnMode::Compat => {}
        PqnMode::Full => {
            let n = nijenhuis_torsion(r)?;
            for (ia, (la, a)) in probes.iter().enumerate() {
                for (lb, b) in probes.iter().skip(ia) {
                    let (pa, pb) = (sharp(pi, a), sharp(pi, b));
                    let (na, nb) = (n_star(&n, a), n_star(&n, b));
                    let lhs = n_star(&n, &cot.bracket(a, b));
                    let rhs = nb.lie_formwise(&pa).sub(&na.d_formwise().i_form(&pb));
                    rep.record("torsion-bracket", format!("({la}, {lb})"), lhs.sub(&rhs));
                    rep.record("torsion-skew", format!("({la}, {lb})"), nb.i_form(&pa).add(&na.i_form(&pb)));
                }
            }
            let alg = Arc::new(cot.clone());
            let mu = (0..m).map(|i| n_star(&n, &vecops::unit(m, i))).collect();
            let nu = vec![alg.zero_tensor(3, 0); m];
            let form = IMForm { alg: alg.clone(), p: 3, mu, nu };
            rep.absorb("im3form", im_check_with(&form.to_im(), Probes::Scaled, &crate::im::ImEq::ALL));
        }
        PqnMode::Relative(phi) => {
            if phi.degrees() != (3, 0) || !same_chart(phi.chart(), &chart) {
                return Err(VvError::Precondition("φ must be a 3-form on the same chart".to_string()));
            }
            let phi = phi.with_rank(m);
            let dphi = phi.d_formwise();
            if !dphi.is_zero() {
                return Err(VvError::NotClosed(dphi.to_string()));
            }
            let n = nijenhuis_torsion(r)?;
            for a in 0..m {
                for b in a + 1..m {
                    let (x, y) = (chart.coord_field(a), chart.coord_field(b));
                    let lhs = n.eval(&[x.clone(), y.clone()]);
                    let rhs = sharp(pi, &phi.eval_form(&[x, y]).as_one_form());
                    rep.record("relative", format!("(d/d{}, d/d{})", names[a], names[b]), vecops::sub(&lhs, &rhs));
                }
            }
        }
    }
    Ok(rep)
}

/// `⟨Dʳ_X(α), Y⟩ = dα(X, rY) − (L_rα)(X, Y)` as a `(1,1)` tensor on `T*M`.
pub fn dr_direct(r: &VvForm, alpha: &[RatFn]) -> MixedTensor {
    let chart = r.chart().clone();
    let m = chart.dim();
    let rm = r.matrix();
    let a = MixedTensor::one_form(&chart, m, alpha);
    let da = a.d_formwise();
    let lr = r.lie(&a);
    let mut out = MixedTensor::zero(&chart, m, 1, 1);
    for x in 0..m {
        for y in 0..m {
            let (xv, yv) = (chart.coord_field(x), chart.coord_field(y));
            let v = &da.eval_form(&[xv.clone(), rm.apply(&yv)]).as_scalar() - &lr.eval_form(&[xv, yv]).as_scalar();
            out.set(1 << x, 1 << y, v);
        }
    }
    out
}

/// `(Dʳ, r*, r)` on the cotangent algebroid of a Poisson `Π`.
pub fn dr_operator(pi: &MixedTensor, r: &VvForm) -> Result<IM11, VvError> {
    let chart = r.chart().clone();
    require_poisson(&chart, pi)?;
    if r.degree() != 1 {
        return Err(VvError::Degree { expected: 1, got: r.degree() });
    }
    let m = chart.dim();
    let alg = Arc::new(cotangent(&chart, pi)?);
    let d_frame = (0..m).map(|i| dr_direct(r, &vecops::unit(m, i))).collect();
    let rm = r.matrix();
    IM11::from_parts(&alg, d_frame, &rm.transpose(), &rm)
}

/// `[Dʳ, r*] = −𝒩_r*` and
/// `⟨(Dʳ)²_{(X,Y)}α, Z⟩ = −d𝒩_r*(α)(X,Y,Z) + dα(Z, 𝒩_r(X,Y))`.
pub fn lemma_identities(pi: &MixedTensor, r: &VvForm) -> Result<Report, VvError> {
    let t = dr_operator(pi, r)?;
    let nc = nijenhuis_components(&t)?;
    let chart = r.chart().clone();
    let m = chart.dim();
    let n = nijenhuis_torsion(r)?;
    let names = chart.var_names();
    let mut rep = Report::new("D^r identities");
    for (label, alpha) in probe_pairs(&chart) {
        let ns = n_star(&n, &alpha);
        let mut as11 = MixedTensor::zero(&chart, m, 1, 1);
        for a in 0..m {
            for b in 0..m {
                let v = ns.eval_form(&[chart.coord_field(a), chart.coord_field(b)]).as_scalar();
                as11.set(1 << a, 1 << b, v);
            }
        }
        rep.record("l-identity", &label, nc.l_of(&alpha).unwrap().add(&as11));

        let d2 = nc.d_of(&alpha);
        let dns = ns.d_formwise();
        let da = MixedTensor::one_form(&chart, m, &alpha).d_formwise();
        for a in 0..m {
            for b in a + 1..m {
                let (x, y) = (chart.coord_field(a), chart.coord_field(b));
                let lhs = d2.eval_form(&[x.clone(), y.clone()]).as_section();
                let nxy = n.eval(&[x.clone(), y.clone()]);
                let rhs: Vec<RatFn> = (0..m)
                    .map(|c| {
                        let z = chart.coord_field(c);
                        let t1 = dns.eval_form(&[x.clone(), y.clone(), z.clone()]).as_scalar();
                        let t2 = da.eval_form(&[z, nxy.clone()]).as_scalar();
                        &t2 - &t1
                    })
                    .collect();
                rep.record("d-square", format!("({label}; d/d{}, d/d{})", names[a], names[b]), vecops::sub(&lhs, &rhs));
            }
        }
    }
    Ok(rep)
}
