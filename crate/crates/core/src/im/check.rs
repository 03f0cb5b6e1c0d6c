use std::collections::BTreeSet;
use std::fmt;

use crate::geometry::{vecops, MixedTensor};
use crate::kernel::RatFn;
use crate::report::{Report, Residual};

use super::tensor::IMTensor;
use super::ImError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ImEq {
    IM1,
    IM2,
    IM3,
    IM4,
    IM5,
    IM6,
}

impl ImEq {
    pub const ALL: [ImEq; 6] = [ImEq::IM1, ImEq::IM2, ImEq::IM3, ImEq::IM4, ImEq::IM5, ImEq::IM6];

    pub fn name(self) -> &'static str {
        match self {
            ImEq::IM1 => "IM1",
            ImEq::IM2 => "IM2",
            ImEq::IM3 => "IM3",
            ImEq::IM4 => "IM4",
            ImEq::IM5 => "IM5",
            ImEq::IM6 => "IM6",
        }
    }

    pub fn parse(s: &str) -> Option<ImEq> {
        ImEq::ALL.into_iter().find(|e| e.name().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for ImEq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which arguments the checker feeds the equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Probes {
    /// `e_i` and `dx_j` only.
    Frames,
    /// Frames plus `x_s e_i` and `x_s dx_j`.
    Scaled,
}

/// A labelled argument.
#[derive(Clone, Debug)]
pub struct Probe {
    pub label: String,
    pub value: Vec<RatFn>,
}

pub fn section_probes(names: &[String], coords: &[String], which: Probes) -> Vec<Probe> {
    scaled(names, coords, which)
}

pub fn form_probes(coords: &[String], which: Probes) -> Vec<Probe> {
    let names: Vec<String> = coords.iter().map(|c| format!("d{c}")).collect();
    scaled(&names, coords, which)
}

fn scaled(names: &[String], coords: &[String], which: Probes) -> Vec<Probe> {
    let n = names.len();
    let mut out: Vec<Probe> =
        names.iter().enumerate().map(|(i, s)| Probe { label: s.clone(), value: vecops::unit(n, i) }).collect();
    if which == Probes::Scaled {
        for x in coords {
            for (i, name) in names.iter().enumerate() {
                let mut v = vecops::zeros(n);
                v[i] = RatFn::named(x);
                out.push(Probe { label: format!("{x}*{name}"), value: v });
            }
        }
    }
    out
}

impl IMTensor {
    pub fn probes(&self, which: Probes) -> (Vec<Probe>, Vec<Probe>) {
        let coords = self.alg.chart.var_names();
        (section_probes(&self.alg.frame_names, &coords, which), form_probes(&coords, which))
    }

    /// Residual of one equation at the given arguments (`None` when the
    /// equation has no content at these degrees).
    pub fn residual(&self, eq: ImEq, a: &[RatFn], b: &[RatFn], alpha: &[RatFn], beta: &[RatFn]) -> Option<MixedTensor> {
        let alg = &self.alg;
        match eq {
            ImEq::IM1 => {
                let lhs = self.d_of(&alg.bracket(a, b));
                Some(lhs.sub(&alg.action(a, &self.d_of(b))).add(&alg.action(b, &self.d_of(a))))
            }
            ImEq::IM2 => {
                let lab = self.l_of(&alg.bracket(a, b))?;
                let alb = alg.action(a, &self.l_of(b)?);
                Some(lab.sub(&alb).add(&self.d_of(a).i_form(&alg.anchor_of(b))))
            }
            ImEq::IM3 => {
                let lie = MixedTensor::one_form(&alg.chart, alg.rank(), alpha).lie_formwise(&alg.anchor_of(a));
                let lhs = self.r_of(&lie.as_one_form())?;
                let ar = alg.action(a, &self.r_of(alpha)?);
                Some(lhs.sub(&ar).add(&self.d_of(a).i_multi(&alg.dual_anchor(alpha))))
            }
            ImEq::IM4 => {
                if self.p < 2 {
                    return None;
                }
                let t1 = self.l_of(b)?.i_form(&alg.anchor_of(a));
                Some(t1.add(&self.l_of(a)?.i_form(&alg.anchor_of(b))))
            }
            ImEq::IM5 => {
                if self.q < 2 {
                    return None;
                }
                let t1 = self.r_of(beta)?.i_multi(&alg.dual_anchor(alpha));
                Some(t1.add(&self.r_of(alpha)?.i_multi(&alg.dual_anchor(beta))))
            }
            ImEq::IM6 => {
                let r = self.r_of(alpha)?;
                let l = self.l_of(a)?;
                Some(r.i_form(&alg.anchor_of(a)).sub(&l.i_multi(&alg.dual_anchor(alpha))))
            }
        }
    }

    fn applies(&self, eq: ImEq) -> bool {
        match eq {
            ImEq::IM1 => true,
            ImEq::IM2 => self.p >= 1,
            ImEq::IM3 => self.q >= 1,
            ImEq::IM4 => self.p >= 2,
            ImEq::IM5 => self.q >= 2,
            ImEq::IM6 => self.p >= 1 && self.q >= 1,
        }
    }
}

/// All six equations on frames and scaled probes.
pub fn im_check(t: &IMTensor) -> Report {
    im_check_with(t, Probes::Scaled, &ImEq::ALL)
}

pub fn im_check_with(t: &IMTensor, which: Probes, eqs: &[ImEq]) -> Report {
    let mut rep = Report::new(format!("IM ({},{})-tensor on {}", t.q, t.p, t.alg.name));
    let (secs, forms) = t.probes(which);
    let none: Vec<RatFn> = Vec::new();
    for &eq in eqs {
        if !t.applies(eq) {
            continue;
        }
        let name = eq.name();
        match eq {
            ImEq::IM1 | ImEq::IM2 | ImEq::IM4 => {
                for (ia, a) in secs.iter().enumerate() {
                    for (ib, b) in secs.iter().enumerate() {
                        if (eq == ImEq::IM4 && ib < ia) || (eq == ImEq::IM1 && ib <= ia) {
                            continue;
                        }
                        if let Some(r) = t.residual(eq, &a.value, &b.value, &none, &none) {
                            rep.record(name, format!("a={}, b={}", a.label, b.label), r);
                        }
                    }
                }
            }
            ImEq::IM3 | ImEq::IM6 => {
                for a in &secs {
                    for al in &forms {
                        if let Some(r) = t.residual(eq, &a.value, &none, &al.value, &none) {
                            rep.record(name, format!("a={}, alpha={}", a.label, al.label), r);
                        }
                    }
                }
            }
            ImEq::IM5 => {
                for (i, al) in forms.iter().enumerate() {
                    for be in &forms[i..] {
                        if let Some(r) = t.residual(eq, &none, &none, &al.value, &be.value) {
                            rep.record(name, format!("alpha={}, beta={}", al.label, be.label), r);
                        }
                    }
                }
            }
        }
    }
    rep
}

/// Outcome of one implication between IM equations on an instance.
#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    /// Premises hold and the conclusion's residuals all vanish.
    Verified,
    /// Premises hold but the conclusion fails at this residual.
    Counterexample(Residual),
    /// Some premise fails on the instance, so nothing is claimed.
    Vacuous,
    /// A premise is neither assumed nor derived.
    NotAssumed,
}

#[derive(Clone, Debug)]
pub struct Redundancy {
    pub report: Report,
    pub outcomes: Vec<(String, Outcome)>,
}

impl Redundancy {
    pub fn holds(&self) -> bool {
        self.outcomes.iter().all(|(_, o)| !matches!(o, Outcome::Counterexample(_)))
    }

    pub fn derived(&self) -> BTreeSet<ImEq> {
        let mut s = BTreeSet::new();
        for (label, o) in &self.outcomes {
            if *o == Outcome::Verified {
                s.insert(ImEq::parse(label.rsplit("=>").next().unwrap()).unwrap());
            }
        }
        s
    }
}

const IMPLICATIONS: [([ImEq; 2], ImEq); 4] = [
    ([ImEq::IM1, ImEq::IM2], ImEq::IM3),
    ([ImEq::IM1, ImEq::IM3], ImEq::IM2),
    ([ImEq::IM2, ImEq::IM6], ImEq::IM4),
    ([ImEq::IM3, ImEq::IM6], ImEq::IM5),
];

/// Checks, on this instance, the implications between IM equations that
/// start from `assumed`, chaining through conclusions already verified.
pub fn im_redundancy(t: &IMTensor, assumed: &[ImEq]) -> Result<Redundancy, ImError> {
    let (m, n) = (t.alg.m(), t.alg.rank());
    if t.p > m || t.q > n {
        return Err(ImError::Degrees(format!(
            "redundancy needs p ≤ dim M and q ≤ rank A, got (q,p) = ({},{}) with dim M = {m}, rank A = {n}",
            t.q, t.p
        )));
    }
    let report = im_check(t);
    let mut known: BTreeSet<ImEq> = assumed.iter().copied().collect();
    let mut outcomes: Vec<(String, Outcome)> = Vec::new();
    let mut done = [false; 4];
    loop {
        let mut progressed = false;
        for (k, (prem, concl)) in IMPLICATIONS.iter().enumerate() {
            if done[k] || !prem.iter().all(|e| known.contains(e)) {
                continue;
            }
            done[k] = true;
            progressed = true;
            let label = format!("{}+{}=>{}", prem[0], prem[1], concl);
            let outcome = if prem.iter().any(|e| report.fails(e.name())) {
                Outcome::Vacuous
            } else if let Some(r) = report.first(concl.name()) {
                Outcome::Counterexample(r.clone())
            } else {
                known.insert(*concl);
                Outcome::Verified
            };
            outcomes.push((label, outcome));
        }
        if !progressed {
            break;
        }
    }
    for (k, (prem, concl)) in IMPLICATIONS.iter().enumerate() {
        if !done[k] {
            outcomes.push((format!("{}+{}=>{}", prem[0], prem[1], concl), Outcome::NotAssumed));
        }
    }
    Ok(Redundancy { report, outcomes })
}
