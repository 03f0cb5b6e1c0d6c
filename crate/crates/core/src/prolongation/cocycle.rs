use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::geometry::cwl::cwl_value;
use crate::im::{ImEq, IMTensor, Probes};
use crate::kernel::RatFn;
use crate::report::Report;

use super::generators::{BigBase, Gen, GenSection};
use super::ProlongationError;

/// `⟨μ, g⟩` on every generator.
#[derive(Clone, Debug)]
pub struct MuSection {
    pub values: HashMap<Gen, RatFn>,
}

impl MuSection {
    pub fn pair(&self, u: &GenSection) -> RatFn {
        u.terms().map(|(g, f)| f * &self.values[g]).filter(|t| !t.is_zero()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(RatFn::is_zero)
    }
}

fn sign(i: usize) -> i64 {
    if i % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `⟨μ, full_k⟩ = c_{D(e_k)}`, `⟨μ, core_a(i,k)⟩ = (−1)^{i−1} c_{l(e_k)}` with
/// tangent slot `i` dropped, `⟨μ, core_f(j,s)⟩ = (−1)^{j−1} c_{r(dx_s)}` with
/// dual slot `j` dropped (slots 1-based).
pub fn build_mu(base: &BigBase, t: &IMTensor) -> Result<MuSection, ProlongationError> {
    if (t.q, t.p) != (base.q, base.p) {
        return Err(ProlongationError::Degrees { expected: (base.q, base.p), got: (t.q, t.p) });
    }
    if *t.alg != *base.alg {
        return Err(ProlongationError::Mismatch);
    }
    let slots = &base.slots;
    let mut values = HashMap::new();
    for g in base.generators() {
        let v = match g {
            Gen::Full(k) => cwl_value(&t.d_frame[k], slots),
            Gen::CoreA(i, k) => {
                let l = &t.l_frame.as_ref().unwrap()[k];
                cwl_value(l, &slots.without_tangent(i)).scale_int(sign(i))
            }
            Gen::CoreF(j, s) => {
                let r = &t.r_frame.as_ref().unwrap()[s];
                cwl_value(r, &slots.without_dual(j)).scale_int(sign(j))
            }
        };
        values.insert(g, v);
    }
    Ok(MuSection { values })
}

/// Generator-pair family, each encoding one IM equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    FullFull,
    FullCoreA,
    FullCoreF,
    CoreACoreA,
    CoreFCoreF,
    CoreACoreF,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::FullFull,
        Family::FullCoreA,
        Family::FullCoreF,
        Family::CoreACoreA,
        Family::CoreFCoreF,
        Family::CoreACoreF,
    ];

    pub fn of(g: Gen, h: Gen) -> Family {
        use Gen::*;
        match (g, h) {
            (Full(_), Full(_)) => Family::FullFull,
            (Full(_), CoreA(..)) | (CoreA(..), Full(_)) => Family::FullCoreA,
            (Full(_), CoreF(..)) | (CoreF(..), Full(_)) => Family::FullCoreF,
            (CoreA(..), CoreA(..)) => Family::CoreACoreA,
            (CoreF(..), CoreF(..)) => Family::CoreFCoreF,
            (CoreA(..), CoreF(..)) | (CoreF(..), CoreA(..)) => Family::CoreACoreF,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::FullFull => "full/full",
            Family::FullCoreA => "full/core_a",
            Family::FullCoreF => "full/core_f",
            Family::CoreACoreA => "core_a/core_a",
            Family::CoreFCoreF => "core_f/core_f",
            Family::CoreACoreF => "core_a/core_f",
        }
    }

    pub fn equation(self) -> ImEq {
        match self {
            Family::FullFull => ImEq::IM1,
            Family::FullCoreA => ImEq::IM2,
            Family::FullCoreF => ImEq::IM3,
            Family::CoreACoreA => ImEq::IM4,
            Family::CoreFCoreF => ImEq::IM5,
            Family::CoreACoreF => ImEq::IM6,
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == s)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct CocycleReport {
    pub report: Report,
}

impl CocycleReport {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }

    pub fn failing_families(&self) -> BTreeSet<Family> {
        self.report.failing_checks().iter().filter_map(|c| Family::parse(c)).collect()
    }

    /// The IM equations encoded by the failing families.
    pub fn failing_equations(&self) -> BTreeSet<ImEq> {
        self.failing_families().into_iter().map(Family::equation).collect()
    }
}

/// `⟨μ,[U,V]⟩ − ρ(U)⟨μ,V⟩ + ρ(V)⟨μ,U⟩`.
pub fn cocycle_residual(base: &BigBase, mu: &MuSection, u: &GenSection, v: &GenSection) -> RatFn {
    let lhs = mu.pair(&base.bracket(u, v));
    &(&lhs - &base.anchor(u).apply(&mu.pair(v))) + &base.anchor(v).apply(&mu.pair(u))
}

pub fn cocycle_check(t: &IMTensor) -> Result<CocycleReport, ProlongationError> {
    cocycle_check_with(t, Probes::Scaled)
}

/// Cocycle equation on all generator pairs, plus `(F·g, h)` for `F` among
/// the base coordinates and the first coordinate of each slot block.
pub fn cocycle_check_with(t: &IMTensor, which: Probes) -> Result<CocycleReport, ProlongationError> {
    let base = BigBase::new(&t.alg, t.p, t.q);
    let mu = build_mu(&base, t)?;
    let mut rep = Report::new(format!("cocycle of IM ({},{})-tensor on {}", t.q, t.p, t.alg.name));
    let gens = base.generators();
    for (a, &g) in gens.iter().enumerate() {
        for &h in &gens[a + 1..] {
            let r = cocycle_residual(&base, &mu, &GenSection::gen(g), &GenSection::gen(h));
            rep.record(Family::of(g, h).name(), format!("({}, {})", base.label(g), base.label(h)), r);
        }
    }
    if which == Probes::Scaled {
        let mut scalers = base.alg.chart.vars.clone();
        scalers.extend(base.slots.tangent.iter().chain(&base.slots.dual).map(|b| b[0]));
        for x in scalers {
            let f = RatFn::var(x);
            for &g in &gens {
                for &h in &gens {
                    let r = cocycle_residual(&base, &mu, &GenSection::term(g, f.clone()), &GenSection::gen(h));
                    let probe = format!("({x}*{}, {})", base.label(g), base.label(h));
                    rep.record(Family::of(g, h).name(), probe, r);
                }
            }
        }
    }
    Ok(CocycleReport { report: rep })
}
