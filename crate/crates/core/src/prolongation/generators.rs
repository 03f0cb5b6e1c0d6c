use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::algebroid::lifts::vertical_lift;
use crate::algebroid::Algebroid;
use crate::geometry::cwl::SlotVars;
use crate::geometry::{vecops, CoordField};
use crate::kernel::{RatFn, Var};

/// Generators of `Γ(𝔸)` over `C∞(𝕄)`.
///
/// `Full(k)` is `(Tᵖe_k, R^q_{e_k})`, `CoreA(i, k)` the core section `Be_k` in
/// tangent slot `i`, and `CoreF(j, s)` the core section `B dx_s` in cotangent
/// slot `j` (all 0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    Full(usize),
    CoreA(usize, usize),
    CoreF(usize, usize),
}

/// `Σ F_g g` with coefficients on the big base.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GenSection {
    coeffs: BTreeMap<Gen, RatFn>,
}

impl GenSection {
    pub fn zero() -> Self {
        GenSection::default()
    }

    pub fn gen(g: Gen) -> Self {
        GenSection::term(g, RatFn::one())
    }

    pub fn term(g: Gen, f: RatFn) -> Self {
        let mut s = GenSection::zero();
        s.add_term(g, &f);
        s
    }

    pub fn add_term(&mut self, g: Gen, f: &RatFn) {
        if f.is_zero() {
            return;
        }
        let s = &self.coeff(g) + f;
        if s.is_zero() {
            self.coeffs.remove(&g);
        } else {
            self.coeffs.insert(g, s);
        }
    }

    pub fn coeff(&self, g: Gen) -> RatFn {
        self.coeffs.get(&g).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Gen, &RatFn)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, o: &GenSection) -> GenSection {
        let mut out = self.clone();
        for (&g, f) in &o.coeffs {
            out.add_term(g, f);
        }
        out
    }

    pub fn sub(&self, o: &GenSection) -> GenSection {
        self.add(&o.scale(&RatFn::int(-1)))
    }

    pub fn scale(&self, f: &RatFn) -> GenSection {
        let mut out = GenSection::zero();
        for (&g, c) in &self.coeffs {
            out.add_term(g, &(c * f));
        }
        out
    }
}

/// The big base `𝕄 = (⊕ᵖTM) ⊕ (⊕ᵠA*)` with cached generator anchors and
/// brackets.
#[derive(Clone, Debug)]
pub struct BigBase {
    pub alg: Arc<Algebroid>,
    pub p: usize,
    pub q: usize,
    pub slots: SlotVars,
    anchors: HashMap<Gen, CoordField>,
    brackets: HashMap<(Gen, Gen), GenSection>,
}

impl BigBase {
    pub fn new(alg: &Arc<Algebroid>, p: usize, q: usize) -> Self {
        let slots = SlotVars::standard(alg.m(), alg.rank(), p, q);
        let mut base =
            BigBase { alg: alg.clone(), p, q, slots, anchors: HashMap::new(), brackets: HashMap::new() };
        let gens = base.generators();
        for &g in &gens {
            let a = base.gen_anchor(g);
            base.anchors.insert(g, a);
        }
        for &g in &gens {
            for &h in &gens {
                let b = base.gen_bracket(g, h);
                base.brackets.insert((g, h), b);
            }
        }
        base
    }

    pub fn generators(&self) -> Vec<Gen> {
        let (n, m) = (self.alg.rank(), self.alg.m());
        let mut out: Vec<Gen> = (0..n).map(Gen::Full).collect();
        for i in 0..self.p {
            out.extend((0..n).map(|k| Gen::CoreA(i, k)));
        }
        for j in 0..self.q {
            out.extend((0..m).map(|s| Gen::CoreF(j, s)));
        }
        out
    }

    /// Coordinates of `𝕄`: the chart variables, then the slot blocks.
    pub fn coords(&self) -> Vec<Var> {
        let mut v = self.alg.chart.vars.clone();
        v.extend(self.slots.all());
        v
    }

    pub fn label(&self, g: Gen) -> String {
        let f = &self.alg.frame_names;
        let x = self.alg.chart.var_names();
        match g {
            Gen::Full(k) => format!("full[{}]", f[k]),
            Gen::CoreA(i, k) => format!("core_a{}[{}]", i + 1, f[k]),
            Gen::CoreF(j, s) => format!("core_f{}[d{}]", j + 1, x[s]),
        }
    }

    fn gen_anchor(&self, g: Gen) -> CoordField {
        let alg = &self.alg;
        match g {
            Gen::Full(k) => alg.full_lift(k, &self.slots),
            Gen::CoreA(i, k) => vertical_lift(&self.slots.tangent[i], &alg.anchor.row(k)),
            Gen::CoreF(j, s) => {
                vertical_lift(&self.slots.dual[j], &alg.dual_anchor(&vecops::unit(alg.m(), s)))
            }
        }
    }

    fn gen_bracket(&self, g: Gen, h: Gen) -> GenSection {
        let alg = &self.alg;
        match (g, h) {
            (Gen::Full(a), Gen::Full(b)) => self.full_of(alg.c(a, b)),
            (Gen::Full(a), Gen::CoreA(i, b)) => self.core_a_of(i, alg.c(a, b)),
            (Gen::Full(a), Gen::CoreF(j, s)) => {
                // ℒ_{ρ(e_a)} dx_s = d ρ_{as}
                let grad = alg.chart.gradient(alg.anchor.get(a, s));
                self.core_f_of(j, &grad)
            }
            (Gen::CoreA(..) | Gen::CoreF(..), Gen::Full(_)) => self.gen_bracket(h, g).scale(&RatFn::int(-1)),
            _ => GenSection::zero(),
        }
    }

    /// `Σ_k a_k Be_k` in tangent slot `i`.
    pub fn core_a_of(&self, i: usize, a: &[RatFn]) -> GenSection {
        let mut s = GenSection::zero();
        for (k, c) in a.iter().enumerate() {
            s.add_term(Gen::CoreA(i, k), c);
        }
        s
    }

    /// `Σ_s α_s B dx_s` in cotangent slot `j`.
    pub fn core_f_of(&self, j: usize, alpha: &[RatFn]) -> GenSection {
        let mut s = GenSection::zero();
        for (t, c) in alpha.iter().enumerate() {
            s.add_term(Gen::CoreF(j, t), c);
        }
        s
    }

    /// `(Tᵖa, R^q_a)` for `a = Σ a_k e_k`, expanded by the rescaling rules:
    /// `Σ a_k full_k + Σ_{i,k} da_k(X⁽ⁱ⁾) core_a(i,k) − Σ_{j,k} φ⁽ʲ⁾_k core_f(j, da_k)`.
    pub fn full_of(&self, a: &[RatFn]) -> GenSection {
        let chart = &self.alg.chart;
        let mut s = GenSection::zero();
        for (k, ak) in a.iter().enumerate() {
            if ak.is_zero() {
                continue;
            }
            s.add_term(Gen::Full(k), ak);
            let grad = chart.gradient(ak);
            if grad.iter().all(RatFn::is_zero) {
                continue;
            }
            for (i, block) in self.slots.tangent.iter().enumerate() {
                let dak: RatFn = grad.iter().zip(block).map(|(g, &v)| g * &RatFn::var(v)).sum();
                s.add_term(Gen::CoreA(i, k), &dak);
            }
            for (j, block) in self.slots.dual.iter().enumerate() {
                let phi = RatFn::var(block[k]);
                s = s.sub(&self.core_f_of(j, &vecops::scale(&phi, &grad)));
            }
        }
        s
    }

    pub fn anchor(&self, u: &GenSection) -> CoordField {
        let mut out = CoordField::zero();
        for (g, f) in u.terms() {
            out = out.add(&self.anchors[g].scale(f));
        }
        out
    }

    /// `[U, V] = Σ F_g G_h [g,h] + Σ_h ρ(U)(G_h) h − Σ_g ρ(V)(F_g) g`.
    pub fn bracket(&self, u: &GenSection, v: &GenSection) -> GenSection {
        let mut out = GenSection::zero();
        for (g, f) in u.terms() {
            for (h, k) in v.terms() {
                let b = &self.brackets[&(*g, *h)];
                if !b.is_zero() {
                    out = out.add(&b.scale(&(f * k)));
                }
            }
        }
        let (ru, rv) = (self.anchor(u), self.anchor(v));
        for (h, k) in v.terms() {
            out.add_term(*h, &ru.apply(k));
        }
        for (g, f) in u.terms() {
            out.add_term(*g, &-rv.apply(f));
        }
        out
    }

    pub fn fmt_section(&self, u: &GenSection) -> String {
        if u.is_zero() {
            return "0".to_string();
        }
        let parts: Vec<String> = u.terms().map(|(g, f)| format!("({f})*{}", self.label(*g))).collect();
        parts.join(" + ")
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::Full(k) => write!(f, "full{}", k + 1),
            Gen::CoreA(i, k) => write!(f, "core_a({},{})", i + 1, k + 1),
            Gen::CoreF(j, s) => write!(f, "core_f({},{})", j + 1, s + 1),
        }
    }
}
