use std::collections::BTreeMap;
use std::fmt;

use crate::kernel::{RatFn, Var};

/// Vector field `Σ c_v ∂/∂v` over an arbitrary set of coordinates; used on
/// the big bases where slot variables join the chart variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoordField {
    comps: BTreeMap<Var, RatFn>,
}

impl CoordField {
    pub fn zero() -> Self {
        CoordField::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, RatFn)>) -> Self {
        let mut f = CoordField::zero();
        for (v, c) in pairs {
            f.add_comp(v, &c);
        }
        f
    }

    pub fn add_comp(&mut self, v: Var, c: &RatFn) {
        if c.is_zero() {
            return;
        }
        let s = &self.comp(v) + c;
        if s.is_zero() {
            self.comps.remove(&v);
        } else {
            self.comps.insert(v, s);
        }
    }

    pub fn comp(&self, v: Var) -> RatFn {
        self.comps.get(&v).cloned().unwrap_or_default()
    }

    pub fn comps(&self) -> impl Iterator<Item = (&Var, &RatFn)> {
        self.comps.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn apply(&self, f: &RatFn) -> RatFn {
        self.comps.iter().map(|(&v, c)| c * &f.partial(v)).filter(|t| !t.is_zero()).sum()
    }

    pub fn add(&self, o: &CoordField) -> CoordField {
        let mut out = self.clone();
        for (&v, c) in &o.comps {
            out.add_comp(v, c);
        }
        out
    }

    pub fn sub(&self, o: &CoordField) -> CoordField {
        self.add(&o.scale(&RatFn::int(-1)))
    }

    pub fn scale(&self, f: &RatFn) -> CoordField {
        CoordField::from_pairs(self.comps.iter().map(|(&v, c)| (v, f * c)))
    }

    pub fn bracket(&self, o: &CoordField) -> CoordField {
        let mut out = CoordField::zero();
        let vars: std::collections::BTreeSet<Var> = self.comps.keys().chain(o.comps.keys()).copied().collect();
        for v in vars {
            out.add_comp(v, &(&self.apply(&o.comp(v)) - &o.apply(&self.comp(v))));
        }
        out
    }
}

impl fmt::Display for CoordField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.comps.iter().map(|(v, c)| format!("({c})*d/d{v}")).collect();
        f.write_str(&parts.join(" + "))
    }
}
