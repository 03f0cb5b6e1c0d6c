//! Residual reports shared by every checker.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::geometry::field::CoordField;
use crate::geometry::MixedTensor;
use crate::kernel::{Gauss, RatFn};

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Fn(RatFn),
    Complex(Gauss),
    Tensor(MixedTensor),
    Field(Vec<RatFn>),
    Big(CoordField),
    /// A structural failure with no symbolic residual, e.g. a degree bound.
    Note(String),
}

impl Value {
    pub fn is_zero(&self) -> bool {
        match self {
            Value::Fn(f) => f.is_zero(),
            Value::Complex(g) => g.is_zero(),
            Value::Tensor(t) => t.is_zero(),
            Value::Field(v) => v.iter().all(RatFn::is_zero),
            Value::Big(f) => f.is_zero(),
            Value::Note(_) => false,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Fn(g) => write!(f, "{g}"),
            Value::Complex(g) => write!(f, "{g}"),
            Value::Tensor(t) => write!(f, "{t}"),
            Value::Field(v) => {
                let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                write!(f, "[{}]", parts.join(", "))
            }
            Value::Big(v) => write!(f, "{v}"),
            Value::Note(s) => f.write_str(s),
        }
    }
}

impl From<RatFn> for Value {
    fn from(f: RatFn) -> Self {
        Value::Fn(f)
    }
}

impl From<MixedTensor> for Value {
    fn from(t: MixedTensor) -> Self {
        Value::Tensor(t)
    }
}

impl From<Vec<RatFn>> for Value {
    fn from(v: Vec<RatFn>) -> Self {
        Value::Field(v)
    }
}

impl From<CoordField> for Value {
    fn from(v: CoordField) -> Self {
        Value::Big(v)
    }
}

impl From<Gauss> for Value {
    fn from(g: Gauss) -> Self {
        Value::Complex(g)
    }
}

/// One nonzero residual: which identity, on which probe, and its value.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub check: String,
    pub probe: String,
    pub value: Value,
}

/// Nonzero residuals plus a count of how many probes each check evaluated.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub title: String,
    pub residuals: Vec<Residual>,
    pub evaluated: BTreeMap<String, usize>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), ..Default::default() }
    }

    /// Records a residual; returns `true` when it vanishes.
    pub fn record(&mut self, check: &str, probe: impl fmt::Display, value: impl Into<Value>) -> bool {
        *self.evaluated.entry(check.to_string()).or_default() += 1;
        let value = value.into();
        if value.is_zero() {
            return true;
        }
        self.residuals.push(Residual { check: check.to_string(), probe: probe.to_string(), value });
        false
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn passed(&self) -> bool {
        self.residuals.is_empty()
    }

    pub fn failing_checks(&self) -> BTreeSet<String> {
        self.residuals.iter().map(|r| r.check.clone()).collect()
    }

    pub fn fails(&self, check: &str) -> bool {
        self.residuals.iter().any(|r| r.check == check)
    }

    pub fn first(&self, check: &str) -> Option<&Residual> {
        self.residuals.iter().find(|r| r.check == check)
    }

    /// Folds another report in, prefixing its check names.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        let name = |c: &str| if prefix.is_empty() { c.to_string() } else { format!("{prefix}/{c}") };
        for (k, v) in other.evaluated {
            *self.evaluated.entry(name(&k)).or_default() += v;
        }
        for r in other.residuals {
            self.residuals.push(Residual { check: name(&r.check), ..r });
        }
        self.notes.extend(other.notes);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "pass" } else { "fail" };
        writeln!(f, "{}: {status}", self.title)?;
        for (k, v) in &self.evaluated {
            let bad = self.residuals.iter().filter(|r| &r.check == k).count();
            writeln!(f, "  {k}: {} of {v} probes nonzero", bad)?;
        }
        for r in &self.residuals {
            writeln!(f, "  [{}] {} => {}", r.check, r.probe, r.value)?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}
