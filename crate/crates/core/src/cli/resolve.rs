//! Turns parsed declarations into algebroids, tensors and triples.
//! References must point at earlier declarations.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebroid::Algebroid;
use crate::geometry::tensor::sort_sign;
use crate::geometry::{vecops, Chart, Matrix, MixedTensor};
use crate::im::{coboundary, IMTensor};
use crate::kernel::parse::parse_at;
use crate::kernel::symbol::is_identifier;
use crate::kernel::{eval_expr, KernelError, RatFn, Var};

use super::dsl::{Builtin, Decl, Entry, Part, ProblemFile, SectionSrc, Src};
use super::CliError;

/// A `(1,1)` tensor on the tangent bundle of a chart, column `j` = `K∂_j`.
#[derive(Clone, Debug)]
pub struct Endo {
    pub chart: Arc<Chart>,
    pub matrix: Matrix,
}

impl Endo {
    /// `Σ m[i][j] dx_j ⊗ ∂_i` on `TM`.
    pub fn tensor(&self) -> MixedTensor {
        let m = self.chart.dim();
        let mut t = MixedTensor::zero(&self.chart, m, 1, 1);
        for i in 0..m {
            for j in 0..m {
                t.set(1 << j, 1 << i, self.matrix.get(i, j).clone());
            }
        }
        t
    }
}

#[derive(Clone, Debug)]
pub struct Splitting {
    pub alg: Arc<Algebroid>,
    /// Projector onto the second summand, column `i` = `P e_i`.
    pub proj: Matrix,
}

#[derive(Clone, Debug, Default)]
pub struct Model {
    pub charts: BTreeMap<String, Arc<Chart>>,
    pub algebroids: BTreeMap<String, Arc<Algebroid>>,
    pub bivectors: BTreeMap<String, MixedTensor>,
    pub tensors: BTreeMap<String, (Arc<Algebroid>, MixedTensor)>,
    pub endos: BTreeMap<String, Endo>,
    pub ims: BTreeMap<String, IMTensor>,
    pub splittings: BTreeMap<String, Splitting>,
}

fn sem(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Semantic { line, msg: msg.into() }
}

fn kernel_err(line: usize, e: KernelError) -> CliError {
    match e {
        KernelError::Syntax { line, col, msg } => CliError::Parse { line, col, msg },
        KernelError::UnknownVariable { name, line, col } => sem(line, format!("column {col}: unknown variable `{name}`")),
        KernelError::DivisionByZero => sem(line, "division by zero"),
    }
}

fn eval(src: &Src, ctx: &[String]) -> Result<RatFn, CliError> {
    let e = parse_at(&src.text, Some(ctx), src.line, src.col).map_err(|e| kernel_err(src.line, e))?;
    eval_expr(&e).map_err(|e| kernel_err(src.line, e))
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, kind: &str, name: &str, line: usize) -> Result<&'a T, CliError> {
    map.get(name).ok_or_else(|| sem(line, format!("unknown {kind} `{name}`")))
}

fn position(names: &[String], name: &str, what: &str, line: usize) -> Result<usize, CliError> {
    names.iter().position(|n| n == name).ok_or_else(|| sem(line, format!("`{name}` is not {what}")))
}

/// Reads a value written as a linear combination of `basis` names, e.g.
/// `e3` or `x*dx1 - dx2`; returns the coefficients.
fn combination(src: &Src, chart: &Chart, basis: &[String]) -> Result<Vec<RatFn>, CliError> {
    let vars = chart.var_names();
    if let Some(b) = basis.iter().find(|b| vars.contains(b)) {
        return Err(sem(src.line, format!("`{b}` is both a coordinate and a basis name; write the basis explicitly")));
    }
    if let Some(b) = basis.iter().find(|b| !is_identifier(b)) {
        return Err(sem(src.line, format!("`{b}` cannot be used as a symbol; write the basis explicitly")));
    }
    let ctx: Vec<String> = vars.iter().chain(basis).cloned().collect();
    let value = eval(src, &ctx)?;
    let syms: Vec<Var> = basis.iter().map(|b| Var::new(b)).collect();
    let mut rest = value.clone();
    let mut out = Vec::with_capacity(basis.len());
    for &v in &syms {
        let c = value.partial(v);
        if c.contains_any(|w| syms.contains(&w)) {
            return Err(sem(src.line, format!("`{}` is not linear in {}", src.text, basis.join(", "))));
        }
        rest = &rest - &(&c * &RatFn::var(v));
        out.push(c);
    }
    if !rest.is_zero() {
        return Err(sem(src.line, format!("`{}` is not a combination of {}", src.text, basis.join(", "))));
    }
    Ok(out)
}

/// Fills one component of degrees `(p, q)`: explicit `forms | frames` basis, or
/// a combination of single basis names when `p + q ≤ 1`.
fn fill(
    t: &mut MixedTensor,
    e: &Entry,
    chart: &Chart,
    frame: &[String],
    what: &str,
) -> Result<(), CliError> {
    let vars = chart.var_names();
    let forms: Vec<String> = vars.iter().map(|v| format!("d{v}")).collect();
    let (p, q) = t.degrees();
    if e.basis.is_empty() {
        return match p + q {
            0 => {
                let v = eval(&e.value, &vars)?;
                t.add_at(0, 0, &v);
                Ok(())
            }
            1 => {
                let names = if p == 1 { &forms } else { frame };
                for (k, c) in combination(&e.value, chart, names)?.iter().enumerate() {
                    let (i, j) = if p == 1 { (1 << k, 0) } else { (0, 1 << k) };
                    t.add_at(i, j, c);
                }
                Ok(())
            }
            _ => Err(sem(e.line, format!("{what} has degrees ({p},{q}); give the basis as `forms | frames`"))),
        };
    }
    let (fs, rs) = match e.basis.split_once('|') {
        Some((a, b)) => (a.trim(), b.trim()),
        None if q == 0 => (e.basis.as_str(), ""),
        None if p == 0 => ("", e.basis.as_str()),
        None => return Err(sem(e.line, format!("{what} has degrees ({p},{q}); separate forms and frames with `|`"))),
    };
    let split = |s: &str| -> Vec<String> {
        if s.is_empty() {
            Vec::new()
        } else {
            s.split('^').map(|w| w.trim().to_string()).collect()
        }
    };
    let fi = split(fs).iter().map(|w| position(&forms, w, "a coordinate 1-form", e.line)).collect::<Result<Vec<_>, _>>()?;
    let ri = split(rs).iter().map(|w| position(frame, w, "a frame name", e.line)).collect::<Result<Vec<_>, _>>()?;
    if (fi.len(), ri.len()) != (p, q) {
        return Err(sem(e.line, format!("{what} has degrees ({p},{q}) but basis `{}` has ({},{})", e.basis, fi.len(), ri.len())));
    }
    let (s1, m1) = sort_sign(&fi);
    let (s2, m2) = sort_sign(&ri);
    if s1 * s2 == 0 {
        return Err(sem(e.line, format!("basis `{}` repeats an index", e.basis)));
    }
    let v = eval(&e.value, &vars)?;
    t.add_at(m1, m2, &v.scale_int(s1 * s2));
    Ok(())
}

fn matrix(rows: &[Vec<Src>], size: (usize, usize), ctx: &[String], line: usize) -> Result<Matrix, CliError> {
    if rows.len() != size.0 || rows.iter().any(|r| r.len() != size.1) {
        return Err(sem(line, format!("expected a {}x{} matrix", size.0, size.1)));
    }
    let vals = rows.iter().map(|r| r.iter().map(|s| eval(s, ctx)).collect()).collect::<Result<Vec<Vec<_>>, _>>()?;
    Ok(Matrix::from_rows(vals))
}

fn check_names(names: &[String], line: usize, what: &str) -> Result<(), CliError> {
    for (k, n) in names.iter().enumerate() {
        if names[..k].contains(n) {
            return Err(sem(line, format!("{what} `{n}` listed twice")));
        }
    }
    Ok(())
}

impl Model {
    fn contains(&self, kind: &str, name: &str) -> bool {
        match kind {
            "chart" => self.charts.contains_key(name),
            "algebroid" => self.algebroids.contains_key(name),
            "bivector" => self.bivectors.contains_key(name),
            "tensor" => self.tensors.contains_key(name),
            "endo" => self.endos.contains_key(name),
            "im" => self.ims.contains_key(name),
            _ => self.splittings.contains_key(name),
        }
    }

    fn chart(&self, name: &str, line: usize) -> Result<&Arc<Chart>, CliError> {
        lookup(&self.charts, "chart", name, line)
    }

    fn alg(&self, name: &str, line: usize) -> Result<&Arc<Algebroid>, CliError> {
        lookup(&self.algebroids, "algebroid", name, line)
    }

    pub fn build(pf: &ProblemFile) -> Result<Model, CliError> {
        let mut m = Model::default();
        for (line, d) in &pf.decls {
            let line = *line;
            if m.contains(d.kind(), d.name()) {
                return Err(sem(line, format!("{} `{}` declared twice", d.kind(), d.name())));
            }
            m.add(line, d)?;
        }
        Ok(m)
    }

    fn add(&mut self, line: usize, d: &Decl) -> Result<(), CliError> {
        match d {
            Decl::Chart { name, vars } => {
                check_names(vars, line, "variable")?;
                if let Some(v) = vars.iter().find(|v| !is_identifier(v)) {
                    return Err(sem(line, format!("`{v}` is not a valid variable name")));
                }
                if vars.len() > 16 {
                    return Err(sem(line, "at most 16 coordinates are supported"));
                }
                let refs: Vec<&str> = vars.iter().map(String::as_str).collect();
                self.charts.insert(name.clone(), Chart::new(name, &refs));
            }
            Decl::Builtin { name, kind } => {
                let alg = match kind {
                    Builtin::Tangent { chart } => Algebroid::tangent(self.chart(chart, line)?),
                    Builtin::Bare { chart, rank } => {
                        if *rank == 0 || *rank > 16 {
                            return Err(sem(line, "rank must be between 1 and 16"));
                        }
                        Algebroid::bare(self.chart(chart, line)?, *rank)
                    }
                    Builtin::Cotangent { chart, bivector } => {
                        let c = self.chart(chart, line)?.clone();
                        let pi = lookup(&self.bivectors, "bivector", bivector, line)?;
                        if !crate::geometry::chart::same_chart(pi.chart(), &c) {
                            return Err(sem(line, format!("bivector `{bivector}` lives on another chart")));
                        }
                        Algebroid::cotangent(&c, pi).map_err(|e| sem(line, e.to_string()))?
                    }
                };
                self.algebroids.insert(name.clone(), Arc::new(alg.with_name(name)));
            }
            Decl::Algebroid { name, chart, frame, anchors, brackets } => {
                let c = self.chart(chart, line)?.clone();
                check_names(frame, line, "frame name")?;
                let vars = c.var_names();
                let n = frame.len();
                if n > 16 {
                    return Err(sem(line, "rank must be at most 16"));
                }
                let mut anchor = Matrix::zero(n, c.dim());
                let mut seen = vec![false; n];
                for (l, e, row) in anchors {
                    let i = position(frame, e, "a frame name", *l)?;
                    if std::mem::replace(&mut seen[i], true) {
                        return Err(sem(*l, format!("anchor of `{e}` given twice")));
                    }
                    if row.len() != c.dim() {
                        return Err(sem(*l, format!("anchor needs {} entries, got {}", c.dim(), row.len())));
                    }
                    for (j, s) in row.iter().enumerate() {
                        anchor.set(i, j, eval(s, &vars)?);
                    }
                }
                let mut table: BTreeMap<(usize, usize), Vec<RatFn>> = BTreeMap::new();
                for (l, a, b, val) in brackets {
                    let (i, j) = (position(frame, a, "a frame name", *l)?, position(frame, b, "a frame name", *l)?);
                    if i == j {
                        return Err(sem(*l, format!("[{a},{a}] is zero by skew-symmetry")));
                    }
                    let v = self.section_value(val, &c, frame, *l)?;
                    let (key, v) = if i < j { ((i, j), v) } else { ((j, i), vecops::neg(&v)) };
                    if table.insert(key, v).is_some() {
                        return Err(sem(*l, format!("bracket [{a},{b}] given twice")));
                    }
                }
                let alg = Algebroid::new(name, &c, frame.clone(), anchor, |i, j| {
                    table.get(&(i, j)).cloned().unwrap_or_else(|| vecops::zeros(n))
                })
                .map_err(|e| sem(line, e.to_string()))?;
                self.algebroids.insert(name.clone(), Arc::new(alg));
            }
            Decl::Bivector { name, chart, entries } => {
                let c = self.chart(chart, line)?.clone();
                let vars = c.var_names();
                let m = c.dim();
                let mut pi = MixedTensor::zero(&c, m, 0, 2);
                for (l, a, b, v) in entries {
                    let (i, j) = (position(&vars, a, "a coordinate", *l)?, position(&vars, b, "a coordinate", *l)?);
                    let (s, mask) = sort_sign(&[i, j]);
                    if s == 0 {
                        return Err(sem(*l, format!("{{{a},{a}}} is zero by skew-symmetry")));
                    }
                    pi.add_at(0, mask, &eval(v, &vars)?.scale_int(s));
                }
                self.bivectors.insert(name.clone(), pi);
            }
            Decl::Tensor { name, alg, p, q, entries } => {
                let a = self.alg(alg, line)?.clone();
                if *p > a.m() || *q > a.rank() {
                    return Err(sem(line, format!("type (p={p}, q={q}) exceeds dim {} / rank {}", a.m(), a.rank())));
                }
                let mut t = a.zero_tensor(*p, *q);
                for e in entries {
                    fill(&mut t, e, &a.chart, &a.frame_names, "tensor")?;
                }
                self.tensors.insert(name.clone(), (a, t));
            }
            Decl::Endo { name, chart, rows } => {
                let c = self.chart(chart, line)?.clone();
                let mat = matrix(rows, (c.dim(), c.dim()), &c.var_names(), line)?;
                self.endos.insert(name.clone(), Endo { chart: c, matrix: mat });
            }
            Decl::Splitting { name, alg, rows } => {
                let a = self.alg(alg, line)?.clone();
                let n = a.rank();
                let mat = matrix(rows, (n, n), &a.chart.var_names(), line)?;
                self.splittings.insert(name.clone(), Splitting { alg: a, proj: mat });
            }
            Decl::Coboundary { name, phi, alg } => {
                let a = self.alg(alg, line)?.clone();
                let t = match (self.tensors.get(phi), self.endos.get(phi)) {
                    (Some(_), Some(_)) => return Err(sem(line, format!("`{phi}` names both a tensor and an endo"))),
                    (Some((ta, t)), None) => {
                        if !Arc::ptr_eq(ta, &a) {
                            return Err(sem(line, format!("tensor `{phi}` is not declared on `{alg}`")));
                        }
                        t.clone()
                    }
                    (None, Some(e)) => e.tensor(),
                    (None, None) => return Err(sem(line, format!("unknown tensor or endo `{phi}`"))),
                };
                let im = coboundary(&a, &t).map_err(|e| sem(line, e.to_string()))?;
                self.ims.insert(name.clone(), im);
            }
            Decl::Im { name, alg, q, p, entries } => {
                let a = self.alg(alg, line)?.clone();
                let (q, p) = (*q, *p);
                let (n, m) = (a.rank(), a.m());
                if p > m || q > n {
                    return Err(sem(line, format!("type (q={q}, p={p}) exceeds rank {n} / dim {m}")));
                }
                let forms: Vec<String> = a.chart.var_names().iter().map(|v| format!("d{v}")).collect();
                let mut d = vec![a.zero_tensor(p, q); n];
                let mut l = (p > 0).then(|| vec![a.zero_tensor(p - 1, q); n]);
                let mut r = (q > 0).then(|| vec![a.zero_tensor(p, q - 1); m]);
                for e in entries {
                    let (slot, what) = match e.part {
                        Part::D => (&mut d[position(&a.frame_names, &e.target, "a frame name", e.entry.line)?], "D"),
                        Part::L => {
                            let i = position(&a.frame_names, &e.target, "a frame name", e.entry.line)?;
                            let v = l.as_mut().ok_or_else(|| sem(e.entry.line, "l is absent when p = 0"))?;
                            (&mut v[i], "l")
                        }
                        Part::R => {
                            let j = position(&forms, &e.target, "a coordinate 1-form", e.entry.line)?;
                            let v = r.as_mut().ok_or_else(|| sem(e.entry.line, "r is absent when q = 0"))?;
                            (&mut v[j], "r")
                        }
                    };
                    fill(slot, &e.entry, &a.chart, &a.frame_names, what)?;
                }
                let im = IMTensor::new(a, q, p, d, l, r).map_err(|e| sem(line, e.to_string()))?;
                self.ims.insert(name.clone(), im);
            }
        }
        Ok(())
    }

    /// A section given as `[c1, …]` or as a combination of frame names.
    fn section_value(&self, val: &SectionSrc, c: &Chart, frame: &[String], line: usize) -> Result<Vec<RatFn>, CliError> {
        match val {
            SectionSrc::List(xs) => {
                if xs.len() != frame.len() {
                    return Err(sem(line, format!("section needs {} entries, got {}", frame.len(), xs.len())));
                }
                xs.iter().map(|s| eval(s, &c.var_names())).collect()
            }
            SectionSrc::Combination(s) => combination(s, c, frame),
        }
    }
}
