use std::sync::Arc;

use crate::geometry::{vecops, Chart, Matrix, MixedTensor};
use crate::kernel::RatFn;
use crate::report::Report;

use super::AlgebroidError;

/// Section coefficients `a = Σ a_i e_i`.
pub type Section = Vec<RatFn>;

/// Lie algebroid on the trivial bundle of rank `n` over one chart.
///
/// `anchor` is `n × m` with `ρ(e_i) = Σ_j anchor[i][j] ∂_j`. `table[i][j]`
/// holds `[e_i, e_j]`; constructors fill it skew, the DSL may not.
#[derive(Clone, Debug, PartialEq)]
pub struct Algebroid {
    pub name: String,
    pub chart: Arc<Chart>,
    pub frame_names: Vec<String>,
    pub anchor: Matrix,
    pub table: Vec<Vec<Section>>,
}

impl Algebroid {
    /// Builds from the anchor rows and the brackets `[e_i, e_j]` for `i < j`.
    pub fn new(
        name: &str,
        chart: &Arc<Chart>,
        frame_names: Vec<String>,
        anchor: Matrix,
        upper: impl Fn(usize, usize) -> Section,
    ) -> Result<Self, AlgebroidError> {
        let n = frame_names.len();
        if anchor.rows != n || anchor.cols != chart.dim() {
            return Err(AlgebroidError::AnchorShape { rows: anchor.rows, cols: anchor.cols, n, m: chart.dim() });
        }
        let mut table = vec![vec![vecops::zeros(n); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let c = upper(i, j);
                if c.len() != n {
                    return Err(AlgebroidError::SectionLength { got: c.len(), rank: n });
                }
                table[j][i] = vecops::neg(&c);
                table[i][j] = c;
            }
        }
        Ok(Algebroid { name: name.to_string(), chart: chart.clone(), frame_names, anchor, table })
    }

    pub fn default_frame(prefix: &str, n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("{prefix}{i}")).collect()
    }

    /// `TM` with the coordinate frame.
    pub fn tangent(chart: &Arc<Chart>) -> Self {
        let m = chart.dim();
        let names = chart.var_names().iter().map(|v| format!("d_{v}")).collect();
        Algebroid::new("T", chart, names, Matrix::identity(m), |_, _| vecops::zeros(m)).expect("shapes agree")
    }

    /// Rank-`n` bundle with zero anchor and bracket (only the Leibniz rule
    /// is meaningful on it).
    pub fn bare(chart: &Arc<Chart>, n: usize) -> Self {
        Algebroid::new("E", chart, Algebroid::default_frame("e", n), Matrix::zero(n, chart.dim()), |_, _| {
            vecops::zeros(n)
        })
        .expect("shapes agree")
    }

    /// Cotangent algebroid of a bivector `Π` (a `(0,2)` tensor on `TM`).
    ///
    /// Frame `dx_i`; anchor `Π♯(α) = Π(α, ·)`; bracket computed on the frame
    /// from `[α,β] = ℒ_{Π♯α}β − ℒ_{Π♯β}α − d(i_{Π♯α}β)`.
    pub fn cotangent(chart: &Arc<Chart>, pi: &MixedTensor) -> Result<Self, AlgebroidError> {
        let m = chart.dim();
        if pi.degrees() != (0, 2) || pi.rank() != m {
            return Err(AlgebroidError::NotABivector);
        }
        let anchor = Matrix::from_rows((0..m).map(|i| sharp(pi, &vecops::unit(m, i))).collect());
        let names = chart.var_names().iter().map(|v| format!("d{v}")).collect();
        let dx = |i: usize| MixedTensor::dx(chart, 0, i);
        let bracket = |i: usize, j: usize| {
            let (a, b) = (anchor.row(i), anchor.row(j));
            let t = dx(j)
                .lie_formwise(&a)
                .sub(&dx(i).lie_formwise(&b))
                .sub(&dx(j).i_form(&a).d_formwise());
            t.as_one_form()
        };
        Algebroid::new("T*", chart, names, anchor.clone(), bracket)
    }

    pub fn rank(&self) -> usize {
        self.frame_names.len()
    }

    pub fn m(&self) -> usize {
        self.chart.dim()
    }

    pub fn frame(&self, i: usize) -> Section {
        vecops::unit(self.rank(), i)
    }

    pub fn c(&self, i: usize, j: usize) -> &Section {
        &self.table[i][j]
    }

    /// `ρ(a)` as a vector field.
    pub fn anchor_of(&self, a: &[RatFn]) -> Vec<RatFn> {
        let mut out = vecops::zeros(self.m());
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            out = vecops::add(&out, &vecops::scale(ai, &self.anchor.row(i)));
        }
        out
    }

    /// `ρ*α ∈ Γ(A*)` for a one-form `α` given by components.
    pub fn dual_anchor(&self, alpha: &[RatFn]) -> Vec<RatFn> {
        (0..self.rank()).map(|i| vecops::dot(&self.anchor.row(i), alpha)).collect()
    }

    /// `ρ*df`.
    pub fn dual_anchor_df(&self, f: &RatFn) -> Vec<RatFn> {
        self.dual_anchor(&self.chart.gradient(f))
    }

    pub fn bracket(&self, a: &[RatFn], b: &[RatFn]) -> Section {
        let n = self.rank();
        let mut out = vecops::zeros(n);
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if b[j].is_zero() {
                    continue;
                }
                out = vecops::add(&out, &vecops::scale(&(&a[i] * &b[j]), &self.table[i][j]));
            }
        }
        let (ra, rb) = (self.anchor_of(a), self.anchor_of(b));
        for k in 0..n {
            let t = &self.chart.apply(&ra, &b[k]) - &self.chart.apply(&rb, &a[k]);
            out[k] = &out[k] + &t;
        }
        out
    }

    pub fn section_tensor(&self, a: &[RatFn]) -> MixedTensor {
        MixedTensor::section(&self.chart, self.rank(), a)
    }

    pub fn frame_tensor(&self, i: usize) -> MixedTensor {
        MixedTensor::frame(&self.chart, self.rank(), i)
    }

    pub fn dx(&self, j: usize) -> MixedTensor {
        MixedTensor::dx(&self.chart, self.rank(), j)
    }

    pub fn zero_tensor(&self, p: usize, q: usize) -> MixedTensor {
        MixedTensor::zero(&self.chart, self.rank(), p, q)
    }

    pub fn scalar(&self, f: RatFn) -> MixedTensor {
        MixedTensor::scalar(&self.chart, self.rank(), f)
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// Skewness, anchor morphism and Jacobi on the frame.
    pub fn check(&self) -> Report {
        let n = self.rank();
        let mut rep = Report::new(format!("algebroid {}", self.name));
        let f = &self.frame_names;
        for i in 0..n {
            for j in i..n {
                let s = vecops::add(&self.table[i][j], &self.table[j][i]);
                rep.record("skew", format!("[{0},{1}] + [{1},{0}]", f[i], f[j]), s);
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let lhs = self.anchor_of(&self.table[i][j]);
                let rhs = self.chart.bracket(&self.anchor.row(i), &self.anchor.row(j));
                rep.record("anchor", format!("({}, {})", f[i], f[j]), vecops::sub(&lhs, &rhs));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (ei, ej, ek) = (self.frame(i), self.frame(j), self.frame(k));
                    let t1 = self.bracket(&ei, &self.bracket(&ej, &ek));
                    let t2 = self.bracket(&ej, &self.bracket(&ek, &ei));
                    let t3 = self.bracket(&ek, &self.bracket(&ei, &ej));
                    let s = vecops::add(&vecops::add(&t1, &t2), &t3);
                    rep.record("jacobi", format!("({}, {}, {})", f[i], f[j], f[k]), s);
                }
            }
        }
        rep.note("Jacobi checked on the frame; the Leibniz rule extends it");
        rep
    }
}

/// `Π♯(α) = Π(α, ·)` with `(X∧Y)(α,β) = α(X)β(Y) − α(Y)β(X)`.
pub fn sharp(pi: &MixedTensor, alpha: &[RatFn]) -> Vec<RatFn> {
    pi.i_multi(alpha).as_section()
}

/// `Π(dx_i, dx_j)`.
pub fn bivector_entry(pi: &MixedTensor, i: usize, j: usize) -> RatFn {
    let m = pi.rank();
    let v = sharp(pi, &vecops::unit(m, i));
    v[j].clone()
}
