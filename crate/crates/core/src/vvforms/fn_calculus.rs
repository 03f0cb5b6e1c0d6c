//! `Ωᵖ(M, TM)`: contraction, the Lie derivative along a vector-valued form,
//! the Frölicher–Nijenhuis bracket and the Nijenhuis torsion.

use std::sync::Arc;

use crate::geometry::chart::same_chart;
use crate::geometry::{vecops, Chart, Matrix, MixedTensor};
use crate::kernel::RatFn;

use super::{sign, VvError};

/// `K = Σ_s K^s ⊗ ∂_s` with `K^s ∈ Ωᵖ(M)`, stored as a `(p, 1)` tensor on
/// `A = TM` in the coordinate frame.
#[derive(Clone, Debug, PartialEq)]
pub struct VvForm(MixedTensor);

fn form_rank(omega: &MixedTensor, m: usize) -> MixedTensor {
    if omega.rank() == m {
        omega.clone()
    } else {
        omega.with_rank(m)
    }
}

impl VvForm {
    pub fn new(t: MixedTensor) -> Result<Self, VvError> {
        if t.q() != 1 || t.rank() != t.m() {
            return Err(VvError::NotVectorValued(t.degrees(), t.rank()));
        }
        Ok(VvForm(t))
    }

    pub fn zero(chart: &Arc<Chart>, p: usize) -> Self {
        VvForm(MixedTensor::zero(chart, chart.dim(), p, 1))
    }

    pub fn identity(chart: &Arc<Chart>) -> Self {
        VvForm::from_matrix(chart, &Matrix::identity(chart.dim()))
    }

    /// A vector field as a degree-0 form.
    pub fn vector_field(chart: &Arc<Chart>, x: &[RatFn]) -> Self {
        VvForm(MixedTensor::section(chart, chart.dim(), x))
    }

    /// The `(1,1)` tensor whose column `a` is `K(∂_a)`.
    pub fn from_matrix(chart: &Arc<Chart>, k: &Matrix) -> Self {
        let m = chart.dim();
        let mut t = MixedTensor::zero(chart, m, 1, 1);
        for a in 0..m {
            for s in 0..m {
                t.set(1 << a, 1 << s, k.get(s, a).clone());
            }
        }
        VvForm(t)
    }

    /// `Σ_s comps[s] ⊗ ∂_s`.
    pub fn from_components(chart: &Arc<Chart>, p: usize, comps: &[MixedTensor]) -> Self {
        let m = chart.dim();
        let mut t = MixedTensor::zero(chart, m, p, 1);
        for (s, c) in comps.iter().enumerate() {
            assert_eq!(c.degrees(), (p, 0), "component degree");
            for (&(i, _), f) in c.entries() {
                t.set(i, 1 << s, f.clone());
            }
        }
        VvForm(t)
    }

    pub fn tensor(&self) -> &MixedTensor {
        &self.0
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.0.chart()
    }

    pub fn degree(&self) -> usize {
        self.0.p()
    }

    pub fn m(&self) -> usize {
        self.0.m()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// `K^s = i_K dx_s`.
    pub fn component(&self, s: usize) -> MixedTensor {
        let mut out = MixedTensor::zero(self.chart(), self.m(), self.degree(), 0);
        for (&(i, j), f) in self.0.entries() {
            if j == 1 << s {
                out.set(i, 0, f.clone());
            }
        }
        out
    }

    /// Column matrix of a `(1,1)` form.
    pub fn matrix(&self) -> Matrix {
        assert_eq!(self.degree(), 1, "matrix of a (1,1) tensor");
        let m = self.m();
        let mut out = Matrix::zero(m, m);
        for a in 0..m {
            for s in 0..m {
                out.set(s, a, self.0.get(1 << a, 1 << s));
            }
        }
        out
    }

    /// `K(X_1, …, X_p)`.
    pub fn eval(&self, args: &[Vec<RatFn>]) -> Vec<RatFn> {
        assert_eq!(args.len(), self.degree(), "number of arguments");
        self.0.eval_form(args).as_section()
    }

    pub fn add(&self, o: &VvForm) -> VvForm {
        VvForm(self.0.add(&o.0))
    }

    pub fn sub(&self, o: &VvForm) -> VvForm {
        VvForm(self.0.sub(&o.0))
    }

    pub fn scale(&self, f: &RatFn) -> VvForm {
        VvForm(self.0.scale(f))
    }

    /// `i_K ω`: on `κ ⊗ X` it is `κ ∧ i_X ω`, the normalized shuffle sum.
    /// Zero on functions.
    pub fn contract(&self, omega: &MixedTensor) -> MixedTensor {
        let m = self.m();
        let omega = form_rank(omega, m);
        assert_eq!(omega.q(), 0, "i_K acts on forms");
        let p = self.degree();
        if omega.p() == 0 {
            return MixedTensor::zero(self.chart(), m, p.saturating_sub(1), 0);
        }
        let mut out = MixedTensor::zero(self.chart(), m, p + omega.p() - 1, 0);
        for s in 0..m {
            let ks = self.component(s);
            if ks.is_zero() {
                continue;
            }
            let inner = omega.i_form(&vecops::unit(m, s));
            out = out.add(&ks.w(&inner));
        }
        out
    }

    /// `L_K = i_K d − (−1)^{p−1} d i_K`.
    pub fn lie(&self, omega: &MixedTensor) -> MixedTensor {
        let omega = form_rank(omega, self.m());
        let p = self.degree() as i64;
        let first = self.contract(&omega.d_formwise());
        if omega.p() == 0 {
            return first;
        }
        let second = self.contract(&omega).d_formwise();
        first.sub(&second.scale_int(sign(p - 1)))
    }
}

fn same(k1: &VvForm, k2: &VvForm) -> Result<(), VvError> {
    if same_chart(k1.chart(), k2.chart()) {
        Ok(())
    } else {
        Err(VvError::ChartMismatch)
    }
}

/// `[K1, K2]`, read off from `L_{[K1,K2]} x_s = [L_{K1}, L_{K2}] x_s`.
pub fn fn_bracket(k1: &VvForm, k2: &VvForm) -> Result<VvForm, VvError> {
    same(k1, k2)?;
    let chart = k1.chart().clone();
    let (p1, p2) = (k1.degree(), k2.degree());
    let s = sign((p1 * p2) as i64);
    let comps: Vec<MixedTensor> = (0..chart.dim())
        .map(|j| {
            let x = MixedTensor::scalar(&chart, chart.dim(), chart.coord(j));
            let a = k1.lie(&k2.lie(&x));
            let b = k2.lie(&k1.lie(&x));
            a.sub(&b.scale_int(s))
        })
        .collect();
    Ok(VvForm::from_components(&chart, p1 + p2, &comps))
}

fn apply_matrix(k: &Matrix, x: &[RatFn]) -> Vec<RatFn> {
    k.apply(x)
}

/// Degree-(1,1) bracket by the closed formula
/// `[K1,K2](U,V) = (ℒ_{K1U}K2)V − (ℒ_{K1V}K2)U − K1([K2U,V] − [K2V,U]) + (K2K1 + K1K2)[U,V]`,
/// evaluated on coordinate fields.
pub fn fn_bracket_explicit(k1: &VvForm, k2: &VvForm) -> Result<VvForm, VvError> {
    same(k1, k2)?;
    for k in [k1, k2] {
        if k.degree() != 1 {
            return Err(VvError::Degree { expected: 1, got: k.degree() });
        }
    }
    let chart = k1.chart().clone();
    let m = chart.dim();
    let (a1, a2) = (k1.matrix(), k2.matrix());
    // (ℒ_Y K)(V) = [Y, KV] − K[Y, V]
    let lie_k2 = |y: &[RatFn], v: &[RatFn]| {
        let a = chart.bracket(y, &apply_matrix(&a2, v));
        vecops::sub(&a, &apply_matrix(&a2, &chart.bracket(y, v)))
    };
    let mut t = MixedTensor::zero(&chart, m, 2, 1);
    for a in 0..m {
        for b in a + 1..m {
            let (u, v) = (chart.coord_field(a), chart.coord_field(b));
            let t1 = lie_k2(&apply_matrix(&a1, &u), &v);
            let t2 = lie_k2(&apply_matrix(&a1, &v), &u);
            let inner = vecops::sub(&chart.bracket(&apply_matrix(&a2, &u), &v), &chart.bracket(&apply_matrix(&a2, &v), &u));
            let val = vecops::sub(&vecops::sub(&t1, &t2), &apply_matrix(&a1, &inner));
            for (s, c) in val.into_iter().enumerate() {
                t.set((1 << a) | (1 << b), 1 << s, c);
            }
        }
    }
    Ok(VvForm(t))
}

/// `𝒩_K(X,Y) = [KX,KY] − K([KX,Y] + [X,KY]) + K²[X,Y]` for vector fields.
pub fn torsion_on(chart: &Chart, k: &Matrix, x: &[RatFn], y: &[RatFn]) -> Vec<RatFn> {
    let (kx, ky) = (k.apply(x), k.apply(y));
    let a = chart.bracket(&kx, &ky);
    let mid = vecops::add(&chart.bracket(&kx, y), &chart.bracket(x, &ky));
    let kk = k.apply(&k.apply(&chart.bracket(x, y)));
    vecops::add(&vecops::sub(&a, &k.apply(&mid)), &kk)
}

/// The torsion as a vector-valued 2-form.
pub fn nijenhuis_torsion(k: &VvForm) -> Result<VvForm, VvError> {
    if k.degree() != 1 {
        return Err(VvError::Degree { expected: 1, got: k.degree() });
    }
    let chart = k.chart().clone();
    let m = chart.dim();
    let km = k.matrix();
    let mut t = MixedTensor::zero(&chart, m, 2, 1);
    for a in 0..m {
        for b in a + 1..m {
            let val = torsion_on(&chart, &km, &chart.coord_field(a), &chart.coord_field(b));
            for (s, c) in val.into_iter().enumerate() {
                t.set((1 << a) | (1 << b), 1 << s, c);
            }
        }
    }
    Ok(VvForm(t))
}

/// `ℒ_X K` as a tensor derivation: `Σ_s ℒ_X(K^s) ⊗ ∂_s + K^s ⊗ [X, ∂_s]`.
pub fn lie_derivative(x: &[RatFn], k: &VvForm) -> VvForm {
    let chart = k.chart().clone();
    let m = chart.dim();
    let p = k.degree();
    let mut comps: Vec<MixedTensor> = (0..m).map(|s| k.component(s).lie_formwise(x)).collect();
    for s in 0..m {
        let ks = k.component(s);
        if ks.is_zero() {
            continue;
        }
        // [X, ∂_s] = −∂_s X
        for (t, xt) in x.iter().enumerate() {
            let c = xt.partial(chart.vars[s]);
            if !c.is_zero() {
                comps[t] = comps[t].sub(&ks.scale(&c));
            }
        }
    }
    VvForm::from_components(&chart, p, &comps)
}
