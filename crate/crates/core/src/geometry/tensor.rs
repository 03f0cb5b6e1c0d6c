use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::kernel::RatFn;

use super::chart::{same_chart, Chart};
use super::index::{self, bits, Mask};
use super::GeometryError;

/// `Σ Φ_{I,J} dx^I ⊗ e_J` in `Γ(∧ᵖT*M ⊗ ∧ᵠA)` over one chart, `A` trivialized
/// with rank `rank`. Keys are `(I, J)` bitmasks; only nonzero entries are kept.
#[derive(Clone, Debug)]
pub struct MixedTensor {
    chart: Arc<Chart>,
    rank: usize,
    p: usize,
    q: usize,
    coeffs: BTreeMap<(Mask, Mask), RatFn>,
}

impl PartialEq for MixedTensor {
    fn eq(&self, o: &Self) -> bool {
        same_chart(&self.chart, &o.chart)
            && self.rank == o.rank
            && self.p == o.p
            && self.q == o.q
            && self.coeffs == o.coeffs
    }
}

impl Eq for MixedTensor {}

impl MixedTensor {
    pub fn zero(chart: &Arc<Chart>, rank: usize, p: usize, q: usize) -> Self {
        MixedTensor { chart: chart.clone(), rank, p, q, coeffs: BTreeMap::new() }
    }

    pub fn scalar(chart: &Arc<Chart>, rank: usize, f: RatFn) -> Self {
        let mut t = MixedTensor::zero(chart, rank, 0, 0);
        t.set(0, 0, f);
        t
    }

    /// The frame section `e_i` (0-based).
    pub fn frame(chart: &Arc<Chart>, rank: usize, i: usize) -> Self {
        let mut t = MixedTensor::zero(chart, rank, 0, 1);
        t.set(0, 1 << i, RatFn::one());
        t
    }

    /// The coordinate differential `dx_j` (0-based).
    pub fn dx(chart: &Arc<Chart>, rank: usize, j: usize) -> Self {
        let mut t = MixedTensor::zero(chart, rank, 1, 0);
        t.set(1 << j, 0, RatFn::one());
        t
    }

    pub fn section(chart: &Arc<Chart>, rank: usize, comps: &[RatFn]) -> Self {
        assert_eq!(comps.len(), rank);
        let mut t = MixedTensor::zero(chart, rank, 0, 1);
        for (i, c) in comps.iter().enumerate() {
            t.set(0, 1 << i, c.clone());
        }
        t
    }

    pub fn one_form(chart: &Arc<Chart>, rank: usize, comps: &[RatFn]) -> Self {
        assert_eq!(comps.len(), chart.dim());
        let mut t = MixedTensor::zero(chart, rank, 1, 0);
        for (j, c) in comps.iter().enumerate() {
            t.set(1 << j, 0, c.clone());
        }
        t
    }

    /// `f dx^I ⊗ e_J` from index lists (any order; sign from sorting).
    pub fn monomial(chart: &Arc<Chart>, rank: usize, f: RatFn, forms: &[usize], frames: &[usize]) -> Self {
        let mut t = MixedTensor::zero(chart, rank, forms.len(), frames.len());
        let (s1, i) = sort_sign(forms);
        let (s2, j) = sort_sign(frames);
        if s1 != 0 && s2 != 0 {
            t.set(i, j, f.scale_int(s1 * s2));
        }
        t
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn m(&self) -> usize {
        self.chart.dim()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, i: Mask, j: Mask) -> RatFn {
        self.coeffs.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, i: Mask, j: Mask, f: RatFn) {
        debug_assert!(index::size(i) == self.p && index::size(j) == self.q);
        if f.is_zero() {
            self.coeffs.remove(&(i, j));
        } else {
            self.coeffs.insert((i, j), f);
        }
    }

    pub fn add_at(&mut self, i: Mask, j: Mask, f: &RatFn) {
        if f.is_zero() {
            return;
        }
        let v = &self.get(i, j) + f;
        self.set(i, j, v);
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(Mask, Mask), &RatFn)> {
        self.coeffs.iter()
    }

    pub fn map(&self, f: impl Fn(&RatFn) -> RatFn) -> Self {
        let mut out = MixedTensor::zero(&self.chart, self.rank, self.p, self.q);
        for (&(i, j), c) in &self.coeffs {
            out.set(i, j, f(c));
        }
        out
    }

    pub fn check_compatible(&self, o: &MixedTensor) -> Result<(), GeometryError> {
        if !same_chart(&self.chart, &o.chart) {
            return Err(GeometryError::ChartMismatch);
        }
        if self.rank != o.rank {
            return Err(GeometryError::RankMismatch { left: self.rank, right: o.rank });
        }
        Ok(())
    }

    fn check_same_shape(&self, o: &MixedTensor) {
        assert!(
            same_chart(&self.chart, &o.chart) && self.rank == o.rank && self.p == o.p && self.q == o.q,
            "adding tensors of shape ({},{}) and ({},{})",
            self.p,
            self.q,
            o.p,
            o.q
        );
    }

    pub fn add(&self, o: &MixedTensor) -> MixedTensor {
        self.check_same_shape(o);
        let mut out = self.clone();
        for (&(i, j), c) in &o.coeffs {
            out.add_at(i, j, c);
        }
        out
    }

    pub fn sub(&self, o: &MixedTensor) -> MixedTensor {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> MixedTensor {
        self.map(|c| -c)
    }

    pub fn scale(&self, f: &RatFn) -> MixedTensor {
        if f.is_zero() {
            return MixedTensor::zero(&self.chart, self.rank, self.p, self.q);
        }
        self.map(|c| f * c)
    }

    pub fn scale_int(&self, n: i64) -> MixedTensor {
        self.map(|c| c.scale_int(n))
    }

    /// `(ω⊗X) ∧ (η⊗Y) = (ω∧η) ⊗ (X∧Y)`.
    pub fn wedge(&self, o: &MixedTensor) -> Result<MixedTensor, GeometryError> {
        self.check_compatible(o)?;
        let mut out = MixedTensor::zero(&self.chart, self.rank, self.p + o.p, self.q + o.q);
        for (&(i1, j1), a) in &self.coeffs {
            for (&(i2, j2), b) in &o.coeffs {
                let (Some((s1, i)), Some((s2, j))) = (index::merge(i1, i2), index::merge(j1, j2)) else {
                    continue;
                };
                out.add_at(i, j, &(a * b).scale_int(s1 * s2));
            }
        }
        Ok(out)
    }

    pub fn w(&self, o: &MixedTensor) -> MixedTensor {
        self.wedge(o).expect("wedge of compatible tensors")
    }

    /// Form-side interior product `i_U`.
    pub fn contract_form(&self, u: &[RatFn]) -> Result<MixedTensor, GeometryError> {
        if self.p == 0 {
            return Err(GeometryError::NothingToContract { side: "form" });
        }
        Ok(self.i_form(u))
    }

    /// Multivector-side interior product `i_ξ` for `ξ ∈ Γ(A*)`.
    pub fn contract_multi(&self, xi: &[RatFn]) -> Result<MixedTensor, GeometryError> {
        if self.q == 0 {
            return Err(GeometryError::NothingToContract { side: "multivector" });
        }
        Ok(self.i_multi(xi))
    }

    /// `i_U`, returning zero on degree-0 input.
    pub fn i_form(&self, u: &[RatFn]) -> MixedTensor {
        assert_eq!(u.len(), self.m(), "vector field length");
        if self.p == 0 {
            return MixedTensor::zero(&self.chart, self.rank, 0, self.q);
        }
        let mut out = MixedTensor::zero(&self.chart, self.rank, self.p - 1, self.q);
        for (&(i, j), c) in &self.coeffs {
            for k in bits(i) {
                if u[k].is_zero() {
                    continue;
                }
                let (s, rest) = index::remove(i, k).unwrap();
                out.add_at(rest, j, &(c * &u[k]).scale_int(s));
            }
        }
        out
    }

    /// `i_ξ`, returning zero on degree-0 input.
    pub fn i_multi(&self, xi: &[RatFn]) -> MixedTensor {
        assert_eq!(xi.len(), self.rank, "covector length");
        if self.q == 0 {
            return MixedTensor::zero(&self.chart, self.rank, self.p, 0);
        }
        let mut out = MixedTensor::zero(&self.chart, self.rank, self.p, self.q - 1);
        for (&(i, j), c) in &self.coeffs {
            for k in bits(j) {
                if xi[k].is_zero() {
                    continue;
                }
                let (s, rest) = index::remove(j, k).unwrap();
                out.add_at(i, rest, &(c * &xi[k]).scale_int(s));
            }
        }
        out
    }

    /// Exterior derivative of a pure form.
    pub fn d(&self) -> Result<MixedTensor, GeometryError> {
        if self.q != 0 {
            return Err(GeometryError::NotAForm { q: self.q });
        }
        Ok(self.d_formwise())
    }

    /// `d` applied to the form factor of each `e_J` component (frame held fixed).
    pub fn d_formwise(&self) -> MixedTensor {
        let mut out = MixedTensor::zero(&self.chart, self.rank, self.p + 1, self.q);
        for (&(i, j), c) in &self.coeffs {
            for (k, &v) in self.chart.vars.iter().enumerate() {
                let dc = c.partial(v);
                if dc.is_zero() {
                    continue;
                }
                if let Some((s, mask)) = index::merge(1 << k, i) {
                    out.add_at(mask, j, &dc.scale_int(s));
                }
            }
        }
        out
    }

    /// `ℒ_X = i_X d + d i_X` on a pure form.
    pub fn lie(&self, x: &[RatFn]) -> Result<MixedTensor, GeometryError> {
        if self.q != 0 {
            return Err(GeometryError::NotAForm { q: self.q });
        }
        Ok(self.lie_formwise(x))
    }

    /// Lie derivative of the form factors with the frame held fixed.
    pub fn lie_formwise(&self, x: &[RatFn]) -> MixedTensor {
        let a = self.d_formwise().i_form(x);
        let b = self.i_form(x).d_formwise();
        if self.p == 0 {
            return a;
        }
        a.add(&b)
    }

    /// Pieces `β_J` with `self = Σ_J β_J ⊗ e_J`.
    pub fn split_multi(&self) -> BTreeMap<Mask, MixedTensor> {
        let mut out: BTreeMap<Mask, MixedTensor> = BTreeMap::new();
        for (&(i, j), c) in &self.coeffs {
            out.entry(j)
                .or_insert_with(|| MixedTensor::zero(&self.chart, self.rank, self.p, 0))
                .set(i, 0, c.clone());
        }
        out
    }

    /// `β ⊗ e_J` for a pure form `β`.
    pub fn form_times_frames(beta: &MixedTensor, j: Mask, q: usize) -> MixedTensor {
        assert_eq!(beta.q, 0);
        let mut out = MixedTensor::zero(&beta.chart, beta.rank, beta.p, q);
        for (&(i, _), c) in &beta.coeffs {
            out.set(i, j, c.clone());
        }
        out
    }

    /// Coefficients of a `(p, q) = (0, 1)` tensor.
    pub fn as_section(&self) -> Vec<RatFn> {
        assert_eq!((self.p, self.q), (0, 1), "not a section");
        (0..self.rank).map(|i| self.get(0, 1 << i)).collect()
    }

    /// Coefficients of a `(p, q) = (1, 0)` tensor.
    pub fn as_one_form(&self) -> Vec<RatFn> {
        assert_eq!((self.p, self.q), (1, 0), "not a one-form");
        (0..self.m()).map(|j| self.get(1 << j, 0)).collect()
    }

    pub fn as_scalar(&self) -> RatFn {
        assert_eq!((self.p, self.q), (0, 0), "not a function");
        self.get(0, 0)
    }

    /// `ω(X1, .., Xk)` for a pure `k`-form, or the form-side evaluation in general.
    pub fn eval_form(&self, args: &[Vec<RatFn>]) -> MixedTensor {
        args.iter().fold(self.clone(), |t, x| t.i_form(x))
    }

    /// Multivector evaluated on covectors of `A*`.
    pub fn eval_multi(&self, args: &[Vec<RatFn>]) -> MixedTensor {
        args.iter().fold(self.clone(), |t, x| t.i_multi(x))
    }

    /// Same coefficients viewed over a bundle of another rank (only valid
    /// when `q = 0`).
    pub fn with_rank(&self, rank: usize) -> MixedTensor {
        assert_eq!(self.q, 0, "rank change needs q = 0");
        MixedTensor { chart: self.chart.clone(), rank, p: self.p, q: 0, coeffs: self.coeffs.clone() }
    }

    pub fn fmt_with(&self, frame: &[String]) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        let names = self.chart.var_names();
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(&(i, j), c)| {
                let mut basis: Vec<String> = bits(i).map(|k| format!("d{}", names[k])).collect();
                let fr: Vec<String> = bits(j)
                    .map(|k| frame.get(k).cloned().unwrap_or_else(|| format!("e{}", k + 1)))
                    .collect();
                if !fr.is_empty() {
                    if basis.is_empty() {
                        basis.push(fr.join("^"));
                    } else {
                        basis = vec![format!("{} (x) {}", basis.join("^"), fr.join("^"))];
                    }
                }
                if basis.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c})*{}", basis.join("^"))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for MixedTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with(&[]))
    }
}

/// Sign of the sorting permutation and the resulting mask (sign 0 on repeats).
pub fn sort_sign(idx: &[usize]) -> (i64, Mask) {
    let mut sign = 1;
    let mut mask = 0;
    for (a, &i) in idx.iter().enumerate() {
        if mask & (1 << i) != 0 {
            return (0, 0);
        }
        mask |= 1 << i;
        for &j in &idx[a + 1..] {
            if j < i {
                sign = -sign;
            }
        }
    }
    (sign, mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::rf;

    fn plane() -> Arc<Chart> {
        Chart::new("R2", &["x", "y"])
    }

    #[test]
    fn dx_wedge_dy() {
        let c = plane();
        let w = MixedTensor::dx(&c, 0, 0).w(&MixedTensor::dx(&c, 0, 1));
        assert_eq!(w.get(0b11, 0), RatFn::one());
        assert!(MixedTensor::dx(&c, 0, 0).w(&MixedTensor::dx(&c, 0, 0)).is_zero());
    }

    #[test]
    fn frame_wedge_mixed_follows_left_module_rule() {
        let c = plane();
        let e1 = MixedTensor::frame(&c, 2, 0);
        let dx_e2 = MixedTensor::monomial(&c, 2, RatFn::one(), &[0], &[1]);
        let got = e1.w(&dx_e2);
        let want = MixedTensor::monomial(&c, 2, RatFn::one(), &[0], &[0, 1]);
        assert_eq!(got, want);
    }

    #[test]
    fn contractions() {
        let c = plane();
        let dxdy = MixedTensor::monomial(&c, 2, RatFn::one(), &[0, 1], &[]);
        assert_eq!(dxdy.contract_form(&c.coord_field(0)).unwrap(), MixedTensor::dx(&c, 2, 1));
        let e12 = MixedTensor::monomial(&c, 2, RatFn::one(), &[], &[0, 1]);
        let eps1 = vec![RatFn::one(), RatFn::zero()];
        assert_eq!(e12.contract_multi(&eps1).unwrap(), MixedTensor::frame(&c, 2, 1));
        let dx_e1 = MixedTensor::monomial(&c, 2, RatFn::one(), &[0], &[0]);
        assert!(dx_e1.contract_form(&c.coord_field(1)).unwrap().is_zero());
        assert!(MixedTensor::frame(&c, 2, 0).contract_form(&c.coord_field(0)).is_err());
    }

    #[test]
    fn exterior_derivative_examples() {
        let c = plane();
        let xdy = MixedTensor::monomial(&c, 0, rf("x"), &[1], &[]);
        assert_eq!(xdy.d().unwrap(), MixedTensor::monomial(&c, 0, RatFn::one(), &[0, 1], &[]));
        assert!(MixedTensor::dx(&c, 0, 0).d().unwrap().is_zero());
        assert!(MixedTensor::frame(&c, 1, 0).d().is_err());
    }

    #[test]
    fn lie_of_dx_along_euler_field() {
        let c = plane();
        let x_dx = vec![rf("x"), RatFn::zero()];
        assert_eq!(MixedTensor::dx(&c, 0, 0).lie(&x_dx).unwrap(), MixedTensor::dx(&c, 0, 0));
    }

    #[test]
    fn sort_sign_cases() {
        assert_eq!(sort_sign(&[1, 0]), (-1, 0b11));
        assert_eq!(sort_sign(&[2, 0, 1]), (1, 0b111));
        assert_eq!(sort_sign(&[1, 1]), (0, 0));
    }
}
