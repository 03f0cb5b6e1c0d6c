//! Componentwise-linear functions on `(⊕ᵖTM) ⊕ (⊕ᵠA*)` and their bijection
//! with skew tensors.

use std::collections::HashMap;
use std::sync::Arc;

use crate::kernel::{q, Monomial, Poly, RatFn, Var};

use super::chart::Chart;
use super::index::{self, bits, Mask};
use super::tensor::MixedTensor;
use super::GeometryError;

/// `X{i}_{k}`: component `k` of tangent slot `i` (both 0-based here, printed 1-based).
pub fn tangent_var(i: usize, k: usize) -> Var {
    Var::new(&format!("X{}_{}", i + 1, k + 1))
}

/// `ph{j}_{k}`: component `k` of dual slot `j`.
pub fn dual_var(j: usize, k: usize) -> Var {
    Var::new(&format!("ph{}_{}", j + 1, k + 1))
}

/// Variable blocks for the slots of a componentwise-linear function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotVars {
    pub tangent: Vec<Vec<Var>>,
    pub dual: Vec<Vec<Var>>,
}

impl SlotVars {
    pub fn standard(m: usize, n: usize, p: usize, q: usize) -> Self {
        SlotVars {
            tangent: (0..p).map(|i| (0..m).map(|k| tangent_var(i, k)).collect()).collect(),
            dual: (0..q).map(|j| (0..n).map(|k| dual_var(j, k)).collect()).collect(),
        }
    }

    pub fn all(&self) -> Vec<Var> {
        self.tangent.iter().chain(&self.dual).flatten().copied().collect()
    }

    pub fn without_tangent(&self, i: usize) -> SlotVars {
        let mut s = self.clone();
        s.tangent.remove(i);
        s
    }

    pub fn without_dual(&self, j: usize) -> SlotVars {
        let mut s = self.clone();
        s.dual.remove(j);
        s
    }
}

fn det_poly(blocks: &[Vec<Var>], mask: Mask) -> Poly {
    let idx: Vec<usize> = bits(mask).collect();
    let mut out = Poly::zero();
    for (sign, perm) in index::permutations(idx.len()) {
        let exps = perm.iter().enumerate().map(|(a, &b)| (blocks[a][idx[b]], 1)).collect();
        out.add_term(Monomial::from_exps(exps), q(sign));
    }
    out
}

/// `c_τ = Σ τ_{IJ} det[X^(a)_{I_b}] det[φ^(a)_{J_b}]` in the given slot variables.
pub fn cwl_value(t: &MixedTensor, slots: &SlotVars) -> RatFn {
    assert_eq!(slots.tangent.len(), t.p(), "tangent slot count");
    assert_eq!(slots.dual.len(), t.q(), "dual slot count");
    let mut dets_i: HashMap<Mask, Poly> = HashMap::new();
    let mut dets_j: HashMap<Mask, Poly> = HashMap::new();
    let mut acc = RatFn::zero();
    for (&(i, j), c) in t.entries() {
        let a = dets_i.entry(i).or_insert_with(|| det_poly(&slots.tangent, i)).clone();
        let b = dets_j.entry(j).or_insert_with(|| det_poly(&slots.dual, j));
        acc = &acc + &(c * &RatFn::poly(&a * b));
    }
    acc
}

/// A function on the big base, linear in every slot block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CwlFunction {
    pub chart: Arc<Chart>,
    pub rank: usize,
    pub p: usize,
    pub q: usize,
    pub value: RatFn,
}

impl CwlFunction {
    pub fn slots(&self) -> SlotVars {
        SlotVars::standard(self.chart.dim(), self.rank, self.p, self.q)
    }
}

pub fn to_cwl(t: &MixedTensor) -> CwlFunction {
    let slots = SlotVars::standard(t.m(), t.rank(), t.p(), t.q());
    CwlFunction { chart: t.chart().clone(), rank: t.rank(), p: t.p(), q: t.q(), value: cwl_value(t, &slots) }
}

/// Inverse of [`cwl_value`] for the given slot variables; rejects nonlinear or
/// non-skew input with a witness monomial.
pub fn tensor_from_value(
    chart: &Arc<Chart>,
    rank: usize,
    value: &RatFn,
    slots: &SlotVars,
) -> Result<MixedTensor, GeometryError> {
    let (p, q) = (slots.tangent.len(), slots.dual.len());
    let slot_vars = slots.all();
    let is_slot = |v: Var| slot_vars.contains(&v);
    if value.den().contains_any(is_slot) {
        return Err(GeometryError::NotLinear { witness: format!("denominator {}", value.den()) });
    }
    for (mono, _) in value.num().terms() {
        let blocks = slots.tangent.iter().chain(&slots.dual);
        for block in blocks {
            let d: u32 = block.iter().map(|&v| mono.exponent(v)).sum();
            if d != 1 {
                return Err(GeometryError::NotLinear { witness: mono.to_string() });
            }
        }
    }
    let groups = value.num().split_by(is_slot);
    let den = RatFn::poly(value.den().clone());
    let mut t = MixedTensor::zero(chart, rank, p, q);
    for i in index::subsets(chart.dim(), p) {
        for j in index::subsets(rank, q) {
            let mut exps: Vec<(Var, u32)> = bits(i).enumerate().map(|(a, k)| (slots.tangent[a][k], 1)).collect();
            exps.extend(bits(j).enumerate().map(|(a, k)| (slots.dual[a][k], 1)));
            if let Some(c) = groups.get(&Monomial::from_exps(exps)) {
                t.set(i, j, &RatFn::poly(c.clone()) / &den);
            }
        }
    }
    let diff = value - &cwl_value(&t, slots);
    if let Some((m, _)) = diff.num().leading() {
        return Err(GeometryError::NotSkew { witness: m.to_string() });
    }
    Ok(t)
}

pub fn from_cwl(f: &CwlFunction) -> Result<MixedTensor, GeometryError> {
    tensor_from_value(&f.chart, f.rank, &f.value, &f.slots())
}

/// `(1/(p!q!)) Σ sgn(σ)sgn(π) F∘(σ,π)` over permutations of each slot family.
pub fn skew_project(f: &CwlFunction) -> CwlFunction {
    let slots = f.slots();
    let tp = index::permutations(f.p);
    let dp = index::permutations(f.q);
    let mut acc = RatFn::zero();
    for (s1, sigma) in &tp {
        for (s2, pi) in &dp {
            let mut map = HashMap::new();
            for (a, &b) in sigma.iter().enumerate() {
                for (k, &v) in slots.tangent[a].iter().enumerate() {
                    map.insert(v, slots.tangent[b][k]);
                }
            }
            for (a, &b) in pi.iter().enumerate() {
                for (k, &v) in slots.dual[a].iter().enumerate() {
                    map.insert(v, slots.dual[b][k]);
                }
            }
            acc = &acc + &f.value.rename(&map).scale_int(s1 * s2);
        }
    }
    let norm = (tp.len() * dp.len()) as i64;
    CwlFunction { value: acc.scale(&crate::kernel::qr(1, norm)), ..f.clone() }
}
