use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::algebroid::Algebroid;
use crate::geometry::cwl::{cwl_value, tensor_from_value, SlotVars};
use crate::geometry::Chart;
use crate::im::IMTensor;
use crate::kernel::{Poly, RatFn, Var};
use crate::report::{Report, Value};

use super::ProlongationError;

/// Coordinates of `𝔼 = (⊕ᵖTE) ⊕ (⊕ᵠT*E)` for a rank-`n` bundle `E`:
/// `(x, t)` on `E`, `(ẋ⁽ⁱ⁾, u̇⁽ⁱ⁾)` in tangent slot `i`, `(p_x⁽ʲ⁾, p_u⁽ʲ⁾)` in
/// cotangent slot `j`. Printed as `t{k}`, `xd{i}_{k}`, `ud{i}_{k}`,
/// `px{j}_{s}`, `pu{j}_{k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearBase {
    pub chart: Arc<Chart>,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub t: Vec<Var>,
    pub xd: Vec<Vec<Var>>,
    pub ud: Vec<Vec<Var>>,
    pub px: Vec<Vec<Var>>,
    pub pu: Vec<Vec<Var>>,
}

fn block(prefix: &str, slot: usize, len: usize) -> Vec<Var> {
    (1..=len).map(|k| Var::new(&format!("{prefix}{}_{k}", slot + 1))).collect()
}

impl LinearBase {
    pub fn new(chart: &Arc<Chart>, n: usize, p: usize, q: usize) -> Self {
        let m = chart.dim();
        LinearBase {
            chart: chart.clone(),
            n,
            p,
            q,
            t: (1..=n).map(|k| Var::new(&format!("t{k}"))).collect(),
            xd: (0..p).map(|i| block("xd", i, m)).collect(),
            ud: (0..p).map(|i| block("ud", i, n)).collect(),
            px: (0..q).map(|j| block("px", j, m)).collect(),
            pu: (0..q).map(|j| block("pu", j, n)).collect(),
        }
    }

    /// `ẋ`-blocks as tangent slots and `p_u`-blocks as dual slots.
    fn base_slots(&self) -> SlotVars {
        SlotVars { tangent: self.xd.clone(), dual: self.pu.clone() }
    }

    fn tangent_block(&self, i: usize) -> Vec<Var> {
        self.xd[i].iter().chain(&self.ud[i]).copied().collect()
    }

    fn dual_block(&self, j: usize) -> Vec<Var> {
        self.px[j].iter().chain(&self.pu[j]).copied().collect()
    }

    fn slot_blocks(&self) -> Vec<(String, Vec<Var>)> {
        let mut out: Vec<(String, Vec<Var>)> =
            (0..self.p).map(|i| (format!("tangent slot {}", i + 1), self.tangent_block(i))).collect();
        out.extend((0..self.q).map(|j| (format!("cotangent slot {}", j + 1), self.dual_block(j))));
        out
    }

    /// Fiber coordinates of `𝔼 → 𝕄`: `t`, every `u̇` and every `p_x`.
    fn vb_fiber(&self) -> Vec<Var> {
        let mut v = self.t.clone();
        v.extend(self.ud.iter().flatten());
        v.extend(self.px.iter().flatten());
        v
    }
}

/// A componentwise-linear function on `𝔼` that is also linear along `𝔼 → 𝕄`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearTensor {
    pub base: LinearBase,
    pub value: RatFn,
}

fn sign(i: usize) -> i64 {
    if i % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `c_τ = Σ t_k c_{D(e_k)} + Σ (−1)^{i−1} u̇⁽ⁱ⁾_k c_{l(e_k)} + Σ (−1)^{j−1} p⁽ʲ⁾_{x,s} c_{r(dx_s)}`,
/// with `ẋ` and `p_u` filling the remaining slots (constant-section extension).
pub fn reconstruct_linear(t: &IMTensor) -> LinearTensor {
    let base = LinearBase::new(&t.alg.chart, t.alg.rank(), t.p, t.q);
    let slots = base.base_slots();
    let mut c = RatFn::zero();
    for (k, d) in t.d_frame.iter().enumerate() {
        c = &c + &(&RatFn::var(base.t[k]) * &cwl_value(d, &slots));
    }
    if let Some(l) = &t.l_frame {
        for i in 0..t.p {
            let sub = slots.without_tangent(i);
            for (k, lk) in l.iter().enumerate() {
                let term = &RatFn::var(base.ud[i][k]) * &cwl_value(lk, &sub);
                c = &c + &term.scale_int(sign(i));
            }
        }
    }
    if let Some(r) = &t.r_frame {
        for j in 0..t.q {
            let sub = slots.without_dual(j);
            for (s, rs) in r.iter().enumerate() {
                let term = &RatFn::var(base.px[j][s]) * &cwl_value(rs, &sub);
                c = &c + &term.scale_int(sign(j));
            }
        }
    }
    LinearTensor { base, value: c }
}

fn zero_map(vars: impl IntoIterator<Item = Var>, map: &mut HashMap<Var, Poly>) {
    for v in vars {
        map.insert(v, Poly::zero());
    }
}

fn rename_into(from: &[Var], to: &[Var], map: &mut HashMap<Var, Poly>) {
    for (&a, &b) in from.iter().zip(to) {
        map.insert(a, Poly::var(b));
    }
}

/// Reads `(D, l, r)` off a linear tensor by pointwise evaluation:
/// `D(e_k)` on `(Tᵖe_k, R^q_{e_k})`, `l(e_k)` with the bar vector `ē_k` in the
/// first tangent slot, `r(dx_s)` with the bar covector `dx_s` in the first
/// cotangent slot, all over the zero section for `l` and `r`.
pub fn extract_components(tau: &LinearTensor, alg: &Arc<Algebroid>) -> Result<IMTensor, ProlongationError> {
    let b = &tau.base;
    if alg.rank() != b.n || *alg.chart != *b.chart {
        return Err(ProlongationError::Mismatch);
    }
    tau.validate()?;
    let (m, n, p, q) = (b.chart.dim(), b.n, b.p, b.q);
    let std = SlotVars::standard(m, n, p, q);
    let read = |map: &HashMap<Var, Poly>, slots: &SlotVars| {
        tensor_from_value(&b.chart, n, &tau.value.subst(map), slots)
            .map_err(|e| ProlongationError::NotLinear(e.to_string()))
    };
    let mut d = Vec::new();
    for k in 0..n {
        let mut map = HashMap::new();
        for (j, &v) in b.t.iter().enumerate() {
            map.insert(v, if j == k { Poly::one() } else { Poly::zero() });
        }
        zero_map(b.ud.iter().flatten().copied(), &mut map);
        zero_map(b.px.iter().flatten().copied(), &mut map);
        for i in 0..p {
            rename_into(&b.xd[i], &std.tangent[i], &mut map);
        }
        for j in 0..q {
            rename_into(&b.pu[j], &std.dual[j], &mut map);
        }
        d.push(read(&map, &std)?);
    }
    let l = if p > 0 {
        let sub = SlotVars::standard(m, n, p - 1, q);
        let mut out = Vec::new();
        for k in 0..n {
            let mut map = HashMap::new();
            zero_map(b.t.iter().copied(), &mut map);
            zero_map(b.xd[0].iter().copied(), &mut map);
            for (j, &v) in b.ud[0].iter().enumerate() {
                map.insert(v, if j == k { Poly::one() } else { Poly::zero() });
            }
            for i in 1..p {
                rename_into(&b.xd[i], &sub.tangent[i - 1], &mut map);
                zero_map(b.ud[i].iter().copied(), &mut map);
            }
            zero_map(b.px.iter().flatten().copied(), &mut map);
            for j in 0..q {
                rename_into(&b.pu[j], &sub.dual[j], &mut map);
            }
            out.push(read(&map, &sub)?);
        }
        Some(out)
    } else {
        None
    };
    let r = if q > 0 {
        let sub = SlotVars::standard(m, n, p, q - 1);
        let mut out = Vec::new();
        for s in 0..m {
            let mut map = HashMap::new();
            zero_map(b.t.iter().copied(), &mut map);
            zero_map(b.ud.iter().flatten().copied(), &mut map);
            for i in 0..p {
                rename_into(&b.xd[i], &sub.tangent[i], &mut map);
            }
            for (j, &v) in b.px[0].iter().enumerate() {
                map.insert(v, if j == s { Poly::one() } else { Poly::zero() });
            }
            zero_map(b.pu[0].iter().copied(), &mut map);
            for j in 1..q {
                zero_map(b.px[j].iter().copied(), &mut map);
                rename_into(&b.pu[j], &sub.dual[j - 1], &mut map);
            }
            out.push(read(&map, &sub)?);
        }
        Some(out)
    } else {
        None
    };
    IMTensor::new(alg.clone(), q, p, d, l, r).map_err(|e| ProlongationError::NotLinear(e.to_string()))
}

/// `F(λ·v)` for `v` in `vars`, as a polynomial in a formal `λ`.
fn scaled(f: &RatFn, vars: &[Var], lambda: Var) -> RatFn {
    let map: HashMap<Var, Poly> = vars.iter().map(|&v| (v, &Poly::var(lambda) * &Poly::var(v))).collect();
    f.subst(&map)
}

fn lambda_degrees(f: &RatFn, lambda: Var) -> BTreeSet<u32> {
    f.num().degree_in(|v| v == lambda).into_iter().collect()
}

impl LinearTensor {
    fn lambda() -> Var {
        Var::new("lambda")
    }

    /// `F∘h_λ = λ^{p+q}F` with `λ` scaling every slot block, and `F∘0_i = 0`
    /// for each slot.
    pub fn homogeneity_check(&self) -> Report {
        let b = &self.base;
        let mut rep = Report::new("homogeneity");
        let lam = LinearTensor::lambda();
        let all: Vec<Var> = b.slot_blocks().into_iter().flat_map(|(_, v)| v).collect();
        let lhs = scaled(&self.value, &all, lam);
        let expect = (b.p + b.q) as u32;
        let diff = &lhs - &(&RatFn::var(lam).pow(expect) * &self.value);
        if diff.is_zero() {
            rep.record("homogeneity", "h_λ", diff);
        } else {
            let degs: Vec<String> = lambda_degrees(&lhs, lam).iter().map(|d| d.to_string()).collect();
            let note = format!("λ-degrees {{{}}}, expected {expect}", degs.join(", "));
            rep.record("homogeneity", "h_λ", Value::Note(note));
        }
        for (name, vars) in b.slot_blocks() {
            let map: HashMap<Var, Poly> = vars.iter().map(|&v| (v, Poly::zero())).collect();
            rep.record("zero-insertion", name, self.value.subst(&map));
        }
        rep
    }

    /// Degree one jointly in `(t, u̇, p_x)`: linearity along `𝔼 → 𝕄`.
    pub fn vb_linearity_check(&self) -> Report {
        let mut rep = Report::new("linearity along the prolongation fibers");
        let lam = LinearTensor::lambda();
        let lhs = scaled(&self.value, &self.base.vb_fiber(), lam);
        let diff = &lhs - &(&RatFn::var(lam) * &self.value);
        if diff.is_zero() {
            rep.record("vb-linear", "(t, ud, px)", diff);
        } else {
            let degs: Vec<String> = lambda_degrees(&lhs, lam).iter().map(|d| d.to_string()).collect();
            rep.record("vb-linear", "(t, ud, px)", Value::Note(format!("λ-degrees {{{}}}, expected 1", degs.join(", "))));
        }
        rep
    }

    /// Skew under swapping adjacent tangent slots and adjacent cotangent slots.
    pub fn skew_check(&self) -> Report {
        let b = &self.base;
        let mut rep = Report::new("slot skew-symmetry");
        let swap = |x: &[Var], y: &[Var]| -> HashMap<Var, Var> {
            x.iter().zip(y).flat_map(|(&a, &c)| [(a, c), (c, a)]).collect()
        };
        for i in 1..b.p {
            let map = swap(&b.tangent_block(i - 1), &b.tangent_block(i));
            rep.record("skew", format!("tangent slots {i},{}", i + 1), &self.value + &self.value.rename(&map));
        }
        for j in 1..b.q {
            let map = swap(&b.dual_block(j - 1), &b.dual_block(j));
            rep.record("skew", format!("cotangent slots {j},{}", j + 1), &self.value + &self.value.rename(&map));
        }
        rep
    }

    /// All invariants: homogeneity, zero insertion, linearity along the
    /// fibers over `𝕄`, skew-symmetry.
    pub fn invariants(&self) -> Report {
        let mut rep = Report::new("linear tensor invariants");
        rep.absorb("", self.homogeneity_check());
        rep.absorb("", self.vb_linearity_check());
        rep.absorb("", self.skew_check());
        rep
    }

    pub fn validate(&self) -> Result<(), ProlongationError> {
        let rep = self.invariants();
        match rep.residuals.first() {
            None => Ok(()),
            Some(r) => Err(ProlongationError::NotLinear(format!("{} at {}: {}", r.check, r.probe, r.value))),
        }
    }

    /// Two or more bar insertions (`ẋ = 0` in a tangent slot, `p_u = 0` in a
    /// cotangent slot) give zero.
    pub fn two_bar_check(&self) -> Report {
        let b = &self.base;
        let mut rep = Report::new("two-bar vanishing");
        let mut bars: Vec<(String, Vec<Var>)> =
            (0..b.p).map(|i| (format!("bar vector in slot {}", i + 1), b.xd[i].clone())).collect();
        bars.extend((0..b.q).map(|j| (format!("bar covector in slot {}", j + 1), b.pu[j].clone())));
        for a in 0..bars.len() {
            for c in a + 1..bars.len() {
                let map: HashMap<Var, Poly> =
                    bars[a].1.iter().chain(&bars[c].1).map(|&v| (v, Poly::zero())).collect();
                rep.record("two-bar", format!("{}, {}", bars[a].0, bars[c].0), self.value.subst(&map));
            }
        }
        rep
    }
}
