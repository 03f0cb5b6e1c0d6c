//! Schouten bracket on `Γ(∧•A)` and the action of `Γ(A)` on mixed tensors.

use crate::geometry::index::{self, bits, Mask};
use crate::geometry::MixedTensor;
use crate::kernel::RatFn;

use super::structure::Algebroid;

fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

impl Algebroid {
    /// `e_J` as a multisection.
    pub fn frames(&self, j: Mask) -> MixedTensor {
        let mut t = self.zero_tensor(0, index::size(j));
        t.set(0, j, RatFn::one());
        t
    }

    /// `[e_I, e_J] = Σ (−1)^{i+j} [e_{I_i}, e_{J_j}] ∧ e_{I∖i} ∧ e_{J∖j}`.
    fn frame_schouten(&self, i_mask: Mask, j_mask: Mask) -> MixedTensor {
        let (k, l) = (index::size(i_mask), index::size(j_mask));
        let mut out = self.zero_tensor(0, (k + l).saturating_sub(1));
        if k == 0 || l == 0 {
            return out;
        }
        for (pi, a) in bits(i_mask).enumerate() {
            for (pj, b) in bits(j_mask).enumerate() {
                let c = self.c(a, b);
                if c.iter().all(RatFn::is_zero) {
                    continue;
                }
                let t = self
                    .section_tensor(c)
                    .w(&self.frames(i_mask & !(1 << a)))
                    .w(&self.frames(j_mask & !(1 << b)));
                out = out.add(&t.scale_int(sign((pi + pj) as i64)));
            }
        }
        out
    }

    /// Schouten bracket of multisections (`p = 0` tensors) of degrees `k`, `l`.
    pub fn schouten(&self, x: &MixedTensor, y: &MixedTensor) -> MixedTensor {
        assert!(x.p() == 0 && y.p() == 0, "schouten needs multisections");
        let (k, l) = (x.q() as i64, y.q() as i64);
        let deg = (k + l - 1).max(0) as usize;
        let mut out = self.zero_tensor(0, deg);
        if k + l == 0 {
            return out;
        }
        for (&(_, i), f) in x.entries() {
            for (&(_, j), g) in y.entries() {
                let fg = f * g;
                out = out.add(&self.frame_schouten(i, j).scale(&fg));
                if k >= 1 {
                    let dg = self.dual_anchor_df(g);
                    let t = self.frames(i).i_multi(&dg).w(&self.frames(j));
                    out = out.add(&t.scale(&f.scale_int(sign(k - 1))));
                }
                if l >= 1 {
                    let df = self.dual_anchor_df(f);
                    let t = self.frames(j).i_multi(&df).w(&self.frames(i));
                    let s = -sign((k - 1) * (l - 1) + (l - 1));
                    out = out.add(&t.scale(&g.scale_int(s)));
                }
            }
        }
        out
    }

    /// `a · Φ = Σ_J ℒ_{ρ(a)}β_J ⊗ e_J + β_J ∧ [a, e_J]` for `Φ = Σ_J β_J ⊗ e_J`.
    pub fn action(&self, a: &[RatFn], phi: &MixedTensor) -> MixedTensor {
        let ra = self.anchor_of(a);
        let at = self.section_tensor(a);
        let mut out = self.zero_tensor(phi.p(), phi.q());
        for (j, beta) in phi.split_multi() {
            let lie = beta.lie_formwise(&ra);
            out = out.add(&MixedTensor::form_times_frames(&lie, j, phi.q()));
            if phi.q() > 0 {
                out = out.add(&beta.w(&self.schouten(&at, &self.frames(j))));
            }
        }
        out
    }

    /// `(fa)·τ − f(a·τ) − df ∧ i_{ρ(a)}τ + a ∧ i_{ρ*df}τ`, identically zero.
    pub fn action_leibniz_defect(&self, f: &RatFn, a: &[RatFn], tau: &MixedTensor) -> MixedTensor {
        let fa: Vec<RatFn> = a.iter().map(|c| f * c).collect();
        let df = MixedTensor::one_form(&self.chart, self.rank(), &self.chart.gradient(f));
        let lhs = self.action(&fa, tau);
        let t1 = self.action(a, tau).scale(f);
        let mut out = lhs.sub(&t1);
        if tau.p() > 0 {
            out = out.sub(&df.w(&tau.i_form(&self.anchor_of(a))));
        }
        if tau.q() > 0 {
            out = out.add(&self.section_tensor(a).w(&tau.i_multi(&self.dual_anchor_df(f))));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Chart;
    use crate::kernel::rf;

    #[test]
    fn schouten_with_function_contracts() {
        let c = Chart::new("R2", &["x", "y"]);
        let t = Algebroid::tangent(&c);
        let pi = t.frames(0b11);
        let got = t.schouten(&pi, &t.scalar(rf("x")));
        assert_eq!(got, t.frame_tensor(1).neg());
    }

    #[test]
    fn action_examples() {
        let c = Chart::new("R2", &["x", "y"]);
        let t = Algebroid::tangent(&c);
        let dx_dx = MixedTensor::monomial(&c, 2, RatFn::one(), &[0], &[0]);
        assert!(t.action(&t.frame(0), &dx_dx).is_zero());
        let xdy_dy = MixedTensor::monomial(&c, 2, rf("x"), &[1], &[1]);
        let want = MixedTensor::monomial(&c, 2, RatFn::one(), &[1], &[1]);
        assert_eq!(t.action(&t.frame(0), &xdy_dy), want);
    }
}
