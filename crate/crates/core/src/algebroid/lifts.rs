//! Coordinate lifts to the big base `(⊕ᵖTM) ⊕ (⊕ᵠA*)` and the three
//! Lie-derivative identities for `c_τ`.

use crate::geometry::cwl::{cwl_value, SlotVars};
use crate::geometry::{CoordField, MixedTensor};
use crate::kernel::{RatFn, Var};

use super::structure::Algebroid;

/// `Σ u_i ∂/∂t_i` on the block `t`.
pub fn vertical_lift(block: &[Var], u: &[RatFn]) -> CoordField {
    CoordField::from_pairs(block.iter().copied().zip(u.iter().cloned()))
}

/// `ℓ_ξ = Σ ξ_i t_i`, the fiberwise-linear function of `ξ` on the block `t`.
pub fn linear_function(block: &[Var], xi: &[RatFn]) -> RatFn {
    block.iter().zip(xi).map(|(&v, c)| c * &RatFn::var(v)).sum()
}

impl Algebroid {
    /// `Y^{T,p} = Σ Y_j ∂_{x_j} + Σ_slots Σ (∂_k Y_j) X_k ∂_{X_j}`.
    pub fn tangent_lift(&self, y: &[RatFn], tangent_blocks: &[Vec<Var>]) -> CoordField {
        let chart = &self.chart;
        let mut f = vertical_lift(&chart.vars, y);
        for block in tangent_blocks {
            for (j, yj) in y.iter().enumerate() {
                let c: RatFn = chart
                    .vars
                    .iter()
                    .enumerate()
                    .map(|(k, &v)| &yj.partial(v) * &RatFn::var(block[k]))
                    .sum();
                f.add_comp(block[j], &c);
            }
        }
        f
    }

    /// `H_{e_i}^q = Σ ρ_{ij} ∂_{x_j} + Σ_slots Σ c_{ik}^l φ_l ∂_{φ_k}`.
    pub fn hamiltonian_lift(&self, i: usize, dual_blocks: &[Vec<Var>]) -> CoordField {
        let mut f = vertical_lift(&self.chart.vars, &self.anchor.row(i));
        for block in dual_blocks {
            for k in 0..self.rank() {
                f.add_comp(block[k], &linear_function(block, self.c(i, k)));
            }
        }
        f
    }

    /// `(ρ(e_i)^{T,p}, H_{e_i}^q)` on the full big base.
    pub fn full_lift(&self, i: usize, slots: &SlotVars) -> CoordField {
        let t = self.tangent_lift(&self.anchor.row(i), &slots.tangent);
        let h = self.hamiltonian_lift(i, &slots.dual);
        // both carry the base part ρ(e_i); keep it once
        t.add(&h).sub(&vertical_lift(&self.chart.vars, &self.anchor.row(i)))
    }

    /// Residuals of the three Lie-derivative identities for `c_τ`: along the
    /// full lift of `e_i`, and along the vertical lifts of `y` (each tangent
    /// slot) and `mu` (each dual slot).
    pub fn cwl_lie_residuals(
        &self,
        tau: &MixedTensor,
        i: usize,
        y: &[RatFn],
        mu: &[RatFn],
    ) -> Vec<(String, RatFn)> {
        let (p, q) = tau.degrees();
        let slots = SlotVars::standard(self.m(), self.rank(), p, q);
        let c = cwl_value(tau, &slots);
        let mut out = Vec::new();
        let lhs = self.full_lift(i, &slots).apply(&c);
        let rhs = cwl_value(&self.action(&self.frame(i), tau), &slots);
        out.push((format!("action e{}", i + 1), &lhs - &rhs));
        for s in 0..p {
            let lhs = vertical_lift(&slots.tangent[s], y).apply(&c);
            let sub = slots.without_tangent(s);
            let rhs = cwl_value(&tau.i_form(y), &sub).scale_int(if s % 2 == 0 { 1 } else { -1 });
            out.push((format!("vertical slot {}", s + 1), &lhs - &rhs));
        }
        for s in 0..q {
            let lhs = vertical_lift(&slots.dual[s], mu).apply(&c);
            let sub = slots.without_dual(s);
            let rhs = cwl_value(&tau.i_multi(mu), &sub).scale_int(if s % 2 == 0 { 1 } else { -1 });
            out.push((format!("dual vertical slot {}", s + 1), &lhs - &rhs));
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
    fn tangent_lift_of_x_dy() {
        let c = Chart::new("R2", &["x", "y"]);
        let t = Algebroid::tangent(&c);
        let slots = SlotVars::standard(2, 2, 1, 0);
        let lift = t.tangent_lift(&[RatFn::zero(), rf("x")], &slots.tangent);
        let want = CoordField::from_pairs([(Var::new("y"), rf("x")), (Var::new("X1_2"), rf("X1_1"))]);
        assert_eq!(lift, want);
    }

    #[test]
    fn vertical_lift_of_constant_section() {
        let block = vec![Var::new("t1"), Var::new("t2")];
        let f = vertical_lift(&block, &[RatFn::one(), RatFn::zero()]);
        assert_eq!(f, CoordField::from_pairs([(block[0], RatFn::one())]));
    }
}
