use std::sync::Arc;

use crate::algebroid::Algebroid;
use crate::geometry::MixedTensor;
use crate::kernel::RatFn;
use crate::report::Report;

use super::check::{section_probes, Probes};
use super::tensor::IMTensor;
use super::ImError;

/// IM `p`-form `(μ, ν)`: `μ(e_i) ∈ Ω^{p−1}`, `ν(e_i) ∈ Ωᵖ`.
#[derive(Clone, Debug, PartialEq)]
pub struct IMForm {
    pub alg: Arc<Algebroid>,
    pub p: usize,
    pub mu: Vec<MixedTensor>,
    pub nu: Vec<MixedTensor>,
}

fn combine(zero: MixedTensor, vals: &[MixedTensor], a: &[RatFn]) -> MixedTensor {
    a.iter().zip(vals).filter(|(c, _)| !c.is_zero()).fold(zero, |acc, (c, t)| acc.add(&t.scale(c)))
}

impl IMForm {
    /// `μ = l`, `ν = D − dμ`.
    pub fn from_im(t: &IMTensor) -> Result<Self, ImError> {
        if t.q != 0 {
            return Err(ImError::Degrees(format!("IM forms need q = 0, got q = {}", t.q)));
        }
        if t.p == 0 {
            return Err(ImError::Degrees("IM forms need p ≥ 1".to_string()));
        }
        let mu = t.l_frame.clone().unwrap();
        let nu = t.d_frame.iter().zip(&mu).map(|(d, m)| d.sub(&m.d_formwise())).collect();
        Ok(IMForm { alg: t.alg.clone(), p: t.p, mu, nu })
    }

    /// `D = dμ + ν`, `l = μ`.
    pub fn to_im(&self) -> IMTensor {
        let d = self.mu.iter().zip(&self.nu).map(|(m, n)| m.d_formwise().add(n)).collect();
        IMTensor::new(self.alg.clone(), 0, self.p, d, Some(self.mu.clone()), None).expect("shapes carried over")
    }

    pub fn mu_of(&self, a: &[RatFn]) -> MixedTensor {
        combine(self.alg.zero_tensor(self.p - 1, 0), &self.mu, a)
    }

    pub fn nu_of(&self, a: &[RatFn]) -> MixedTensor {
        combine(self.alg.zero_tensor(self.p, 0), &self.nu, a)
    }

    /// `(μ, ν) ↦ (ν, 0)`.
    pub fn differential(&self) -> IMForm {
        let zero = vec![self.alg.zero_tensor(self.p + 1, 0); self.alg.rank()];
        IMForm { alg: self.alg.clone(), p: self.p + 1, mu: self.nu.clone(), nu: zero }
    }

    pub fn is_zero(&self) -> bool {
        self.mu.iter().chain(&self.nu).all(MixedTensor::is_zero)
    }

    /// The three defining equations of an IM form.
    pub fn check(&self, which: Probes) -> Report {
        let alg = &self.alg;
        let mut rep = Report::new(format!("IM {}-form on {}", self.p, alg.name));
        let secs = section_probes(&alg.frame_names, &alg.chart.var_names(), which);
        for a in &secs {
            let ra = alg.anchor_of(&a.value);
            let (mu_a, nu_a) = (self.mu_of(&a.value), self.nu_of(&a.value));
            for b in &secs {
                let rb = alg.anchor_of(&b.value);
                let ab = alg.bracket(&a.value, &b.value);
                let probe = format!("a={}, b={}", a.label, b.label);
                let nu_b = self.nu_of(&b.value);
                let r = self.nu_of(&ab).sub(&nu_b.lie_formwise(&ra)).add(&nu_a.d_formwise().i_form(&rb));
                rep.record("nu-bracket", &probe, r);
                let mu_b = self.mu_of(&b.value);
                let r = self
                    .mu_of(&ab)
                    .sub(&mu_b.lie_formwise(&ra))
                    .add(&mu_a.d_formwise().add(&nu_a).i_form(&rb));
                rep.record("mu-bracket", &probe, r);
                if self.p >= 2 {
                    rep.record("mu-skew", &probe, mu_b.i_form(&ra).add(&mu_a.i_form(&rb)));
                }
            }
        }
        rep
    }
}
