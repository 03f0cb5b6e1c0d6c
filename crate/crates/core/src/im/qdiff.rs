use std::sync::Arc;

use crate::algebroid::Algebroid;
use crate::geometry::index::bits;
use crate::geometry::MixedTensor;
use crate::kernel::RatFn;
use crate::report::Report;

use super::check::Probes;
use super::tensor::IMTensor;
use super::ImError;

fn sign(e: usize) -> i64 {
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Degree-`(q−1)` derivation of `Γ(∧•A)` given by `δ₀(x_j)` and `δ₁(e_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QDifferential {
    pub alg: Arc<Algebroid>,
    pub q: usize,
    pub delta0: Vec<MixedTensor>,
    pub delta1: Vec<MixedTensor>,
}

impl QDifferential {
    /// `δ₁ = D`, `δ₀ = (−1)^q r∘d`.
    pub fn from_im(t: &IMTensor) -> Result<Self, ImError> {
        if t.p != 0 {
            return Err(ImError::Degrees(format!("q-differentials need p = 0, got p = {}", t.p)));
        }
        if t.q == 0 {
            return Err(ImError::Degrees("q-differentials need q ≥ 1".to_string()));
        }
        let s = sign(t.q);
        let delta0 = t.r_frame.as_ref().unwrap().iter().map(|r| r.scale_int(s)).collect();
        Ok(QDifferential { alg: t.alg.clone(), q: t.q, delta0, delta1: t.d_frame.clone() })
    }

    pub fn to_im(&self) -> IMTensor {
        let s = sign(self.q);
        let r = self.delta0.iter().map(|d| d.scale_int(s)).collect();
        IMTensor::new(self.alg.clone(), self.q, 0, self.delta1.clone(), None, Some(r)).expect("shapes carried over")
    }

    /// `δ₀(f) = Σ ∂_j f δ₀(x_j)`.
    pub fn on_function(&self, f: &RatFn) -> MixedTensor {
        let mut out = self.alg.zero_tensor(0, self.q - 1);
        for (j, g) in self.alg.chart.gradient(f).iter().enumerate() {
            if !g.is_zero() {
                out = out.add(&self.delta0[j].scale(g));
            }
        }
        out
    }

    /// `δ(e_{j1}∧…∧e_{jk})` by the graded product rule.
    fn on_frames(&self, j: &[usize]) -> MixedTensor {
        let q = self.q;
        match j {
            [] => self.alg.zero_tensor(0, q - 1),
            [i] => self.delta1[*i].clone(),
            [i, rest @ ..] => {
                let mask = rest.iter().fold(0, |m, &r| m | (1 << r));
                let first = self.delta1[*i].w(&self.alg.frames(mask));
                let second = self.alg.frame_tensor(*i).w(&self.on_frames(rest)).scale_int(sign(q - 1));
                first.add(&second)
            }
        }
    }

    /// `δ` on a multisection of any degree.
    pub fn apply(&self, x: &MixedTensor) -> MixedTensor {
        assert_eq!(x.p(), 0, "δ acts on multisections");
        let k = x.q();
        let mut out = self.alg.zero_tensor(0, k + self.q - 1);
        for (&(_, j), c) in x.entries() {
            let idx: Vec<usize> = bits(j).collect();
            out = out.add(&self.on_function(c).w(&self.alg.frames(j)));
            out = out.add(&self.on_frames(&idx).scale(c));
        }
        out
    }

    /// The product rule and the bracket rule on functions and sections.
    pub fn check(&self, which: Probes) -> Report {
        let alg = &self.alg;
        let q = self.q;
        let mut rep = Report::new(format!("{q}-differential on {}", alg.name));
        let coords = alg.chart.var_names();
        let mut probes: Vec<(String, MixedTensor)> = Vec::new();
        for (j, x) in coords.iter().enumerate() {
            probes.push((x.clone(), alg.scalar(alg.chart.coord(j))));
        }
        for (i, e) in alg.frame_names.iter().enumerate() {
            probes.push((e.clone(), alg.frame_tensor(i)));
        }
        if which == Probes::Scaled {
            for (s, xs) in coords.iter().enumerate() {
                let f = alg.chart.coord(s);
                for (j, x) in coords.iter().enumerate() {
                    probes.push((format!("{xs}*{x}"), alg.scalar(&f * &alg.chart.coord(j))));
                }
                for (i, e) in alg.frame_names.iter().enumerate() {
                    probes.push((format!("{xs}*{e}"), alg.frame_tensor(i).scale(&f)));
                }
            }
        }
        for (l1, x1) in &probes {
            let k1 = x1.q();
            let d1 = self.apply(x1);
            for (l2, x2) in &probes {
                let d2 = self.apply(x2);
                let probe = format!("({l1}, {l2})");
                let lhs = self.apply(&x1.w(x2));
                let rhs = d1.w(x2).add(&x1.w(&d2).scale_int(sign(k1 * (q - 1))));
                rep.record("product", &probe, lhs.sub(&rhs));
                let lhs = self.apply(&alg.schouten(x1, x2));
                let s = sign((k1 + 1) * (q - 1));
                let rhs = alg.schouten(&d1, x2).add(&alg.schouten(x1, &d2).scale_int(s));
                // [f, g] has degree −1; δ of it is zero in any degree
                let r = if lhs.degrees() == rhs.degrees() { lhs.sub(&rhs) } else { rhs };
                rep.record("bracket", &probe, r);
            }
        }
        rep
    }
}
