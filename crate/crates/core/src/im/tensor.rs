use std::sync::Arc;

use crate::algebroid::Algebroid;
use crate::geometry::chart::same_chart;
use crate::geometry::MixedTensor;
use crate::kernel::RatFn;

use super::ImError;

/// Triple `(D, l, r)` of degrees `(q, p)` stored on frames.
///
/// `d_frame[i] = D(e_i) ∈ Γ(∧ᵖT*M⊗∧ᵠA)`, `l_frame[i] = l(e_i)` of degrees
/// `(p−1, q)` and `r_frame[j] = r(dx_j)` of degrees `(p, q−1)`. `l` is absent
/// when `p = 0` and `r` when `q = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct IMTensor {
    pub alg: Arc<Algebroid>,
    pub q: usize,
    pub p: usize,
    pub d_frame: Vec<MixedTensor>,
    pub l_frame: Option<Vec<MixedTensor>>,
    pub r_frame: Option<Vec<MixedTensor>>,
}

fn check_all(
    alg: &Algebroid,
    what: &str,
    ts: &[MixedTensor],
    count: usize,
    degrees: (usize, usize),
) -> Result<(), ImError> {
    if ts.len() != count {
        return Err(ImError::Count { what: what.to_string(), expected: count, got: ts.len() });
    }
    for t in ts {
        if !same_chart(t.chart(), &alg.chart) || t.rank() != alg.rank() {
            return Err(ImError::Mismatch(what.to_string()));
        }
        if t.degrees() != degrees {
            return Err(ImError::Shape { what: what.to_string(), expected: degrees, got: t.degrees() });
        }
    }
    Ok(())
}

impl IMTensor {
    pub fn new(
        alg: Arc<Algebroid>,
        q: usize,
        p: usize,
        d_frame: Vec<MixedTensor>,
        l_frame: Option<Vec<MixedTensor>>,
        r_frame: Option<Vec<MixedTensor>>,
    ) -> Result<Self, ImError> {
        let (n, m) = (alg.rank(), alg.m());
        check_all(&alg, "D", &d_frame, n, (p, q))?;
        match (&l_frame, p) {
            (None, 0) => {}
            (Some(l), p) if p > 0 => check_all(&alg, "l", l, n, (p - 1, q))?,
            _ => return Err(ImError::Degrees(format!("l must be present exactly when p > 0 (p = {p})"))),
        }
        match (&r_frame, q) {
            (None, 0) => {}
            (Some(r), q) if q > 0 => check_all(&alg, "r", r, m, (p, q - 1))?,
            _ => return Err(ImError::Degrees(format!("r must be present exactly when q > 0 (q = {q})"))),
        }
        Ok(IMTensor { alg, q, p, d_frame, l_frame, r_frame })
    }

    /// The zero triple of degrees `(q, p)`.
    pub fn zero(alg: &Arc<Algebroid>, q: usize, p: usize) -> Self {
        let (n, m) = (alg.rank(), alg.m());
        let d = vec![alg.zero_tensor(p, q); n];
        let l = (p > 0).then(|| vec![alg.zero_tensor(p - 1, q); n]);
        let r = (q > 0).then(|| vec![alg.zero_tensor(p, q - 1); m]);
        IMTensor { alg: alg.clone(), q, p, d_frame: d, l_frame: l, r_frame: r }
    }

    /// `D = d`, `l = id` on a cotangent algebroid (frame `dx_i`), an IM
    /// `(0,2)`-tensor when the bracket comes from a Poisson bivector.
    pub fn canonical_cotangent(alg: &Arc<Algebroid>) -> Result<Self, ImError> {
        let (n, m) = (alg.rank(), alg.m());
        if n != m {
            return Err(ImError::Count { what: "cotangent frame".to_string(), expected: m, got: n });
        }
        let d = vec![alg.zero_tensor(2, 0); n];
        let l = (0..n).map(|i| alg.dx(i)).collect();
        IMTensor::new(alg.clone(), 0, 2, d, Some(l), None)
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.q, self.p)
    }

    /// `l(a) = Σ a_i l(e_i)`.
    pub fn l_of(&self, a: &[RatFn]) -> Option<MixedTensor> {
        let l = self.l_frame.as_ref()?;
        Some(combine(&self.alg.zero_tensor(self.p - 1, self.q), l, a))
    }

    /// `r(α) = Σ α_j r(dx_j)`.
    pub fn r_of(&self, alpha: &[RatFn]) -> Option<MixedTensor> {
        let r = self.r_frame.as_ref()?;
        Some(combine(&self.alg.zero_tensor(self.p, self.q - 1), r, alpha))
    }

    /// `D(Σ a_i e_i) = Σ a_i D(e_i) + Σ da_i ∧ l(e_i) − Σ e_i ∧ r(da_i)`.
    pub fn d_of(&self, a: &[RatFn]) -> MixedTensor {
        let alg = &self.alg;
        let mut out = combine(&alg.zero_tensor(self.p, self.q), &self.d_frame, a);
        for (i, ai) in a.iter().enumerate() {
            let grad = alg.chart.gradient(ai);
            if grad.iter().all(RatFn::is_zero) {
                continue;
            }
            if let Some(l) = &self.l_frame {
                let da = MixedTensor::one_form(&alg.chart, alg.rank(), &grad);
                out = out.add(&da.w(&l[i]));
            }
            if let Some(r) = self.r_of(&grad) {
                out = out.sub(&alg.frame_tensor(i).w(&r));
            }
        }
        out
    }

    pub fn add(&self, o: &IMTensor) -> IMTensor {
        let zip = |a: &[MixedTensor], b: &[MixedTensor]| a.iter().zip(b).map(|(x, y)| x.add(y)).collect::<Vec<_>>();
        IMTensor {
            alg: self.alg.clone(),
            q: self.q,
            p: self.p,
            d_frame: zip(&self.d_frame, &o.d_frame),
            l_frame: self.l_frame.as_ref().map(|l| zip(l, o.l_frame.as_ref().unwrap())),
            r_frame: self.r_frame.as_ref().map(|r| zip(r, o.r_frame.as_ref().unwrap())),
        }
    }

    pub fn scale(&self, f: &RatFn) -> IMTensor {
        let sc = |v: &[MixedTensor]| v.iter().map(|t| t.scale(f)).collect::<Vec<_>>();
        IMTensor {
            alg: self.alg.clone(),
            q: self.q,
            p: self.p,
            d_frame: sc(&self.d_frame),
            l_frame: self.l_frame.as_deref().map(sc),
            r_frame: self.r_frame.as_deref().map(sc),
        }
    }
}

fn combine(zero: &MixedTensor, vals: &[MixedTensor], coeffs: &[RatFn]) -> MixedTensor {
    let mut out = zero.clone();
    for (c, t) in coeffs.iter().zip(vals) {
        if !c.is_zero() {
            out = out.add(&t.scale(c));
        }
    }
    out
}

/// `(D, l, r) = (a ↦ a·Φ, a ↦ i_{ρ(a)}Φ, α ↦ i_{ρ*α}Φ)` recorded on frames.
pub fn coboundary(alg: &Arc<Algebroid>, phi: &MixedTensor) -> Result<IMTensor, ImError> {
    if !same_chart(phi.chart(), &alg.chart) || phi.rank() != alg.rank() {
        return Err(ImError::Mismatch("Φ".to_string()));
    }
    let (p, q) = phi.degrees();
    let (n, m) = (alg.rank(), alg.m());
    let d = (0..n).map(|i| alg.action(&alg.frame(i), phi)).collect();
    let l = (p > 0).then(|| (0..n).map(|i| phi.i_form(&alg.anchor.row(i))).collect());
    let r = (q > 0).then(|| {
        (0..m)
            .map(|j| {
                let dx = crate::geometry::vecops::unit(m, j);
                phi.i_multi(&alg.dual_anchor(&dx))
            })
            .collect()
    });
    IMTensor::new(alg.clone(), q, p, d, l, r)
}
