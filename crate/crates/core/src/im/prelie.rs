use crate::algebroid::Algebroid;
use crate::geometry::{index, Matrix};
use crate::kernel::RatFn;

use super::tensor::IMTensor;
use super::ImError;

/// Pre-Lie algebroid on `A*` from an IM `(2,0)`-tensor `(D, r)`.
///
/// On the dual frame `ε^i`: `ρ_*(ε^i) = Σ_j ⟨ε^i, r(dx_j)⟩ ∂_j` and
/// `⟨[ε^i, ε^j]_*, e_k⟩ = −D(e_k)(ε^i, ε^j)`. Jacobi is not guaranteed.
pub fn prelie_from_im20(t: &IMTensor) -> Result<Algebroid, ImError> {
    if (t.q, t.p) != (2, 0) {
        return Err(ImError::Degrees(format!("pre-Lie data needs (q,p) = (2,0), got ({},{})", t.q, t.p)));
    }
    let alg = &t.alg;
    let (n, m) = (alg.rank(), alg.m());
    let r = t.r_frame.as_ref().unwrap();
    let anchor = Matrix::from_rows(
        (0..n).map(|i| (0..m).map(|j| r[j].get(0, 1 << i)).collect::<Vec<RatFn>>()).collect(),
    );
    let names = alg.frame_names.iter().map(|f| format!("{f}*")).collect();
    let upper = |i: usize, j: usize| -> Vec<RatFn> {
        let mask = index::mask_of(&[i, j]);
        (0..n).map(|k| -t.d_frame[k].get(0, mask)).collect()
    };
    Algebroid::new(&format!("{}*", alg.name), &alg.chart, names, anchor, upper)
        .map_err(|e| ImError::Degrees(e.to_string()))
}
