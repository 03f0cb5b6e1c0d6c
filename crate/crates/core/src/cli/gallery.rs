//! Built-in problem files. Each one passes its own task list.

/// `(name, summary, source)`.
pub const ENTRIES: [(&str, &str, &str); 11] = [
    ("tangent-plane", "TR2: anchor = id, zero bracket", include_str!("../../gallery/tangent_plane.alg")),
    ("so3star", "cotangent algebroid of so(3)* and its canonical IM (0,2)-tensor", include_str!("../../gallery/so3_canonical.alg")),
    ("coboundary", "coboundaries of assorted tensors are IM", include_str!("../../gallery/coboundary.alg")),
    ("qdiff-roundtrip", "IM (q,0)-tensors as q-differentials", include_str!("../../gallery/qdiff_roundtrip.alg")),
    ("cocycle-equivalence", "cocycle equation on the prolongation vs the IM equations", include_str!("../../gallery/cocycle_equivalence.alg")),
    ("linear-roundtrip", "linear tensors on the prolongation and their components", include_str!("../../gallery/linear_roundtrip.alg")),
    ("fn-jacobi", "Frolicher-Nijenhuis bracket identities", include_str!("../../gallery/fn_jacobi.alg")),
    ("nijenhuis-suite", "IM (1,1)-tensors and their Nijenhuis components", include_str!("../../gallery/nijenhuis_suite.alg")),
    ("pqn-suite", "Poisson quasi-Nijenhuis pairs and D^r identities", include_str!("../../gallery/pqn_suite.alg")),
    ("holomorphic-J", "constant complex structures", include_str!("../../gallery/holomorphic_j.alg")),
    ("projection-matched-pair", "flat projections and matched pairs", include_str!("../../gallery/projection_matched_pair.alg")),
];

pub fn source(name: &str) -> Option<&'static str> {
    ENTRIES.iter().find(|(n, _, _)| *n == name).map(|(_, _, s)| *s)
}

pub fn names() -> Vec<&'static str> {
    ENTRIES.iter().map(|(n, _, _)| *n).collect()
}

pub fn unknown(name: &str) -> String {
    format!("unknown gallery entry `{name}`; available: {}", names().join(", "))
}
