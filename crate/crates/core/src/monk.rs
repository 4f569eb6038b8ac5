//! The operator layer: the transposition operators T_ij, quantum
//! multiplication by a generator σ_{s_k} as the Monk sum of T_ij, and the
//! twisted cyclic shift O. These act on classes directly and do not depend
//! on the product engine.

use crate::class::QHClass;
use crate::perm::Permutation;
use crate::qpoly::QMonomial;

/// T_ij: σ_w ↦ σ_{w s_ij} on a cover, q_{ij}·σ_{w s_ij} on a deep drop,
/// 0 otherwise, extended Z[q]-linearly.
///
/// The three-way branch is decided by the interval criteria; the inversion
/// counts are cross-checked inside the predicates in debug builds.
pub fn t_op(x: &QHClass, i: usize, j: usize) -> QHClass {
    let n = x.rank();
    assert!(1 <= i && i < j && j <= n, "need 1 <= i < j <= n");
    let mut out = QHClass::zero(n);
    for (w, poly) in x.iter() {
        if w.is_cover_up(i, j) {
            out.add_term(w.right_multiply_transposition(i, j), poly);
        } else if w.is_deep_drop(i, j) {
            let q = QMonomial::q_interval(n, i, j);
            out.add_term(w.right_multiply_transposition(i, j), &poly.scale_mono(&q));
        }
    }
    out
}

/// Quantum multiplication by σ_{s_k}: the sum of T_ij over i ≤ k < j.
pub fn monk_multiply(k: usize, x: &QHClass) -> QHClass {
    let n = x.rank();
    assert!(1 <= k && k < n, "generator index must satisfy 1 <= k < n");
    let mut out = QHClass::zero(n);
    for i in 1..=k {
        for j in k + 1..=n {
            out.add_assign(&t_op(x, i, j));
        }
    }
    out
}

/// The twisted cyclic shift O: σ_w ↦ q^{(w)}·σ_{o∘w} with
/// q^{(w)} = q_{rn}, r = w^{−1}(n). The cycle acts by shifting values.
pub fn twisted_shift(x: &QHClass) -> QHClass {
    let n = x.rank();
    let o = Permutation::cycle(n);
    let mut out = QHClass::zero(n);
    for (w, poly) in x.iter() {
        let r = w.inverse().apply(n);
        let q = QMonomial::q_interval(n, r, n);
        out.add_term(o.compose(w), &poly.scale_mono(&q));
    }
    out
}

/// The exact inverse of [`twisted_shift`]: σ_v ↦ q_{rn}^{−1}·σ_{o^{−1}∘v}
/// with r = v^{−1}(1). May introduce negative exponents transiently.
pub fn twisted_shift_inv(x: &QHClass) -> QHClass {
    let n = x.rank();
    let o_inv = Permutation::cycle(n).inverse();
    let mut out = QHClass::zero(n);
    for (v, poly) in x.iter() {
        let r = v.inverse().apply(1);
        let q = QMonomial::q_interval(n, r, n).inv();
        out.add_term(o_inv.compose(v), &poly.scale_mono(&q));
    }
    out
}
