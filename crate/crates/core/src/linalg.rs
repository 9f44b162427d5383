//! Small dense-vector helpers shared by the operator and spectral modules.
//!
//! Reductions are written as plain sequential loops on purpose: results must
//! not depend on thread count or summation regrouping.

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub(crate) fn scale(alpha: f64, x: &mut [f64]) {
    for xi in x.iter_mut() {
        *xi *= alpha;
    }
}

/// Orthogonalize `v` against the columns of `basis` (each of length `n`)
/// with two passes of modified Gram-Schmidt, then normalize. Returns the
/// final norm before normalization; a tiny value means `v` was (numerically)
/// inside the span.
pub(crate) fn orthonormalize_against(v: &mut [f64], basis: &[Vec<f64>]) -> f64 {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, v);
            axpy(-c, q, v);
        }
    }
    let nrm = norm(v);
    if nrm > 0.0 {
        scale(1.0 / nrm, v);
    }
    nrm
}
