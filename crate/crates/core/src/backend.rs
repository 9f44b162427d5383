//! Thin wrapper around the dense symmetric eigensolver backend.

use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};

/// Full eigendecomposition of a symmetric matrix, eigenvalues ascending,
/// eigenvectors as the columns of an orthonormal matrix.
pub(crate) fn sym_eig(m: MatRef<'_, f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let n = m.nrows();
    if n == 0 {
        return Err(Error::EmptyOperator);
    }
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Backend(format!("{e:?}")))?;
    let s = evd.S();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        s.column_vector()[i]
            .partial_cmp(&s.column_vector()[j])
            .expect("eigenvalues of a real symmetric matrix are finite")
    });
    let vals: Vec<f64> = order.iter().map(|&i| s.column_vector()[i]).collect();
    let u = evd.U();
    let vecs = Mat::from_fn(n, n, |i, k| u[(i, order[k])]);
    Ok((vals, vecs))
}

/// Eigenvalues only, ascending.
pub(crate) fn sym_eigenvalues(m: MatRef<'_, f64>) -> Result<Vec<f64>> {
    let n = m.nrows();
    if n == 0 {
        return Err(Error::EmptyOperator);
    }
    let mut vals = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Backend(format!("{e:?}")))?;
    vals.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(vals)
}
