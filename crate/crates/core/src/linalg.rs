//! Dense Hermitian eigensolver and SVD contract.
//!
//! Every routine returns real eigenvalues sorted ascending and is
//! deterministic for a fixed input: the backend runs sequentially, so
//! results do not depend on how many worker threads the caller uses.

use faer::{Mat, MatRef, Par, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

fn sequential() {
    // Parallelism lives at the ensemble level; the backend must not fan out.
    faer::set_global_parallelism(Par::Seq);
}

/// Largest absolute deviation from symmetry, `max |m_ij - m_ji|`.
pub fn symmetry_defect(m: MatRef<'_, f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in (j + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Largest absolute deviation from hermiticity, `max |m_ij - conj(m_ji)|`.
pub fn hermiticity_defect(m: MatRef<'_, Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in j..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn check_square(rows: usize, cols: usize) -> Result<()> {
    if rows != cols {
        return Err(Error::Dimension(format!(
            "eigensolver needs a square matrix, got {rows}x{cols}"
        )));
    }
    Ok(())
}

fn evd_failure(n: usize, what: &str, err: impl std::fmt::Debug) -> Error {
    Error::Numerical(format!("{what} eigensolver failed on {n}x{n} matrix: {err:?}"))
}

/// Eigenvalues of a real symmetric matrix, ascending. Only the lower triangle is read.
pub fn symmetric_eigenvalues(m: MatRef<'_, f64>) -> Result<Vec<f64>> {
    check_square(m.nrows(), m.ncols())?;
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    sequential();
    let mut vals = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| evd_failure(m.nrows(), "symmetric", e))?;
    sort_ascending(&mut vals);
    Ok(vals)
}

/// Eigenvalues of a complex Hermitian matrix, ascending. Only the lower triangle is read.
pub fn hermitian_eigenvalues(m: MatRef<'_, Complex64>) -> Result<Vec<f64>> {
    check_square(m.nrows(), m.ncols())?;
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    sequential();
    let mut vals = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| evd_failure(m.nrows(), "hermitian", e))?;
    sort_ascending(&mut vals);
    Ok(vals)
}

/// Full eigendecomposition of a real symmetric matrix.
///
/// Eigenvalues ascend; column `k` of the returned matrix is the unit
/// eigenvector for eigenvalue `k`, with its sign fixed so that its
/// largest-magnitude component (first one on ties) is positive.
pub fn symmetric_eigen(m: MatRef<'_, f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    check_square(m.nrows(), m.ncols())?;
    let n = m.nrows();
    if n == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }
    sequential();
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| evd_failure(n, "symmetric", e))?;
    let s = evd.S().column_vector();
    let u = evd.U();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));

    let values: Vec<f64> = order.iter().map(|&k| s[k]).collect();
    let mut vectors = Mat::<f64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = u.col(src);
        let mut pivot = 0usize;
        for i in 1..n {
            if col[i].abs() > col[pivot].abs() {
                pivot = i;
            }
        }
        let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            vectors[(i, dst)] = sign * col[i];
        }
    }
    Ok((values, vectors))
}

/// Singular values of a real matrix, descending.
pub fn singular_values(m: MatRef<'_, f64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    sequential();
    m.singular_values().map_err(|e| {
        Error::Numerical(format!(
            "SVD failed on {}x{} matrix: {e:?}",
            m.nrows(),
            m.ncols()
        ))
    })
}

fn sort_ascending(v: &mut [f64]) {
    v.sort_by(f64::total_cmp);
}
