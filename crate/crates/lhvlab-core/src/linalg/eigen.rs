//! Hermitian eigendecomposition by cyclic Jacobi rotations.
//!
//! Dimensions stay small here (≤ ~64), so the quadratically convergent
//! Jacobi iteration with a deterministic sweep order is preferred over the
//! usual tridiagonalize-then-QR route: it is simple, keeps the accumulated
//! eigenvector matrix unitary to machine precision, and has no trouble with
//! clustered eigenvalues.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::matrix::{ComplexMatrix, HermitianCheckedMatrix};

/// Maximum number of full sweeps before giving up.
const MAX_SWEEPS: usize = 100;

/// Eigenvalues (ascending) and a unitary matrix of eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Eigenvector column for the smallest eigenvalue.
    pub fn min_vector(&self) -> Vec<Complex64> {
        self.vectors.column_vec(0)
    }

    /// Eigenvector column for the largest eigenvalue.
    pub fn max_vector(&self) -> Vec<Complex64> {
        self.vectors.column_vec(self.vectors.cols() - 1)
    }
}

/// Diagonalize a Hermitian matrix: h·V = V·diag(values).
pub fn hermitian_eigen(h: &HermitianCheckedMatrix) -> Result<EigenDecomposition> {
    hermitian_eigen_raw(h.matrix())
}

/// Jacobi iteration on the raw matrix. The caller guarantees Hermiticity; the
/// strictly-lower triangle is ignored and the diagonal is taken as real.
pub(crate) fn hermitian_eigen_raw(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    let n = m.rows();
    if n == 0 {
        return Ok(EigenDecomposition {
            values: vec![],
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let mut a = m.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(1e-300);
    let stop = 1e-14 * scale;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= stop {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q, scale);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > stop {
        return Err(Error::Convergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());

    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        for row in 0..n {
            vectors.set(row, col, v.get(row, i));
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += 2.0 * a.get(i, j).norm_sqr();
        }
    }
    s.sqrt()
}

/// One Jacobi rotation zeroing a[p][q].
///
/// With h = a[p][q] = |h|e^{iφ}, the unitary acting on columns (p, q) is
///   [ c          -s·e^{iφ} ]
///   [ s·e^{-iφ}   c        ]
/// with tan(2θ) = 2|h| / (a[p][p] − a[q][q]).
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, scale: f64) {
    let h = a.get(p, q);
    let habs = h.norm();
    if habs <= 1e-18 * scale {
        return;
    }
    let phase = h / habs;
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let tau = (app - aqq) / (2.0 * habs);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let n = a.rows();
    // Columns p, q of A (rows untouched yet): A ← A·R.
    for i in 0..n {
        let aip = a.get(i, p);
        let aiq = a.get(i, q);
        a.set(i, p, aip * c + aiq * (s * phase.conj()));
        a.set(i, q, -aip * (s * phase) + aiq * c);
    }
    // Rows p, q: A ← R†·A.
    for j in 0..n {
        let apj = a.get(p, j);
        let aqj = a.get(q, j);
        a.set(p, j, apj * c + aqj * (s * phase));
        a.set(q, j, -apj * (s * phase.conj()) + aqj * c);
    }
    // Clean the pivot pair and keep the diagonal exactly real.
    a.set(p, q, Complex64::new(0.0, 0.0));
    a.set(q, p, Complex64::new(0.0, 0.0));
    let app_new = a.get(p, p).re;
    let aqq_new = a.get(q, q).re;
    a.set(p, p, Complex64::new(app_new, 0.0));
    a.set(q, q, Complex64::new(aqq_new, 0.0));

    // Accumulate eigenvectors: V ← V·R.
    for i in 0..v.rows() {
        let vip = v.get(i, p);
        let viq = v.get(i, q);
        v.set(i, p, vip * c + viq * (s * phase.conj()));
        v.set(i, q, -vip * (s * phase) + viq * c);
    }
}
