//! Orthonormal bases, the discrete Fourier basis, and disjointness of basis
//! pairs (no shared rank-one projector).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::quantum::povm::Povm;

/// Overlap slack for the disjointness test: bases are disjoint when every
/// cross overlap satisfies |⟨e_i|f_j⟩| < 1 − tol.
pub const DISJOINT_TOL: f64 = 1e-9;

/// An orthonormal basis, stored as the unitary matrix of its column vectors.
#[derive(Debug, Clone)]
pub struct Basis {
    columns: ComplexMatrix,
}

impl Basis {
    /// Wraps a square matrix after checking unitarity to 1e-9.
    pub fn new(columns: ComplexMatrix) -> Result<Self> {
        if !columns.is_square() {
            return Err(Error::Dimension(format!(
                "basis matrix must be square, got {}x{}",
                columns.rows(),
                columns.cols()
            )));
        }
        let residual = columns.unitarity_residual();
        if residual > 1e-9 {
            return Err(Error::NonUnitary { residual });
        }
        Ok(Self { columns })
    }

    pub fn computational(dim: usize) -> Self {
        Self {
            columns: ComplexMatrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.columns.rows()
    }

    pub fn columns(&self) -> &ComplexMatrix {
        &self.columns
    }

    /// Basis vector |e_i⟩.
    pub fn vector(&self, i: usize) -> Vec<Complex64> {
        self.columns.column_vec(i)
    }

    /// Entry-wise complex conjugate basis {|e_i*⟩}.
    pub fn conjugate(&self) -> Self {
        Self {
            columns: self.columns.conj(),
        }
    }

    /// Transport by a unitary: columns become U·e_i.
    pub fn conjugated_by(&self, u: &ComplexMatrix) -> Result<Self> {
        let residual = u.unitarity_residual();
        if residual > 1e-9 {
            return Err(Error::NonUnitary { residual });
        }
        Self::new(u.matmul(&self.columns))
    }

    /// The projective POVM {|e_i⟩⟨e_i|}.
    pub fn projectors(&self) -> Povm {
        let effects = (0..self.dim())
            .map(|i| {
                let v = self.vector(i);
                ComplexMatrix::outer(&v, &v)
            })
            .collect();
        Povm::new_unchecked(effects)
    }
}

/// The n-point Fourier basis: column j holds entries ω^{kj}/√n (0-indexed,
/// ω = e^{2πi/n}).
pub fn fourier_basis(n: usize) -> Result<Basis> {
    if n == 0 {
        return Err(Error::Domain("Fourier basis needs n ≥ 1".into()));
    }
    let mut m = ComplexMatrix::zeros(n, n);
    let scale = 1.0 / (n as f64).sqrt();
    for k in 0..n {
        for j in 0..n {
            // Reduce the exponent mod n before evaluating for accuracy.
            let e = ((k * j) % n) as f64;
            let angle = 2.0 * PI * e / n as f64;
            m.set(k, j, Complex64::from_polar(scale, angle));
        }
    }
    Basis::new(m)
}

/// Largest |⟨u_i|v_j⟩| over all column pairs of two equally-sized families.
pub(crate) fn max_cross_overlap(u: &ComplexMatrix, v: &ComplexMatrix) -> f64 {
    let g = u.dagger().matmul(v);
    let mut worst: f64 = 0.0;
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            worst = worst.max(g.get(i, j).norm());
        }
    }
    worst
}

/// True iff the bases share no rank-one projector: every cross overlap obeys
/// |⟨e_i|f_j⟩| < 1 − tol.
pub fn is_disjoint(e: &Basis, f: &Basis, tol: f64) -> Result<bool> {
    if e.dim() != f.dim() {
        return Err(Error::Dimension(format!(
            "disjointness needs equal dims, got {} vs {}",
            e.dim(),
            f.dim()
        )));
    }
    Ok(max_cross_overlap(e.columns(), f.columns()) < 1.0 - tol)
}
