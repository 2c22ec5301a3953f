//! Dense complex matrices and the handful of tensor-algebra operations the
//! rest of the crate is built on.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default tolerance for the Hermiticity check.
pub const TOL_HERM: f64 = 1e-10;

/// Which tensor factor a partial trace keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Dense complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Build from row-major entries. Rejects non-finite components.
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("matrix entry is not finite".into()));
        }
        Ok(Self { rows, cols, entries })
    }

    /// Build from nested rows of (re, im) pairs.
    pub fn from_rows(rows: &[Vec<(f64, f64)>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        let entries = rows
            .iter()
            .flat_map(|row| row.iter().map(|&(re, im)| Complex64::new(re, im)))
            .collect();
        Self::from_entries(r, c, entries)
    }

    /// Outer product |u⟩⟨v| of two column vectors.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for (i, &ui) in u.iter().enumerate() {
            for (j, &vj) in v.iter().enumerate() {
                m.set(i, j, ui * vj.conj());
            }
        }
        m
    }

    /// Column vector as a d x 1 matrix.
    pub fn column(v: &[Complex64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            entries: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.entries[i * self.cols + j] = z;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Column `j` as a vector.
    pub fn column_vec(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * z).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius distance to another matrix.
    pub fn distance(&self, other: &Self) -> f64 {
        self.sub(other).frobenius_norm()
    }

    /// Largest |H[i][j] - conj(H[j][i])| over all index pairs.
    pub fn hermiticity_residual(&self) -> f64 {
        assert!(self.is_square());
        let mut r: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                r = r.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        r
    }

    /// ||U†U - I||_F, the unitarity residual.
    pub fn unitarity_residual(&self) -> f64 {
        self.dagger().matmul(self).distance(&Self::identity(self.cols))
    }

    /// tr(self† · other), defined for any equal shapes.
    pub fn hs_dot(&self, other: &Self) -> Complex64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Kronecker product with block layout a[i][j]·b.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a.get(i, j);
            if aij.norm_sqr() == 0.0 {
                continue;
            }
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out.set(i * b.rows() + k, j * b.cols() + l, aij * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Kronecker product of two column vectors.
pub fn tensor_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &ai in a {
        for &bj in b {
            out.push(ai * bj);
        }
    }
    out
}

/// Partial trace of a (dim_a·dim_b)-dimensional operator over one factor.
///
/// Product-basis convention: row index of |i⟩_A|k⟩_B is i·dim_b + k.
pub fn partial_trace(
    m: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    let d = dim_a * dim_b;
    if m.rows() != d || m.cols() != d {
        return Err(Error::Dimension(format!(
            "partial trace expects a {d}x{d} matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    match keep {
        Subsystem::B => {
            let mut out = ComplexMatrix::zeros(dim_b, dim_b);
            for k in 0..dim_b {
                for l in 0..dim_b {
                    let mut s = Complex64::new(0.0, 0.0);
                    for i in 0..dim_a {
                        s += m.get(i * dim_b + k, i * dim_b + l);
                    }
                    out.set(k, l, s);
                }
            }
            Ok(out)
        }
        Subsystem::A => {
            let mut out = ComplexMatrix::zeros(dim_a, dim_a);
            for i in 0..dim_a {
                for j in 0..dim_a {
                    let mut s = Complex64::new(0.0, 0.0);
                    for k in 0..dim_b {
                        s += m.get(i * dim_b + k, j * dim_b + k);
                    }
                    out.set(i, j, s);
                }
            }
            Ok(out)
        }
    }
}

/// Conjugation by the swap |i⟩_A|j⟩_B → |j⟩_B|i⟩_A; the result lives on
/// H_B ⊗ H_A.
pub fn swap_subsystems(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<ComplexMatrix> {
    let d = dim_a * dim_b;
    if m.rows() != d || m.cols() != d {
        return Err(Error::Dimension(format!(
            "swap expects a {d}x{d} matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let mut out = ComplexMatrix::zeros(d, d);
    for i in 0..dim_a {
        for j in 0..dim_b {
            for ip in 0..dim_a {
                for jp in 0..dim_b {
                    out.set(j * dim_a + i, jp * dim_a + ip, m.get(i * dim_b + j, ip * dim_b + jp));
                }
            }
        }
    }
    Ok(out)
}

/// Square matrix whose Hermiticity has been verified at construction.
#[derive(Debug, Clone)]
pub struct HermitianCheckedMatrix {
    matrix: ComplexMatrix,
    hermiticity_residual: f64,
}

impl HermitianCheckedMatrix {
    /// Checks `max |H[i][j] − conj(H[j][i])| ≤ tol` and keeps the residual.
    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension(format!(
                "Hermitian matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let residual = matrix.hermiticity_residual();
        if residual > tol {
            return Err(Error::NotHermitian { residual, tol });
        }
        Ok(Self {
            matrix,
            hermiticity_residual: residual,
        })
    }

    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, TOL_HERM)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.hermiticity_residual
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

/// Hilbert–Schmidt inner product tr(X†Y) of two Hermitian-checked matrices.
pub fn hs_inner(x: &HermitianCheckedMatrix, y: &HermitianCheckedMatrix) -> Result<Complex64> {
    if x.dim() != y.dim() {
        return Err(Error::Dimension(format!(
            "hs_inner dims {} vs {}",
            x.dim(),
            y.dim()
        )));
    }
    Ok(x.matrix().hs_dot(y.matrix()))
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}
