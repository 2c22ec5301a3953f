//! Schmidt decomposition of bipartite pure-state vectors.
//!
//! The coefficient matrix C (psi reshaped to dim_a × dim_b) is factored
//! through the eigendecomposition of the reduced density matrix on the
//! smaller factor; partner vectors on the other factor follow by
//! back-substitution. This avoids a general complex SVD.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::eigen::hermitian_eigen_raw;
use crate::linalg::matrix::{inner, norm, ComplexMatrix};

/// Default cut-off below which a Schmidt coefficient counts as zero.
pub const RANK_TOL: f64 = 1e-9;

/// Schmidt form Σ μ_i |a_i⟩|b_i⟩ with strictly positive μ, descending.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// Coefficients μ_i > rank_tol, descending.
    pub coefficients: Vec<f64>,
    /// Orthonormal columns on the A factor, one per retained coefficient.
    pub basis_a: ComplexMatrix,
    /// Orthonormal columns on the B factor, one per retained coefficient.
    pub basis_b: ComplexMatrix,
}

impl SchmidtDecomposition {
    /// Schmidt rank: the number of retained coefficients.
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// Rebuild the state vector Σ μ_i |a_i⟩|b_i⟩.
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let da = self.basis_a.rows();
        let db = self.basis_b.rows();
        let mut psi = vec![Complex64::new(0.0, 0.0); da * db];
        for (k, &mu) in self.coefficients.iter().enumerate() {
            for i in 0..da {
                for j in 0..db {
                    psi[i * db + j] += self.basis_a.get(i, k) * self.basis_b.get(j, k) * mu;
                }
            }
        }
        psi
    }
}

/// Schmidt-decompose a normalized vector of length dim_a·dim_b.
pub fn schmidt(
    psi: &[Complex64],
    dim_a: usize,
    dim_b: usize,
    rank_tol: f64,
) -> Result<SchmidtDecomposition> {
    if psi.len() != dim_a * dim_b {
        return Err(Error::Dimension(format!(
            "vector length {} is not {dim_a}·{dim_b}",
            psi.len()
        )));
    }
    let nrm = norm(psi);
    if (nrm - 1.0).abs() > 1e-9 {
        return Err(Error::Normalization { norm: nrm });
    }

    // C[i][j] = psi[i·dim_b + j]; then C = Σ_k μ_k a_k b_k^T.
    let mut c = ComplexMatrix::zeros(dim_a, dim_b);
    for i in 0..dim_a {
        for j in 0..dim_b {
            c.set(i, j, psi[i * dim_b + j]);
        }
    }

    let on_a = dim_a <= dim_b;
    // Reduced matrix on the smaller factor: CC† on A, (C†C)^T on B.
    let reduced = if on_a {
        c.matmul(&c.dagger())
    } else {
        c.dagger().matmul(&c).conj()
    };
    let eig = hermitian_eigen_raw(&reduced)?;

    // Descending eigenvalues; retain μ = sqrt(λ) above the cut-off.
    let n_small = reduced.rows();
    let mut coefficients = Vec::new();
    let mut small_vectors: Vec<Vec<Complex64>> = Vec::new();
    for idx in (0..n_small).rev() {
        let mu = eig.values[idx].max(0.0).sqrt();
        if mu > rank_tol {
            coefficients.push(mu);
            small_vectors.push(eig.vectors.column_vec(idx));
        }
    }

    // Partner vectors by back-substitution: b_k = C^T conj(a_k)/μ_k on the
    // A-side route, a_k = C conj(b_k)/μ_k on the B-side route.
    let mut partner_vectors: Vec<Vec<Complex64>> = Vec::new();
    for (k, vk) in small_vectors.iter().enumerate() {
        let mu = coefficients[k];
        let dim_other = if on_a { dim_b } else { dim_a };
        let mut partner = vec![Complex64::new(0.0, 0.0); dim_other];
        if on_a {
            for j in 0..dim_b {
                let mut s = Complex64::new(0.0, 0.0);
                for i in 0..dim_a {
                    s += c.get(i, j) * vk[i].conj();
                }
                partner[j] = s / mu;
            }
        } else {
            for i in 0..dim_a {
                let mut s = Complex64::new(0.0, 0.0);
                for j in 0..dim_b {
                    s += c.get(i, j) * vk[j].conj();
                }
                partner[i] = s / mu;
            }
        }
        partner_vectors.push(partner);
    }

    // Partners are orthonormal in exact arithmetic; re-orthonormalize inside
    // blocks of (numerically) equal coefficients where the eigenbasis is free.
    let mut start = 0;
    while start < coefficients.len() {
        let mut end = start + 1;
        while end < coefficients.len()
            && (coefficients[end - 1] - coefficients[end]).abs() <= 1e-8 * (1.0 + coefficients[0])
        {
            end += 1;
        }
        modified_gram_schmidt(&mut partner_vectors[start..end]);
        start = end;
    }
    for v in &mut partner_vectors {
        let n = norm(v);
        for z in v.iter_mut() {
            *z /= n;
        }
    }

    let r = coefficients.len();
    let (mut basis_a, mut basis_b) = if on_a {
        (ComplexMatrix::zeros(dim_a, r), ComplexMatrix::zeros(dim_b, r))
    } else {
        (ComplexMatrix::zeros(dim_a, r), ComplexMatrix::zeros(dim_b, r))
    };
    for k in 0..r {
        let (av, bv) = if on_a {
            (&small_vectors[k], &partner_vectors[k])
        } else {
            (&partner_vectors[k], &small_vectors[k])
        };
        for i in 0..dim_a {
            basis_a.set(i, k, av[i]);
        }
        for j in 0..dim_b {
            basis_b.set(j, k, bv[j]);
        }
    }

    let out = SchmidtDecomposition {
        coefficients,
        basis_a,
        basis_b,
    };

    let rec = out.reconstruct();
    let residual: f64 = rec
        .iter()
        .zip(psi)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual > 1e-8 {
        return Err(Error::Solver(format!(
            "Schmidt reconstruction residual {residual:.3e}"
        )));
    }
    Ok(out)
}

fn modified_gram_schmidt(vs: &mut [Vec<Complex64>]) {
    for k in 0..vs.len() {
        for j in 0..k {
            let proj = inner(&vs[j], &vs[k]);
            let prev = vs[j].clone();
            for (z, p) in vs[k].iter_mut().zip(prev) {
                *z -= proj * p;
            }
        }
        let n = norm(&vs[k]);
        if n > 0.0 {
            for z in vs[k].iter_mut() {
                *z /= n;
            }
        }
    }
}
