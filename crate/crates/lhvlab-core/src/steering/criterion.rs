//! Constructive steering criteria for states with rank-one conditional
//! states, and the measurement-pair construction that steers any entangled
//! pure state on C^n ⊗ C^n.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen_raw, inner, norm, schmidt, ComplexMatrix};
use crate::quantum::{assemblage_of, fourier_basis, max_cross_overlap, DensityMatrix, MeasurementAssemblage, Povm, DISJOINT_TOL};

/// Default tolerance for the rank-one and positivity checks.
pub const CRITERION_TOL: f64 = 1e-8;

/// Certificate that two measurements on Alice collapse Bob onto two
/// cross-disjoint families of rank-one states with positive weights,
/// a sufficient condition for steerability of any assemblage containing the
/// pair.
///
/// The direction families need not be orthonormal within themselves (they
/// are for maximally entangled states, but not for generic full-rank Schmidt
/// states); the argument only needs that no P-direction is parallel to any
/// Q-direction.
#[derive(Debug, Clone)]
pub struct DisjointCriterionCertificate {
    e_columns: ComplexMatrix,
    f_columns: ComplexMatrix,
    c: Vec<f64>,
    d: Vec<f64>,
    p: Povm,
    q: Povm,
}

impl DisjointCriterionCertificate {
    /// Unit directions |e_i⟩ of the P-conditional states, as columns.
    pub fn e_columns(&self) -> &ComplexMatrix {
        &self.e_columns
    }

    /// Unit directions |f_j⟩ of the Q-conditional states, as columns.
    pub fn f_columns(&self) -> &ComplexMatrix {
        &self.f_columns
    }

    /// Weights c_i with tr_A[(P_i ⊗ 1)ρ] = c_i|e_i⟩⟨e_i|.
    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// Weights d_i with tr_A[(Q_i ⊗ 1)ρ] = d_i|f_i⟩⟨f_i|.
    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn measurement_pair(&self) -> (&Povm, &Povm) {
        (&self.p, &self.q)
    }

    /// Largest cross overlap |⟨e_i|f_j⟩| (strictly below 1 by construction).
    pub fn max_cross_overlap(&self) -> f64 {
        max_cross_overlap(&self.e_columns, &self.f_columns)
    }
}

/// Extract (weights, unit directions) from an assemblage row if every member
/// is rank-one with weight above `tol`; None otherwise.
fn rank_one_family(
    members: &[&ComplexMatrix],
    tol: f64,
) -> Result<Option<(Vec<f64>, ComplexMatrix)>> {
    let dim = members[0].rows();
    let mut weights = Vec::with_capacity(members.len());
    let mut columns = ComplexMatrix::zeros(dim, members.len());
    for (i, m) in members.iter().enumerate() {
        let eig = hermitian_eigen_raw(m)?;
        let second = if dim >= 2 { eig.values[dim - 2] } else { 0.0 };
        if second > tol {
            return Ok(None);
        }
        let c = m.trace().re;
        if c <= tol {
            return Ok(None);
        }
        let v = eig.max_vector();
        // Residual check against the claimed rank-one form.
        let model = ComplexMatrix::outer(&v, &v).scale_re(c);
        if m.distance(&model) > 1e-8 {
            return Ok(None);
        }
        weights.push(c);
        for r in 0..dim {
            columns.set(r, i, v[r]);
        }
    }
    Ok(Some((weights, columns)))
}

/// Check whether (ρ, P, Q) certify steerability through rank-one conditional
/// states on two cross-disjoint direction families.
///
/// `None` is not an unsteerability claim; it only means the hypotheses of
/// the criterion do not hold numerically.
pub fn criterion_disjoint_bases(
    rho: &DensityMatrix,
    p: &Povm,
    q: &Povm,
    tol: f64,
) -> Result<Option<DisjointCriterionCertificate>> {
    if p.dim() != q.dim() {
        return Err(Error::Dimension(format!(
            "P and Q act on different dimensions {} vs {}",
            p.dim(),
            q.dim()
        )));
    }
    if rho.dim() % p.dim() != 0 {
        return Err(Error::Dimension(format!(
            "state dimension {} is not divisible by Alice's dimension {}",
            rho.dim(),
            p.dim()
        )));
    }
    let dim_b = rho.dim() / p.dim();
    if p.outcomes() != dim_b || q.outcomes() != dim_b {
        return Err(Error::Dimension(format!(
            "criterion needs exactly {dim_b} outcomes per measurement, got {} and {}",
            p.outcomes(),
            q.outcomes()
        )));
    }
    if dim_b < 2 {
        return Ok(None);
    }

    let sig_p = assemblage_of(rho, &MeasurementAssemblage::new(vec![p.clone()])?)?;
    let sig_q = assemblage_of(rho, &MeasurementAssemblage::new(vec![q.clone()])?)?;
    let mem_p: Vec<&ComplexMatrix> = (0..dim_b).map(|a| sig_p.member(a, 0)).collect();
    let mem_q: Vec<&ComplexMatrix> = (0..dim_b).map(|a| sig_q.member(a, 0)).collect();

    let Some((c, e_columns)) = rank_one_family(&mem_p, tol)? else {
        return Ok(None);
    };
    let Some((d, f_columns)) = rank_one_family(&mem_q, tol)? else {
        return Ok(None);
    };
    if c.iter().zip(&d).any(|(ci, di)| ci * di <= tol) {
        return Ok(None);
    }
    if max_cross_overlap(&e_columns, &f_columns) >= 1.0 - DISJOINT_TOL {
        return Ok(None);
    }
    Ok(Some(DisjointCriterionCertificate {
        e_columns,
        f_columns,
        c,
        d,
        p: p.clone(),
        q: q.clone(),
    }))
}

/// Complete `columns` (orthonormal) to a full unitary by Gram–Schmidt
/// against the canonical basis, deterministically.
fn complete_unitary(columns: &ComplexMatrix, dim: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = (0..columns.cols())
        .map(|k| columns.column_vec(k))
        .collect();
    let mut cand = 0usize;
    while cols.len() < dim && cand < dim {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[cand] = Complex64::new(1.0, 0.0);
        for existing in &cols {
            let proj = inner(existing, &v);
            for (z, e) in v.iter_mut().zip(existing) {
                *z -= proj * e;
            }
        }
        let n = norm(&v);
        if n > 1e-6 {
            for z in &mut v {
                *z /= n;
            }
            cols.push(v);
        }
        cand += 1;
    }
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (k, col) in cols.iter().enumerate() {
        for r in 0..dim {
            u.set(r, k, col[r]);
        }
    }
    u
}

/// For an entangled pure state on C^n ⊗ C^n, build the projective pair
/// P = {U|i⟩⟨i|U†} and Q = {U F_n|j⟩⟨j|F_n† U†} with U completing the
/// Schmidt basis on Alice's side; any assemblage containing this pair steers
/// from A to B.
pub fn steering_measurements_for_pure(
    rho: &DensityMatrix,
    rank_tol: f64,
) -> Result<(Povm, Povm)> {
    let dim = rho.dim();
    let n = (dim as f64).sqrt().round() as usize;
    if n * n != dim {
        return Err(Error::Dimension(format!(
            "construction needs equal local dimensions; total dimension {dim} is not a square"
        )));
    }
    let psi = rho.pure_vector()?;
    let dec = schmidt(&psi, n, n, rank_tol)?;
    if dec.rank() < 2 {
        return Err(Error::NotEntangled);
    }
    let u = complete_unitary(&dec.basis_a, n);
    let fourier = fourier_basis(n)?;
    let uf = u.matmul(fourier.columns());

    let projectors = |m: &ComplexMatrix| -> Result<Povm> {
        let effects = (0..n)
            .map(|j| {
                let col = m.column_vec(j);
                ComplexMatrix::outer(&col, &col)
            })
            .collect();
        Povm::new(effects)
    };
    Ok((projectors(&u)?, projectors(&uf)?))
}
