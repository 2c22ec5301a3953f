//! Density matrices and the pure-state factories used by the steering
//! criteria.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, norm, partial_trace, tensor, tensor_vec, ComplexMatrix,
    HermitianCheckedMatrix, Subsystem,
};
use crate::quantum::basis::Basis;
use crate::quantum::povm::PSD_TOL;

/// A quantum state: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: HermitianCheckedMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let h = HermitianCheckedMatrix::new(matrix)?;
        let tr = h.matrix().trace();
        if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "density matrix trace is {} + {}i, expected 1",
                tr.re, tr.im
            )));
        }
        let eig = hermitian_eigen(&h)?;
        if eig.min() < -PSD_TOL {
            return Err(Error::Domain(format!(
                "density matrix has negative eigenvalue {:.3e}",
                eig.min()
            )));
        }
        Ok(Self { matrix: h })
    }

    /// |psi⟩⟨psi| from a normalized vector.
    pub fn from_pure(psi: &[Complex64]) -> Result<Self> {
        let n = norm(psi);
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::Normalization { norm: n });
        }
        Self::new(ComplexMatrix::outer(psi, psi))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.matrix.matrix()
    }

    pub fn hermitian(&self) -> &HermitianCheckedMatrix {
        &self.matrix
    }

    /// Reduced state on one factor of a dim_a·dim_b split.
    pub fn reduced(&self, dim_a: usize, dim_b: usize, keep: Subsystem) -> Result<DensityMatrix> {
        let m = partial_trace(self.matrix(), dim_a, dim_b, keep)?;
        DensityMatrix::new(m)
    }

    /// Largest eigenvector when the state is pure; errors otherwise.
    pub fn pure_vector(&self) -> Result<Vec<Complex64>> {
        let eig = hermitian_eigen(&self.matrix)?;
        if eig.max() < 1.0 - 1e-8 {
            return Err(Error::Domain(format!(
                "state is not pure: largest eigenvalue {:.12}",
                eig.max()
            )));
        }
        let mut v = eig.max_vector();
        let n = norm(&v);
        for z in &mut v {
            *z /= n;
        }
        Ok(v)
    }

    /// Convex mixture t·self + (1−t)·other.
    pub fn mix(&self, other: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("mixing weight {t} outside [0,1]")));
        }
        DensityMatrix::new(
            self.matrix()
                .scale_re(t)
                .add(&other.matrix().scale_re(1.0 - t)),
        )
    }
}

/// The maximally entangled state Σ_i |ii⟩/√n on C^n ⊗ C^n.
pub fn maximally_entangled(n: usize) -> Result<DensityMatrix> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "maximally entangled state needs n ≥ 2, got {n}"
        )));
    }
    let mut psi = vec![Complex64::new(0.0, 0.0); n * n];
    let amp = 1.0 / (n as f64).sqrt();
    for i in 0..n {
        psi[i * n + i] = Complex64::new(amp, 0.0);
    }
    DensityMatrix::from_pure(&psi)
}

/// Pure state Σ_k μ_k |a_k⟩|b_k⟩ from Schmidt data.
pub fn pure_from_schmidt(mu: &[f64], basis_a: &Basis, basis_b: &Basis) -> Result<DensityMatrix> {
    if mu.is_empty() {
        return Err(Error::Domain("need at least one Schmidt coefficient".into()));
    }
    if mu.iter().any(|&m| m <= 0.0) {
        return Err(Error::Domain("Schmidt coefficients must be positive".into()));
    }
    if mu.len() > basis_a.dim() || mu.len() > basis_b.dim() {
        return Err(Error::Dimension(format!(
            "{} coefficients exceed basis dimensions {}x{}",
            mu.len(),
            basis_a.dim(),
            basis_b.dim()
        )));
    }
    let sum_sq: f64 = mu.iter().map(|m| m * m).sum();
    if (sum_sq - 1.0).abs() > 1e-9 {
        return Err(Error::Normalization { norm: sum_sq.sqrt() });
    }
    let da = basis_a.dim();
    let db = basis_b.dim();
    let mut psi = vec![Complex64::new(0.0, 0.0); da * db];
    for (k, &m) in mu.iter().enumerate() {
        let av = basis_a.vector(k);
        let bv = basis_b.vector(k);
        for i in 0..da {
            for j in 0..db {
                psi[i * db + j] += av[i] * bv[j] * m;
            }
        }
    }
    DensityMatrix::from_pure(&psi)
}

/// (U ⊗ V) ρ (U† ⊗ V†).
pub fn apply_local_unitary(
    rho: &DensityMatrix,
    u: &ComplexMatrix,
    v: &ComplexMatrix,
) -> Result<DensityMatrix> {
    for w in [u, v] {
        let residual = w.unitarity_residual();
        if residual > 1e-9 {
            return Err(Error::NonUnitary { residual });
        }
    }
    if u.rows() * v.rows() != rho.dim() {
        return Err(Error::Dimension(format!(
            "local unitaries act on {}·{} but the state has dimension {}",
            u.rows(),
            v.rows(),
            rho.dim()
        )));
    }
    let uv = tensor(u, v);
    DensityMatrix::new(uv.matmul(rho.matrix()).matmul(&uv.dagger()))
}

/// ρ_A ⊗ ρ_B.
pub fn product_state(rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> Result<DensityMatrix> {
    DensityMatrix::new(tensor(rho_a.matrix(), rho_b.matrix()))
}

/// |a⟩|b⟩ as a vector, for building product pure states.
pub fn product_vector(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    tensor_vec(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::schmidt;

    #[test]
    fn maximally_entangled_two_is_bell_state() {
        let rho = maximally_entangled(2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [
            Complex64::new(s, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(s, 0.0),
        ];
        assert!(rho.matrix().distance(&ComplexMatrix::outer(&psi, &psi)) < 1e-15);
    }

    #[test]
    fn maximally_entangled_reductions_are_flat() {
        for n in 2..=4 {
            let rho = maximally_entangled(n).unwrap();
            let flat = ComplexMatrix::identity(n).scale_re(1.0 / n as f64);
            for keep in [Subsystem::A, Subsystem::B] {
                let red = rho.reduced(n, n, keep).unwrap();
                assert!(red.matrix().distance(&flat) <= 1e-12);
            }
        }
    }

    #[test]
    fn maximally_entangled_schmidt_coefficients_flat() {
        let n = 3;
        let rho = maximally_entangled(n).unwrap();
        let psi = rho.pure_vector().unwrap();
        let s = schmidt(&psi, n, n, 1e-9).unwrap();
        assert_eq!(s.rank(), n);
        for mu in &s.coefficients {
            assert!((mu - 1.0 / (n as f64).sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn maximally_entangled_needs_two() {
        assert!(matches!(maximally_entangled(1), Err(Error::Domain(_))));
    }

    #[test]
    fn pure_from_schmidt_trivial_and_bell() {
        let e2 = Basis::computational(2);
        let product = pure_from_schmidt(&[1.0], &e2, &e2).unwrap();
        let psi = product.pure_vector().unwrap();
        let s = schmidt(&psi, 2, 2, 1e-9).unwrap();
        assert_eq!(s.rank(), 1);

        let v = std::f64::consts::FRAC_1_SQRT_2;
        let bell = pure_from_schmidt(&[v, v], &e2, &e2).unwrap();
        assert!(bell
            .matrix()
            .distance(maximally_entangled(2).unwrap().matrix())
            < 1e-12);
    }

    #[test]
    fn pure_from_schmidt_round_trips() {
        let e2 = Basis::computational(2);
        let rho = pure_from_schmidt(&[0.8, 0.6], &e2, &e2).unwrap();
        let psi = rho.pure_vector().unwrap();
        let s = schmidt(&psi, 2, 2, 1e-9).unwrap();
        assert_eq!(s.rank(), 2);
        assert!((s.coefficients[0] - 0.8).abs() <= 1e-8);
        assert!((s.coefficients[1] - 0.6).abs() <= 1e-8);
    }

    #[test]
    fn pure_from_schmidt_rejects_unnormalized() {
        let e2 = Basis::computational(2);
        assert!(matches!(
            pure_from_schmidt(&[0.9, 0.6], &e2, &e2),
            Err(Error::Normalization { .. })
        ));
    }

    #[test]
    fn local_unitary_preserves_state_with_identity() {
        let rho = maximally_entangled(2).unwrap();
        let i2 = ComplexMatrix::identity(2);
        let out = apply_local_unitary(&rho, &i2, &i2).unwrap();
        assert!(out.matrix().distance(rho.matrix()) < 1e-15);
    }

    #[test]
    fn local_unitary_preserves_spectrum() {
        let rho = DensityMatrix::new(
            ComplexMatrix::from_rows(&[
                vec![(0.5, 0.0), (0.0, 0.0), (0.1, 0.1), (0.0, 0.0)],
                vec![(0.0, 0.0), (0.2, 0.0), (0.0, 0.0), (0.0, 0.0)],
                vec![(0.1, -0.1), (0.0, 0.0), (0.2, 0.0), (0.0, 0.0)],
                vec![(0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.1, 0.0)],
            ])
            .unwrap(),
        )
        .unwrap();
        // A non-trivial product unitary: Fourier on A, a phase pair on B.
        let u = crate::quantum::basis::fourier_basis(2).unwrap().columns().clone();
        let mut v = ComplexMatrix::zeros(2, 2);
        v.set(0, 0, Complex64::from_polar(1.0, 0.7));
        v.set(1, 1, Complex64::from_polar(1.0, -1.2));
        let rotated = apply_local_unitary(&rho, &u, &v).unwrap();
        let e1 = hermitian_eigen(rho.hermitian()).unwrap();
        let e2 = hermitian_eigen(rotated.hermitian()).unwrap();
        for (a, b) in e1.values.iter().zip(&e2.values) {
            assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn local_unitary_rejects_non_unitary() {
        let rho = maximally_entangled(2).unwrap();
        let bad = ComplexMatrix::identity(2).scale_re(2.0);
        assert!(matches!(
            apply_local_unitary(&rho, &bad, &ComplexMatrix::identity(2)),
            Err(Error::NonUnitary { .. })
        ));
    }

    #[test]
    fn density_matrix_rejects_wrong_trace() {
        let m = ComplexMatrix::identity(2);
        assert!(matches!(DensityMatrix::new(m), Err(Error::Domain(_))));
    }
}
