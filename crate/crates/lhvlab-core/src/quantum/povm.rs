//! POVMs and measurement assemblages (finite families of POVMs on one
//! party), plus the parent-POVM smearing construction that produces jointly
//! measurable assemblages.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen_raw, ComplexMatrix, HermitianCheckedMatrix};

/// PSD slack used throughout: eigenvalues above −1e-9 count as nonnegative.
pub const PSD_TOL: f64 = 1e-9;

/// A positive operator-valued measure: PSD effects summing to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    effects: Vec<HermitianCheckedMatrix>,
}

impl Povm {
    /// Validates Hermiticity, positivity and completeness of the effects.
    pub fn new(effects: Vec<ComplexMatrix>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::Domain("POVM needs at least one effect".into()));
        }
        let dim = effects[0].rows();
        let mut checked = Vec::with_capacity(effects.len());
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for e in effects {
            if e.rows() != dim || e.cols() != dim {
                return Err(Error::Dimension("POVM effects differ in dimension".into()));
            }
            sum = sum.add(&e);
            let h = HermitianCheckedMatrix::new(e)?;
            let eig = hermitian_eigen_raw(h.matrix())?;
            if eig.min() < -PSD_TOL {
                return Err(Error::Domain(format!(
                    "POVM effect has negative eigenvalue {:.3e}",
                    eig.min()
                )));
            }
            checked.push(h);
        }
        let completeness = sum.distance(&ComplexMatrix::identity(dim));
        if completeness > PSD_TOL {
            return Err(Error::Domain(format!(
                "POVM effects sum to identity only within {completeness:.3e}"
            )));
        }
        Ok(Self { effects: checked })
    }

    /// For constructions that are valid by construction (e.g. projectors of a
    /// validated basis).
    pub(crate) fn new_unchecked(effects: Vec<ComplexMatrix>) -> Self {
        let effects = effects
            .into_iter()
            .map(|e| HermitianCheckedMatrix::with_tolerance(e, 1e-8).expect("effect Hermitian"))
            .collect();
        Self { effects }
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn effect(&self, a: usize) -> &ComplexMatrix {
        self.effects[a].matrix()
    }

    pub fn effects(&self) -> impl Iterator<Item = &ComplexMatrix> {
        self.effects.iter().map(|h| h.matrix())
    }

    /// U M U† applied to every effect.
    pub fn conjugated_by(&self, u: &ComplexMatrix) -> Result<Povm> {
        let residual = u.unitarity_residual();
        if residual > 1e-9 {
            return Err(Error::NonUnitary { residual });
        }
        let ud = u.dagger();
        let effects = self
            .effects
            .iter()
            .map(|e| u.matmul(e.matrix()).matmul(&ud))
            .collect();
        Povm::new(effects)
    }

    /// Pads with zero effects up to `outcomes`.
    fn padded(&self, outcomes: usize) -> Povm {
        let mut effects: Vec<ComplexMatrix> = self.effects.iter().map(|h| h.matrix().clone()).collect();
        while effects.len() < outcomes {
            effects.push(ComplexMatrix::zeros(self.dim(), self.dim()));
        }
        Povm::new_unchecked(effects)
    }
}

/// A finite family of POVMs on one party; ragged outcome counts are padded
/// with zero effects so (outcome, setting) grids stay rectangular.
#[derive(Debug, Clone)]
pub struct MeasurementAssemblage {
    povms: Vec<Povm>,
    outcomes: usize,
}

impl MeasurementAssemblage {
    pub fn new(povms: Vec<Povm>) -> Result<Self> {
        if povms.is_empty() {
            return Err(Error::Domain("measurement assemblage needs m ≥ 1".into()));
        }
        let dim = povms[0].dim();
        if povms.iter().any(|p| p.dim() != dim) {
            return Err(Error::Dimension(
                "POVMs in an assemblage must share a dimension".into(),
            ));
        }
        let outcomes = povms.iter().map(Povm::outcomes).max().unwrap();
        let povms = povms.into_iter().map(|p| p.padded(outcomes)).collect();
        Ok(Self { povms, outcomes })
    }

    /// Number of settings m.
    pub fn settings(&self) -> usize {
        self.povms.len()
    }

    /// Common (padded) outcome count o.
    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn dim(&self) -> usize {
        self.povms[0].dim()
    }

    pub fn povm(&self, x: usize) -> &Povm {
        &self.povms[x]
    }

    pub fn povms(&self) -> &[Povm] {
        &self.povms
    }

    /// Effect M_{a|x}.
    pub fn effect(&self, a: usize, x: usize) -> &ComplexMatrix {
        self.povms[x].effect(a)
    }

    /// U M U† applied to every setting.
    pub fn conjugated_by(&self, u: &ComplexMatrix) -> Result<MeasurementAssemblage> {
        let povms = self
            .povms
            .iter()
            .map(|p| p.conjugated_by(u))
            .collect::<Result<Vec<_>>>()?;
        MeasurementAssemblage::new(povms)
    }
}

/// Conditional response probabilities P(a|x,λ) used to smear a parent POVM.
///
/// `table[x][lambda][a]`, with each `table[x][lambda]` a probability
/// distribution over outcomes.
pub type ResponseTable = Vec<Vec<Vec<f64>>>;

/// Classically post-process a single parent POVM into a full assemblage:
/// M_{a|x} = Σ_λ P(a|x,λ)·N_λ. The output is jointly measurable by
/// construction, hence can never steer.
pub fn smear_parent_povm(parent: &Povm, response: &ResponseTable) -> Result<MeasurementAssemblage> {
    if response.is_empty() {
        return Err(Error::Domain("response table needs at least one setting".into()));
    }
    let d_parent = parent.outcomes();
    let mut povms = Vec::with_capacity(response.len());
    for (x, per_lambda) in response.iter().enumerate() {
        if per_lambda.len() != d_parent {
            return Err(Error::Dimension(format!(
                "setting {x}: response table has {} λ-columns, parent has {d_parent} outcomes",
                per_lambda.len()
            )));
        }
        let outcomes = per_lambda[0].len();
        let mut effects =
            vec![ComplexMatrix::zeros(parent.dim(), parent.dim()); outcomes];
        for (lambda, pd) in per_lambda.iter().enumerate() {
            if pd.len() != outcomes {
                return Err(Error::Dimension(format!(
                    "setting {x}: ragged response distribution at λ = {lambda}"
                )));
            }
            let total: f64 = pd.iter().sum();
            if pd.iter().any(|&p| p < -1e-12) || (total - 1.0).abs() > 1e-9 {
                return Err(Error::Domain(format!(
                    "response at (x = {x}, λ = {lambda}) is not a probability distribution"
                )));
            }
            for (a, &p) in pd.iter().enumerate() {
                effects[a] = effects[a].add(&parent.effect(lambda).scale_re(p));
            }
        }
        povms.push(Povm::new(effects)?);
    }
    MeasurementAssemblage::new(povms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::basis::Basis;

    #[test]
    fn projective_povm_is_valid() {
        let p = Basis::computational(3).projectors();
        let effects: Vec<_> = p.effects().cloned().collect();
        assert!(Povm::new(effects).is_ok());
    }

    #[test]
    fn incomplete_povm_rejected() {
        let half = ComplexMatrix::identity(2).scale_re(0.5);
        assert!(matches!(
            Povm::new(vec![half.clone(), half.scale_re(0.5)]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn negative_effect_rejected() {
        let plus = ComplexMatrix::identity(2).scale_re(1.5);
        let minus = ComplexMatrix::identity(2).scale_re(-0.5);
        assert!(matches!(Povm::new(vec![plus, minus]), Err(Error::Domain(_))));
    }

    #[test]
    fn ragged_outcomes_are_padded() {
        let two = Basis::computational(2).projectors();
        let one = Povm::new(vec![ComplexMatrix::identity(2)]).unwrap();
        let ma = MeasurementAssemblage::new(vec![two, one]).unwrap();
        assert_eq!(ma.outcomes(), 2);
        assert!(ma.effect(1, 1).frobenius_norm() == 0.0);
    }

    #[test]
    fn smear_with_deterministic_response_returns_parent() {
        let parent = Basis::computational(2).projectors();
        // P(a|x=0, λ) = δ_{a,λ}
        let response = vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]]];
        let ma = smear_parent_povm(&parent, &response).unwrap();
        assert_eq!(ma.settings(), 1);
        for a in 0..2 {
            assert!(ma.effect(a, 0).distance(parent.effect(a)) < 1e-14);
        }
    }

    #[test]
    fn smear_with_uniform_response_gives_identity_over_o() {
        let parent = Basis::computational(2).projectors();
        let response = vec![vec![vec![0.5, 0.5], vec![0.5, 0.5]]; 3];
        let ma = smear_parent_povm(&parent, &response).unwrap();
        let want = ComplexMatrix::identity(2).scale_re(0.5);
        for x in 0..3 {
            for a in 0..2 {
                assert!(ma.effect(a, x).distance(&want) < 1e-14);
            }
        }
    }

    #[test]
    fn smear_rejects_non_distribution() {
        let parent = Basis::computational(2).projectors();
        let response = vec![vec![vec![0.9, 0.3], vec![0.5, 0.5]]];
        assert!(matches!(
            smear_parent_povm(&parent, &response),
            Err(Error::Domain(_))
        ));
    }
}
