//! LHS-model feasibility for assemblages: a convex projection with a
//! duality-gap certificate produces either an explicit model or a separating
//! steering functional, plus the constructive criteria for pure states.

mod criterion;
mod solver;

pub use criterion::{
    criterion_disjoint_bases, steering_measurements_for_pure, DisjointCriterionCertificate,
    CRITERION_TOL,
};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen_raw, ComplexMatrix};
use crate::quantum::Assemblage;
use crate::strategies::{enumerate_strategies, StrategySpace, STRATEGY_CAP};
use solver::FwSolver;

/// Options shared by the LHS solver and the steering decision.
#[derive(Debug, Clone, Copy)]
pub struct SteeringOptions {
    /// Distances at or below this count as membership (unsteerable).
    pub dist_tol: f64,
    /// Target duality gap for the solver.
    pub gap_tol: f64,
    /// Outer iteration budget.
    pub max_iters: usize,
    /// Cap on the strategy count N = o^m.
    pub cap: usize,
    /// Worker threads for the per-block oracle; 1 keeps runs serial.
    pub threads: usize,
}

impl Default for SteeringOptions {
    fn default() -> Self {
        Self {
            dist_tol: 1e-6,
            gap_tol: 1e-8,
            max_iters: 50_000,
            cap: STRATEGY_CAP,
            threads: 1,
        }
    }
}

/// An explicit LHS model: positive operators τ_k indexed by deterministic
/// strategies, with unit total trace.
#[derive(Debug, Clone)]
pub struct LhsModel {
    tau: Vec<ComplexMatrix>,
    space: StrategySpace,
}

impl LhsModel {
    pub fn tau(&self) -> &[ComplexMatrix] {
        &self.tau
    }

    pub fn strategy_space(&self) -> &StrategySpace {
        &self.space
    }

    /// tr(τ_k): the weight of strategy k.
    pub fn weight(&self, k: usize) -> f64 {
        self.tau[k].trace().re
    }

    /// τ_k/tr(τ_k) as a state, when the weight is not negligible.
    pub fn normalized_state(&self, k: usize) -> Option<crate::quantum::DensityMatrix> {
        let w = self.weight(k);
        if w <= 1e-12 {
            return None;
        }
        crate::quantum::DensityMatrix::new(self.tau[k].scale_re(1.0 / w)).ok()
    }

    pub fn total_trace(&self) -> f64 {
        (0..self.tau.len()).map(|k| self.weight(k)).sum()
    }

    /// The reconstructed assemblage cells Σ_k δ_{a,J_k(x)} τ_k, indexed
    /// x·o + a.
    pub fn reconstruct(&self, outcomes: usize, settings: usize) -> Vec<ComplexMatrix> {
        let d = self.tau[0].rows();
        let mut cells = vec![ComplexMatrix::zeros(d, d); outcomes * settings];
        for (k, t) in self.tau.iter().enumerate() {
            let j = self.space.strategy(k);
            for x in 0..settings {
                let cell = x * outcomes + j.outcome(x);
                cells[cell] = cells[cell].add(t);
            }
        }
        cells
    }

    /// √Σ_{a,x} ‖reconstruction − σ_{a|x}‖²_HS against a target assemblage.
    pub fn reconstruction_residual(&self, sigma: &Assemblage) -> f64 {
        let cells = self.reconstruct(sigma.outcomes(), sigma.settings());
        let mut sq = 0.0;
        for x in 0..sigma.settings() {
            for a in 0..sigma.outcomes() {
                sq += cells[x * sigma.outcomes() + a]
                    .distance(sigma.member(a, x))
                    .powi(2);
            }
        }
        sq.sqrt()
    }

    /// Feasibility check: PSD blocks and unit total trace.
    pub fn verify_feasible(&self) -> Result<()> {
        for t in &self.tau {
            let eig = hermitian_eigen_raw(t)?;
            if eig.min() < -1e-9 {
                return Err(Error::Solver(format!(
                    "model block has negative eigenvalue {:.3e}",
                    eig.min()
                )));
            }
        }
        let total = self.total_trace();
        if (total - 1.0).abs() > 1e-8 {
            return Err(Error::Solver(format!(
                "model total trace {total} differs from 1"
            )));
        }
        Ok(())
    }
}

/// A steering functional F_{a|x} with its exhaustively computed model bound.
#[derive(Debug, Clone)]
pub struct SteeringWitness {
    /// functionals[x·o + a] = F(a, x), max operator norm normalized to 1.
    functionals: Vec<ComplexMatrix>,
    outcomes: usize,
    settings: usize,
    lhs_bound: f64,
    value_on_target: f64,
}

impl SteeringWitness {
    pub fn functional(&self, a: usize, x: usize) -> &ComplexMatrix {
        &self.functionals[x * self.outcomes + a]
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn settings(&self) -> usize {
        self.settings
    }

    /// max over strategies J of λ_max(Σ_x F(J(x), x)).
    pub fn lhs_bound(&self) -> f64 {
        self.lhs_bound
    }

    pub fn value_on_target(&self) -> f64 {
        self.value_on_target
    }

    /// value_on_target − lhs_bound (> 0 certifies steerability).
    pub fn margin(&self) -> f64 {
        self.value_on_target - self.lhs_bound
    }

    /// Σ_{a,x} tr(F(a,x)·ρ_{a|x}) on an arbitrary assemblage.
    pub fn evaluate(&self, sigma: &Assemblage) -> Result<f64> {
        if sigma.outcomes() != self.outcomes || sigma.settings() != self.settings {
            return Err(Error::Dimension("witness shape mismatch".into()));
        }
        let mut v = 0.0;
        for x in 0..self.settings {
            for a in 0..self.outcomes {
                v += self.functional(a, x).hs_dot(sigma.member(a, x)).re;
            }
        }
        Ok(v)
    }

    /// Same evaluation on explicit cells (x·o + a layout).
    pub fn evaluate_cells(&self, cells: &[ComplexMatrix]) -> f64 {
        self.functionals
            .iter()
            .zip(cells)
            .map(|(f, c)| f.hs_dot(c).re)
            .sum()
    }
}

/// Verdict tag for the steering decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteeringTag {
    Unsteerable,
    Steerable,
}

/// Decision plus certificate: a model when unsteerable, a witness when not.
#[derive(Debug, Clone)]
pub struct SteeringVerdict {
    pub tag: SteeringTag,
    pub model: Option<LhsModel>,
    pub witness: Option<SteeringWitness>,
    /// Attained √objective: HS distance from the target to the model set.
    pub distance: f64,
    /// Final duality gap of the solver.
    pub fw_gap: f64,
}

fn strategy_space_for(sigma: &Assemblage, cap: usize) -> Result<StrategySpace> {
    enumerate_strategies(sigma.settings(), sigma.outcomes(), cap)
}

/// Project an assemblage onto the LHS-reachable set.
///
/// Returns the feasible model at the final iterate, the attained distance
/// (√objective) and the final duality gap. The gap bounds the distance from
/// below: distance² − gap ≤ (true minimum)².
pub fn nearest_lhs_model(
    sigma: &Assemblage,
    opts: &SteeringOptions,
) -> Result<(LhsModel, f64, f64)> {
    let space = strategy_space_for(sigma, opts.cap)?;
    let mut fw = FwSolver::new(sigma, space.clone(), opts.threads)?;
    let out = fw.run(opts.gap_tol, opts.max_iters)?;
    let model = LhsModel {
        tau: fw.tau(),
        space,
    };
    model.verify_feasible()?;
    Ok((model, out.objective.sqrt(), out.gap))
}

/// Distance-gradient steering functional at a model with positive residual.
///
/// F(a,x) ∝ σ_{a|x} − reconstruction_{a|x}, normalized so the largest
/// operator norm is 1; the bound is swept exactly over all strategies.
pub fn witness_from_gradient(sigma: &Assemblage, model: &LhsModel) -> Result<SteeringWitness> {
    let (o, m) = (sigma.outcomes(), sigma.settings());
    let cells = model.reconstruct(o, m);
    let mut fs: Vec<ComplexMatrix> = Vec::with_capacity(o * m);
    let mut total_sq = 0.0;
    for x in 0..m {
        for a in 0..o {
            let f = sigma.member(a, x).sub(&cells[x * o + a]);
            total_sq += f.frobenius_norm().powi(2);
            fs.push(f);
        }
    }
    if total_sq.sqrt() <= 1e-12 {
        return Err(Error::Domain(
            "model reconstructs the assemblage; no separating functional exists".into(),
        ));
    }
    // Normalize by the largest operator norm over the cells.
    let mut op_norm: f64 = 0.0;
    for f in &fs {
        let eig = hermitian_eigen_raw(f)?;
        op_norm = op_norm.max(eig.min().abs()).max(eig.max().abs());
    }
    let fs: Vec<ComplexMatrix> = fs.iter().map(|f| f.scale_re(1.0 / op_norm)).collect();

    let lhs_bound = witness_bound(&fs, o, m, model.strategy_space())?;
    let mut value = 0.0;
    for x in 0..m {
        for a in 0..o {
            value += fs[x * o + a].hs_dot(sigma.member(a, x)).re;
        }
    }
    Ok(SteeringWitness {
        functionals: fs,
        outcomes: o,
        settings: m,
        lhs_bound,
        value_on_target: value,
    })
}

/// Exhaustive sweep: max over strategies of λ_max(Σ_x F(J(x), x)).
fn witness_bound(
    fs: &[ComplexMatrix],
    outcomes: usize,
    settings: usize,
    space: &StrategySpace,
) -> Result<f64> {
    let d = fs[0].rows();
    let mut bound = f64::NEG_INFINITY;
    for j in space.iter() {
        let mut g = ComplexMatrix::zeros(d, d);
        for x in 0..settings {
            g = g.add(&fs[x * outcomes + j.outcome(x)]);
        }
        let eig = hermitian_eigen_raw(&g)?;
        bound = bound.max(eig.max());
    }
    Ok(bound)
}

/// Decide whether an assemblage admits an LHS model.
///
/// Unsteerable verdicts carry a model re-verified by direct reconstruction;
/// steerable verdicts carry a witness whose bound is recomputed by the
/// exhaustive strategy sweep. When the certified lower bound cannot clear
/// `dist_tol` and the distance cannot drop below it either, the band is
/// reported as indeterminate rather than guessed.
pub fn decide_unsteerable(sigma: &Assemblage, opts: &SteeringOptions) -> Result<SteeringVerdict> {
    let space = strategy_space_for(sigma, opts.cap)?;
    let mut fw = FwSolver::new(sigma, space.clone(), opts.threads)?;
    let mut gap_target = opts.gap_tol;
    let mut out = fw.run(gap_target, opts.max_iters)?;

    for _refine in 0..4 {
        let distance = out.objective.sqrt();
        let lower_sq = (out.objective - out.gap).max(0.0);
        let lower = lower_sq.sqrt();

        if distance <= opts.dist_tol {
            let model = LhsModel {
                tau: fw.tau(),
                space: space.clone(),
            };
            model.verify_feasible()?;
            let residual = model.reconstruction_residual(sigma);
            if residual > opts.dist_tol + out.gap {
                return Err(Error::Solver(format!(
                    "model residual {residual:.3e} exceeds dist_tol + gap"
                )));
            }
            return Ok(SteeringVerdict {
                tag: SteeringTag::Unsteerable,
                model: Some(model),
                witness: None,
                distance,
                fw_gap: out.gap,
            });
        }

        if lower > opts.dist_tol {
            let model = LhsModel {
                tau: fw.tau(),
                space: space.clone(),
            };
            let witness = witness_from_gradient(sigma, &model)?;
            if witness.margin() > 0.0 {
                return Ok(SteeringVerdict {
                    tag: SteeringTag::Steerable,
                    model: None,
                    witness: Some(witness),
                    distance,
                    fw_gap: out.gap,
                });
            }
            // Positive distance but the gradient functional does not separate
            // yet: the iterate is still too far from the projection. Tighten.
        }

        if out.iterations >= opts.max_iters || gap_target <= f64::EPSILON * 4.0 {
            break;
        }
        gap_target = (gap_target / 256.0).max(f64::EPSILON * 4.0);
        out = fw.run(gap_target, opts.max_iters)?;
    }

    Err(Error::Indeterminate(format!(
        "distance {:.3e} sits inside the tolerance band at gap {:.3e} after {} iterations; \
         tighten gap_tol or raise max_iters",
        out.objective.sqrt(),
        out.gap,
        out.iterations
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;
    use crate::quantum::{
        assemblage_of, fourier_basis, maximally_entangled, product_state, smear_parent_povm,
        Basis, DensityMatrix, MeasurementAssemblage,
    };

    fn comp_fourier_pair(n: usize) -> MeasurementAssemblage {
        MeasurementAssemblage::new(vec![
            Basis::computational(n).projectors(),
            fourier_basis(n).unwrap().projectors(),
        ])
        .unwrap()
    }

    fn qubit(p: f64) -> DensityMatrix {
        DensityMatrix::new(
            ComplexMatrix::from_rows(&[vec![(p, 0.0), (0.0, 0.0)], vec![(0.0, 0.0), (1.0 - p, 0.0)]])
                .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn product_state_assemblage_is_reconstructed_exactly() {
        let rho = product_state(&qubit(0.3), &qubit(0.8)).unwrap();
        let sigma = assemblage_of(&rho, &comp_fourier_pair(2)).unwrap();
        let (model, distance, _gap) =
            nearest_lhs_model(&sigma, &SteeringOptions::default()).unwrap();
        assert!(distance <= 1e-7, "distance {distance}");
        assert!(model.reconstruction_residual(&sigma) <= 1e-7);
    }

    #[test]
    fn single_setting_assemblage_is_unsteerable() {
        let rho = maximally_entangled(2).unwrap();
        let ma = MeasurementAssemblage::new(vec![Basis::computational(2).projectors()]).unwrap();
        let sigma = assemblage_of(&rho, &ma).unwrap();
        let (_, distance, _) = nearest_lhs_model(&sigma, &SteeringOptions::default()).unwrap();
        assert!(distance <= 1e-7, "distance {distance}");
        let verdict = decide_unsteerable(&sigma, &SteeringOptions::default()).unwrap();
        assert_eq!(verdict.tag, SteeringTag::Unsteerable);
    }

    #[test]
    fn bell_state_with_two_fourier_bases_is_steerable() {
        let rho = maximally_entangled(2).unwrap();
        let sigma = assemblage_of(&rho, &comp_fourier_pair(2)).unwrap();
        let verdict = decide_unsteerable(&sigma, &SteeringOptions::default()).unwrap();
        assert_eq!(verdict.tag, SteeringTag::Steerable);
        assert!(verdict.distance > 1e-3);
        let w = verdict.witness.unwrap();
        assert!(w.margin() > 0.0);
        assert!((w.evaluate(&sigma).unwrap() - w.value_on_target()).abs() < 1e-12);
    }

    #[test]
    fn swapped_bell_state_is_steerable() {
        // (|01⟩ + |10⟩)/√2 against the same computational/Fourier pair.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [
            num_complex::Complex64::new(0.0, 0.0),
            num_complex::Complex64::new(s, 0.0),
            num_complex::Complex64::new(s, 0.0),
            num_complex::Complex64::new(0.0, 0.0),
        ];
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        let sigma = assemblage_of(&rho, &comp_fourier_pair(2)).unwrap();
        let verdict = decide_unsteerable(&sigma, &SteeringOptions::default()).unwrap();
        assert_eq!(verdict.tag, SteeringTag::Steerable);
    }

    #[test]
    fn smeared_assemblages_never_steer() {
        // A jointly measurable assemblage from parent smearing admits a model
        // for every state.
        let parent = fourier_basis(2).unwrap().projectors();
        let response = vec![
            vec![vec![0.9, 0.1], vec![0.2, 0.8]],
            vec![vec![0.6, 0.4], vec![0.3, 0.7]],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        ];
        let ma = smear_parent_povm(&parent, &response).unwrap();
        let rho = maximally_entangled(2).unwrap();
        let sigma = assemblage_of(&rho, &ma).unwrap();
        let verdict = decide_unsteerable(&sigma, &SteeringOptions::default()).unwrap();
        assert_eq!(verdict.tag, SteeringTag::Unsteerable);
        assert!(verdict.distance <= 1e-6);
    }

    #[test]
    fn witness_survives_identity_shifts() {
        let rho = maximally_entangled(2).unwrap();
        let sigma = assemblage_of(&rho, &comp_fourier_pair(2)).unwrap();
        let verdict = decide_unsteerable(&sigma, &SteeringOptions::default()).unwrap();
        let w = verdict.witness.unwrap();

        // Adding c_x·I to every outcome of setting x shifts bound and value
        // by Σ_x c_x alike, so the margin is invariant.
        let shifts = [0.37, -0.21];
        let mut shifted: Vec<ComplexMatrix> = Vec::new();
        for x in 0..2 {
            for a in 0..2 {
                shifted.push(
                    w.functional(a, x)
                        .add(&ComplexMatrix::identity(2).scale_re(shifts[x])),
                );
            }
        }
        let space = enumerate_strategies(2, 2, STRATEGY_CAP).unwrap();
        let bound = witness_bound(&shifted, 2, 2, &space).unwrap();
        let mut value = 0.0;
        for x in 0..2 {
            for a in 0..2 {
                value += shifted[x * 2 + a].hs_dot(sigma.member(a, x)).re;
            }
        }
        let total_shift: f64 = shifts.iter().sum();
        assert!((bound - (w.lhs_bound() + total_shift)).abs() < 1e-9);
        assert!((value - (w.value_on_target() + total_shift)).abs() < 1e-12);
        assert!(((value - bound) - w.margin()).abs() < 1e-9);
    }

    #[test]
    fn witness_scores_model_reconstructions_at_most_the_bound() {
        let rho = maximally_entangled(2).unwrap();
        let sigma = assemblage_of(&rho, &comp_fourier_pair(2)).unwrap();
        let verdict = decide_unsteerable(&sigma, &SteeringOptions::default()).unwrap();
        let w = verdict.witness.unwrap();
        // Sample feasible models: flat, single-block rank-one, and the
        // strategy-aligned extreme points. All must score ≤ lhs_bound.
        let space = enumerate_strategies(2, 2, STRATEGY_CAP).unwrap();
        let flat: Vec<ComplexMatrix> =
            vec![ComplexMatrix::identity(2).scale_re(1.0 / 8.0); space.len()];
        let models = std::iter::once(flat).chain((0..space.len()).map(|k| {
            let mut tau = vec![ComplexMatrix::zeros(2, 2); space.len()];
            tau[k] = ComplexMatrix::outer(
                &[num_complex::Complex64::new(1.0, 0.0), num_complex::Complex64::new(0.0, 0.0)],
                &[num_complex::Complex64::new(1.0, 0.0), num_complex::Complex64::new(0.0, 0.0)],
            );
            tau
        }));
        for tau in models {
            let model = LhsModel {
                tau,
                space: space.clone(),
            };
            let cells = model.reconstruct(2, 2);
            assert!(w.evaluate_cells(&cells) <= w.lhs_bound() + 1e-10);
        }
    }

    #[test]
    fn padded_outcome_counts_are_handled() {
        // One trivial single-outcome setting next to a projective one: the
        // ragged grid is padded with zero effects and stays decidable.
        let rho = maximally_entangled(2).unwrap();
        let trivial = crate::quantum::Povm::new(vec![ComplexMatrix::identity(2)]).unwrap();
        let ma = MeasurementAssemblage::new(vec![
            Basis::computational(2).projectors(),
            trivial,
        ])
        .unwrap();
        assert_eq!(ma.outcomes(), 2);
        let sigma = assemblage_of(&rho, &ma).unwrap();
        // Jointly measurable by construction (the trivial setting reveals
        // nothing; the other is a single measurement reshuffled).
        let verdict = decide_unsteerable(&sigma, &SteeringOptions::default()).unwrap();
        assert_eq!(verdict.tag, SteeringTag::Unsteerable);
        assert!(verdict.distance <= 1e-6);
    }

    #[test]
    fn witness_from_perfect_model_is_rejected() {
        let rho = product_state(&qubit(0.5), &qubit(0.2)).unwrap();
        let sigma = assemblage_of(&rho, &comp_fourier_pair(2)).unwrap();
        let (model, distance, _) = nearest_lhs_model(&sigma, &SteeringOptions::default()).unwrap();
        assert!(distance <= 1e-7);
        assert!(matches!(
            witness_from_gradient(&sigma, &model),
            Err(Error::Domain(_))
        ));
    }
}
