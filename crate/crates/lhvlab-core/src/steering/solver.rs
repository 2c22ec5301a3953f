//! Frank–Wolfe minimization of the squared Hilbert–Schmidt distance from a
//! target assemblage to the set of model-reachable assemblages
//!
//! ```text
//! { Σ_k δ_{a,J_k(x)}·τ_k : τ_k ⪰ 0, Σ_k tr(τ_k) = 1 }.
//! ```
//!
//! The feasible set is the convex hull of rank-one atoms (one unit-trace
//! projector placed on a single strategy block), so the linear minimization
//! oracle is a minimum-eigenpair computation per block. Iterates are kept as
//! explicit convex combinations of atoms; each outer step re-optimizes the
//! weights over the collected atoms exactly (corrective weight solve à la
//! Wolfe's minimum-norm-point), which reaches machine-precision objectives on
//! feasible instances instead of the 1/t tail of the plain method. The
//! standard duality gap ⟨∇f, τ⟩ − min_k λ_min(∇f_k) certifies how far the
//! objective can still descend.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen_raw, ComplexMatrix};
use crate::quantum::Assemblage;
use crate::strategies::StrategySpace;

/// A rank-one feasible extreme point: the projector |v⟩⟨v| on block `block`.
#[derive(Debug, Clone)]
struct Atom {
    block: usize,
    outer: ComplexMatrix,
    /// Image under the reconstruction map, vectorized over all cells.
    phi: Vec<f64>,
}

/// Solver state; reusable across `run` calls so the caller can tighten the
/// gap target without restarting.
pub(crate) struct FwSolver {
    targets: Vec<ComplexMatrix>,
    target_vec: Vec<f64>,
    outcomes: usize,
    settings: usize,
    dim: usize,
    space: StrategySpace,
    pool: Option<rayon::ThreadPool>,
    atoms: Vec<Atom>,
    weights: Vec<f64>,
    iterations: usize,
}

/// Result of a solve: objective, certificate gap and bookkeeping.
#[derive(Debug, Clone)]
pub(crate) struct FwOutcome {
    pub objective: f64,
    pub gap: f64,
    pub iterations: usize,
}

struct Eval {
    f: f64,
    gap: f64,
    /// Blocks worth adding as atoms, most negative eigenvalue first.
    candidates: Vec<(usize, Vec<Complex64>)>,
}

impl FwSolver {
    pub fn new(sigma: &Assemblage, space: StrategySpace, threads: usize) -> Result<Self> {
        let (o, m, d) = (sigma.outcomes(), sigma.settings(), sigma.dim_b());
        let targets: Vec<ComplexMatrix> = (0..m)
            .flat_map(|x| (0..o).map(move |a| (a, x)))
            .map(|(a, x)| sigma.member(a, x).clone())
            .collect();
        let cell_len = d * d;
        let mut target_vec = vec![0.0; o * m * cell_len];
        for (c, t) in targets.iter().enumerate() {
            vectorize_hermitian(t, &mut target_vec[c * cell_len..(c + 1) * cell_len]);
        }
        let pool = if threads > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .map_err(|e| Error::Solver(format!("thread pool: {e}")))?,
            )
        } else {
            None
        };
        let mut solver = Self {
            targets,
            target_vec,
            outcomes: o,
            settings: m,
            dim: d,
            space,
            pool,
            atoms: Vec::new(),
            weights: Vec::new(),
            iterations: 0,
        };
        solver.seed();
        Ok(solver)
    }

    /// Initial feasible point: the flat model τ_k = I/(N·d) when small, a
    /// single canonical atom otherwise.
    fn seed(&mut self) {
        let n = self.space.len();
        if n * self.dim <= 512 {
            let w = 1.0 / (n * self.dim) as f64;
            for k in 0..n {
                for j in 0..self.dim {
                    let mut v = vec![Complex64::new(0.0, 0.0); self.dim];
                    v[j] = Complex64::new(1.0, 0.0);
                    self.push_atom(k, v, w);
                }
            }
        } else {
            let mut v = vec![Complex64::new(0.0, 0.0); self.dim];
            v[0] = Complex64::new(1.0, 0.0);
            self.push_atom(0, v, 1.0);
        }
    }

    fn push_atom(&mut self, block: usize, v: Vec<Complex64>, weight: f64) {
        let outer = ComplexMatrix::outer(&v, &v);
        let phi = self.atom_image(block, &outer);
        self.atoms.push(Atom { block, outer, phi });
        self.weights.push(weight);
    }

    fn atom_image(&self, block: usize, outer: &ComplexMatrix) -> Vec<f64> {
        let cell_len = self.dim * self.dim;
        let mut phi = vec![0.0; self.outcomes * self.settings * cell_len];
        let mut cell_vec = vec![0.0; cell_len];
        vectorize_hermitian(outer, &mut cell_vec);
        let j = self.space.strategy(block);
        for x in 0..self.settings {
            let cell = x * self.outcomes + j.outcome(x);
            phi[cell * cell_len..(cell + 1) * cell_len].copy_from_slice(&cell_vec);
        }
        phi
    }

    /// R_{a|x} = Σ_k δ_{a,J_k(x)} τ_k for the current weights.
    fn reconstruction(&self) -> Vec<ComplexMatrix> {
        let mut cells =
            vec![ComplexMatrix::zeros(self.dim, self.dim); self.outcomes * self.settings];
        for (atom, &w) in self.atoms.iter().zip(&self.weights) {
            if w == 0.0 {
                continue;
            }
            let j = self.space.strategy(atom.block);
            let scaled = atom.outer.scale_re(w);
            for x in 0..self.settings {
                let cell = x * self.outcomes + j.outcome(x);
                cells[cell] = cells[cell].add(&scaled);
            }
        }
        cells
    }

    /// τ_k matrices for the current weights.
    pub fn tau(&self) -> Vec<ComplexMatrix> {
        let mut tau = vec![ComplexMatrix::zeros(self.dim, self.dim); self.space.len()];
        for (atom, &w) in self.atoms.iter().zip(&self.weights) {
            if w == 0.0 {
                continue;
            }
            tau[atom.block] = tau[atom.block].add(&atom.outer.scale_re(w));
        }
        tau
    }

    fn evaluate(&self) -> Result<Eval> {
        let recon = self.reconstruction();
        let diffs: Vec<ComplexMatrix> = recon
            .iter()
            .zip(&self.targets)
            .map(|(r, t)| r.sub(t))
            .collect();
        let f: f64 = diffs.iter().map(|d| d.frobenius_norm().powi(2)).sum();
        let grad_dot_tau: f64 = 2.0
            * diffs
                .iter()
                .zip(&recon)
                .map(|(d, r)| d.hs_dot(r).re)
                .sum::<f64>();

        // Per-block gradient G_k = 2 Σ_x (R − σ)_{J_k(x)|x}; minimum eigenpair
        // per block is the linear minimization oracle.
        let blocks: Vec<usize> = (0..self.space.len()).collect();
        let per_block = |k: &usize| -> Result<(usize, f64, Vec<Complex64>)> {
            let j = self.space.strategy(*k);
            let mut g = ComplexMatrix::zeros(self.dim, self.dim);
            for x in 0..self.settings {
                g = g.add(&diffs[x * self.outcomes + j.outcome(x)]);
            }
            let g = g.scale_re(2.0);
            let eig = hermitian_eigen_raw(&g)?;
            Ok((*k, eig.min(), eig.min_vector()))
        };
        let mut results: Vec<(usize, f64, Vec<Complex64>)> = match &self.pool {
            Some(pool) => {
                pool.install(|| blocks.par_iter().map(per_block).collect::<Result<Vec<_>>>())?
            }
            None => blocks.iter().map(per_block).collect::<Result<Vec<_>>>()?,
        };
        // Deterministic reduction order regardless of thread scheduling.
        results.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));

        let lmo_value = results.first().map(|r| r.1).unwrap_or(0.0);
        let gap = grad_dot_tau - lmo_value;
        let candidates = results
            .into_iter()
            .filter(|(_, lam, _)| *lam < grad_dot_tau - 1e-15)
            .take(8)
            .map(|(k, _, v)| (k, v))
            .collect();
        Ok(Eval { f, gap, candidates })
    }

    /// Store new atoms (deduplicated); returns the indices of the entrants,
    /// best candidate first, resolving duplicates to the stored index.
    fn add_candidates(&mut self, candidates: Vec<(usize, Vec<Complex64>)>) -> Vec<usize> {
        let mut entrants = Vec::new();
        for (block, v) in candidates {
            // ⟨v|A|v⟩ ≈ 1 against a stored projector A means the atom is
            // already present.
            let existing = self.atoms.iter().position(|a| {
                a.block == block && {
                    let mut quad = Complex64::new(0.0, 0.0);
                    for i in 0..self.dim {
                        for j in 0..self.dim {
                            quad += v[i].conj() * a.outer.get(i, j) * v[j];
                        }
                    }
                    quad.re > 1.0 - 1e-12
                }
            });
            match existing {
                Some(idx) => entrants.push(idx),
                None => {
                    self.push_atom(block, v, 0.0);
                    entrants.push(self.atoms.len() - 1);
                }
            }
        }
        entrants
    }

    /// Drop negligible atoms and renormalize the total weight to one.
    fn prune(&mut self) {
        let mut keep_atoms = Vec::with_capacity(self.atoms.len());
        let mut keep_weights = Vec::with_capacity(self.weights.len());
        for (atom, &w) in self.atoms.iter().zip(&self.weights) {
            if w > 1e-14 {
                keep_atoms.push(atom.clone());
                keep_weights.push(w);
            }
        }
        if keep_atoms.is_empty() {
            return;
        }
        let total: f64 = keep_weights.iter().sum();
        if total > 0.0 {
            for w in &mut keep_weights {
                *w /= total;
            }
        }
        self.atoms = keep_atoms;
        self.weights = keep_weights;
    }

    /// Exact weight re-optimization over the current atoms: minimize
    /// ‖Φw − s‖² subject to w ≥ 0, Σw = 1.
    ///
    /// Wolfe's minimum-norm-point scheme: the current point is kept as the
    /// affine minimum of its support (the corral, every coordinate positive);
    /// entrants join one at a time, which is what guarantees the entrant
    /// receives positive weight and the objective strictly decreases while
    /// the duality gap is positive. Monotone by construction.
    fn corrective_step(&mut self, entrants: &[usize]) {
        let n = self.atoms.len();
        if n == 0 {
            return;
        }
        let gram: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| dot(&self.atoms[i].phi, &self.atoms[j].phi))
                    .collect()
            })
            .collect();
        let h: Vec<f64> = (0..n)
            .map(|i| dot(&self.atoms[i].phi, &self.target_vec))
            .collect();

        let mut corral: Vec<usize> = (0..n).filter(|&i| self.weights[i] > 0.0).collect();
        // Re-establish the corral invariant for the current support, then
        // admit each entrant in turn.
        self.minor_cycles(&gram, &h, &mut corral);
        for &e in entrants {
            if self.weights[e] > 0.0 || corral.contains(&e) {
                continue;
            }
            corral.push(e);
            self.minor_cycles(&gram, &h, &mut corral);
        }
        let total: f64 = self.weights.iter().sum();
        if total > 0.0 {
            for w in &mut self.weights {
                *w /= total;
            }
        }
    }

    /// Wolfe minor cycles: repeat affine minimization over the corral and
    /// walk to the nonnegativity boundary, dropping the vanished atoms, until
    /// the affine minimum is feasible.
    fn minor_cycles(&mut self, gram: &[Vec<f64>], h: &[f64], corral: &mut Vec<usize>) {
        let max_inner = 2 * corral.len() + 8;
        for _ in 0..max_inner {
            if corral.is_empty() {
                return;
            }
            let Some(u) = solve_affine(gram, h, corral) else {
                return;
            };
            if u.iter().all(|&v| v >= -1e-12) {
                for i in 0..self.weights.len() {
                    if !corral.contains(&i) {
                        self.weights[i] = 0.0;
                    }
                }
                for (idx, &i) in corral.iter().enumerate() {
                    self.weights[i] = u[idx].max(0.0);
                }
                return;
            }
            // Walk from the current point toward u until a weight hits zero.
            let mut gamma = 1.0f64;
            for (idx, &i) in corral.iter().enumerate() {
                if u[idx] < 0.0 {
                    let wi = self.weights[i];
                    let g = wi / (wi - u[idx]);
                    gamma = gamma.min(g.max(0.0));
                }
            }
            for (idx, &i) in corral.iter().enumerate() {
                self.weights[i] += gamma * (u[idx] - self.weights[i]);
                if self.weights[i] < 1e-15 {
                    self.weights[i] = 0.0;
                }
            }
            corral.retain(|&i| self.weights[i] > 0.0);
        }
    }

    /// Guaranteed-descent fallback: exact line search from the current point
    /// toward a single atom. Keeps Σw = 1 and never increases the objective.
    fn line_search_step(&mut self, atom: usize) {
        let cell_len = self.dim * self.dim;
        let total_len = self.outcomes * self.settings * cell_len;
        let mut current = vec![0.0; total_len];
        for (a, &w) in self.atoms.iter().zip(&self.weights) {
            if w == 0.0 {
                continue;
            }
            for (c, p) in current.iter_mut().zip(&a.phi) {
                *c += w * p;
            }
        }
        // direction δ = φ_atom − Φw, residual r = Φw − s.
        let phi = &self.atoms[atom].phi;
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..total_len {
            let delta = phi[i] - current[i];
            let r = current[i] - self.target_vec[i];
            num += r * delta;
            den += delta * delta;
        }
        if den <= 0.0 {
            return;
        }
        let gamma = (-num / den).clamp(0.0, 1.0);
        if gamma == 0.0 {
            return;
        }
        for w in &mut self.weights {
            *w *= 1.0 - gamma;
        }
        self.weights[atom] += gamma;
    }

    /// Iterate until the duality gap is at or below `gap_tol` or the
    /// iteration budget is exhausted. Resumable.
    pub fn run(&mut self, gap_tol: f64, max_iters: usize) -> Result<FwOutcome> {
        let debug = std::env::var_os("LHVLAB_SOLVER_TRACE").is_some();
        let mut eval = self.evaluate()?;
        let mut stall = 0usize;
        while eval.gap > gap_tol && self.iterations < max_iters {
            self.iterations += 1;
            self.prune();
            let f_before = eval.f;
            let entrants = self.add_candidates(eval.candidates);
            self.corrective_step(&entrants);
            let mut next = self.evaluate()?;
            // The corrective solve can stall on ill-conditioned corrals; a
            // plain line-searched step toward the best atom always descends
            // while the gap is positive.
            if next.gap > gap_tol && next.f >= f_before - 1e-15 * (1.0 + f_before) {
                if let Some(&best) = entrants.first() {
                    self.line_search_step(best);
                    next = self.evaluate()?;
                }
            }
            if debug && self.iterations % 100 == 0 {
                eprintln!(
                    "iter {} f {:.6e} gap {:.6e} atoms {}",
                    self.iterations,
                    next.f,
                    next.gap,
                    self.atoms.len()
                );
            }
            if next.f > f_before + 1e-12 * (1.0 + f_before) {
                return Err(Error::Solver(format!(
                    "objective increased from {f_before:.6e} to {:.6e}",
                    next.f
                )));
            }
            if f_before - next.f <= 1e-17 * (1.0 + f_before) {
                stall += 1;
                if stall >= 64 {
                    eval = next;
                    break;
                }
            } else {
                stall = 0;
            }
            eval = next;
        }
        Ok(FwOutcome {
            objective: eval.f.max(0.0),
            gap: eval.gap.max(0.0),
            iterations: self.iterations,
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Real vectorization of a Hermitian matrix preserving the HS inner product:
/// diagonal entries, then √2·(Re, Im) of the upper triangle.
fn vectorize_hermitian(m: &ComplexMatrix, out: &mut [f64]) {
    let d = m.rows();
    let sqrt2 = std::f64::consts::SQRT_2;
    for i in 0..d {
        out[i] = m.get(i, i).re;
    }
    let mut idx = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = m.get(i, j);
            out[idx] = sqrt2 * z.re;
            out[idx + 1] = sqrt2 * z.im;
            idx += 2;
        }
    }
}

/// Solve min ‖Φw − s‖² s.t. Σw = 1 restricted to `corral`, ignoring the
/// nonnegativity constraints, through the KKT system. Falls back to a small
/// ridge when the system is numerically singular.
fn solve_affine(gram: &[Vec<f64>], h: &[f64], corral: &[usize]) -> Option<Vec<f64>> {
    let n = corral.len();
    let dim = n + 1;
    let build = |ridge: f64| -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut a = vec![vec![0.0; dim]; dim];
        let mut b = vec![0.0; dim];
        for (r, &i) in corral.iter().enumerate() {
            for (c, &j) in corral.iter().enumerate() {
                a[r][c] = 2.0 * gram[i][j];
            }
            a[r][r] += ridge;
            a[r][n] = 1.0;
            a[n][r] = 1.0;
            b[r] = 2.0 * h[i];
        }
        b[n] = 1.0;
        (a, b)
    };
    for ridge in [0.0, 1e-12, 1e-9] {
        let (a, b) = build(ridge);
        if let Some(sol) = gaussian_solve(a, b) {
            return Some(sol[..n].to_vec());
        }
    }
    None
}

/// Gaussian elimination with partial pivoting; None on a vanishing pivot.
fn gaussian_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale: f64 = a
        .iter()
        .flat_map(|row| row.iter().map(|v| v.abs()))
        .fold(0.0, f64::max)
        .max(1e-300);
    for col in 0..n {
        let mut best = col;
        for r in (col + 1)..n {
            if a[r][col].abs() > a[best][col].abs() {
                best = r;
            }
        }
        if a[best][col].abs() < 1e-13 * scale {
            return None;
        }
        a.swap(col, best);
        b.swap(col, best);
        let inv = 1.0 / a[col][col];
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = a[r][col] * inv;
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                let v = a[col][c];
                a[r][c] -= factor * v;
            }
            b[r] -= factor * b[col];
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}
