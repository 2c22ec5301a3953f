//! Scene files, reports and the task runner behind the `lhvlab` binary.
//!
//! A scene is a JSON description of a state, the measurement assemblages and
//! one task; the runner validates everything up front, dispatches to the
//! deciders and emits a machine-readable report whose certificate payload is
//! byte-reproducible for identical inputs.

use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bell::{decide_bell_local, BellOptions, BellTag, BellVerdict};
use crate::error::{Error, Result};
use crate::linalg::{swap_subsystems, ComplexMatrix};
use crate::quantum::{
    assemblage_of, correlations_of, fourier_basis, maximally_entangled, pure_from_schmidt, Basis,
    DensityMatrix, MeasurementAssemblage, Povm,
};
use crate::steering::{
    criterion_disjoint_bases, decide_unsteerable, steering_measurements_for_pure, SteeringOptions,
    SteeringTag, SteeringVerdict,
};
use crate::strategies::STRATEGY_CAP;

/// Required scene schema version.
pub const SCHEMA_VERSION: u32 = 1;

/// Complex scalar on the wire: a two-element [re, im] array.
pub type WireComplex = (f64, f64);
/// Matrix on the wire: row-major nested arrays of [re, im] pairs.
pub type WireMatrix = Vec<Vec<WireComplex>>;

fn to_wire(m: &ComplexMatrix) -> WireMatrix {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| (m.get(i, j).re, m.get(i, j).im)).collect())
        .collect()
}

fn from_wire(m: &WireMatrix) -> Result<ComplexMatrix> {
    ComplexMatrix::from_rows(m)
}

/// Exit codes used by the command line tool.
pub mod exit_code {
    pub const SUCCESS: i32 = 0;
    pub const INTERNAL: i32 = 1;
    pub const INPUT: i32 = 2;
    pub const INDETERMINATE: i32 = 4;
    pub const CAPACITY: i32 = 5;
    pub const LOCAL: i32 = 10;
    pub const NONLOCAL: i32 = 11;
    pub const UNSTEERABLE: i32 = 20;
    pub const STEERABLE: i32 = 21;
}

/// Map an error to the exit code contract.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Indeterminate(_) => exit_code::INDETERMINATE,
        Error::Capacity { .. } => exit_code::CAPACITY,
        Error::Solver(_) | Error::Convergence { .. } => exit_code::INTERNAL,
        _ => exit_code::INPUT,
    }
}

/// Basis description in a scene.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisSpec {
    Computational { dim: usize },
    Fourier { n: usize },
    Columns { matrix: WireMatrix },
    UnitaryConjugated { unitary: WireMatrix, base: Box<BasisSpec> },
}

impl BasisSpec {
    fn build(&self) -> Result<Basis> {
        match self {
            BasisSpec::Computational { dim } => {
                if *dim == 0 {
                    return Err(Error::Scene("computational basis needs dim ≥ 1".into()));
                }
                Ok(Basis::computational(*dim))
            }
            BasisSpec::Fourier { n } => fourier_basis(*n),
            BasisSpec::Columns { matrix } => Basis::new(from_wire(matrix)?),
            BasisSpec::UnitaryConjugated { unitary, base } => {
                base.build()?.conjugated_by(&from_wire(unitary)?)
            }
        }
    }
}

/// POVM description in a scene.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PovmSpec {
    Dense {
        effects: Vec<WireMatrix>,
    },
    Basis {
        basis: BasisSpec,
        #[serde(default)]
        conjugated: bool,
    },
}

impl PovmSpec {
    fn build(&self) -> Result<Povm> {
        match self {
            PovmSpec::Dense { effects } => {
                let mats = effects.iter().map(from_wire).collect::<Result<Vec<_>>>()?;
                Povm::new(mats)
            }
            PovmSpec::Basis { basis, conjugated } => {
                let b = basis.build()?;
                let b = if *conjugated { b.conjugate() } else { b };
                Ok(b.projectors())
            }
        }
    }
}

/// State description in a scene.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    Dense {
        dim_a: usize,
        dim_b: usize,
        matrix: WireMatrix,
    },
    Pure {
        dim_a: usize,
        dim_b: usize,
        vector: Vec<WireComplex>,
    },
    MaximallyEntangled {
        n: usize,
    },
    PureSchmidt {
        coefficients: Vec<f64>,
        basis_a: BasisSpec,
        basis_b: BasisSpec,
    },
}

impl StateSpec {
    fn build(&self) -> Result<(DensityMatrix, usize, usize)> {
        match self {
            StateSpec::Dense { dim_a, dim_b, matrix } => {
                let m = from_wire(matrix)?;
                if m.rows() != dim_a * dim_b {
                    return Err(Error::Scene(format!(
                        "state matrix is {}x{} but dim_a·dim_b = {}",
                        m.rows(),
                        m.cols(),
                        dim_a * dim_b
                    )));
                }
                Ok((DensityMatrix::new(m)?, *dim_a, *dim_b))
            }
            StateSpec::Pure { dim_a, dim_b, vector } => {
                if vector.len() != dim_a * dim_b {
                    return Err(Error::Scene(format!(
                        "state vector has length {} but dim_a·dim_b = {}",
                        vector.len(),
                        dim_a * dim_b
                    )));
                }
                let v: Vec<Complex64> = vector.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
                Ok((DensityMatrix::from_pure(&v)?, *dim_a, *dim_b))
            }
            StateSpec::MaximallyEntangled { n } => Ok((maximally_entangled(*n)?, *n, *n)),
            StateSpec::PureSchmidt {
                coefficients,
                basis_a,
                basis_b,
            } => {
                let ba = basis_a.build()?;
                let bb = basis_b.build()?;
                let dims = (ba.dim(), bb.dim());
                Ok((pure_from_schmidt(coefficients, &ba, &bb)?, dims.0, dims.1))
            }
        }
    }
}

/// The task a scene asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Task {
    #[serde(rename = "bell")]
    Bell,
    #[serde(rename = "steer-ab")]
    SteerAb,
    #[serde(rename = "steer-ba")]
    SteerBa,
    #[serde(rename = "criterion")]
    Criterion,
    #[serde(rename = "construct-measurements")]
    ConstructMeasurements,
}

impl Task {
    fn name(&self) -> &'static str {
        match self {
            Task::Bell => "bell",
            Task::SteerAb => "steer-ab",
            Task::SteerBa => "steer-ba",
            Task::Criterion => "criterion",
            Task::ConstructMeasurements => "construct-measurements",
        }
    }
}

/// Solver and tolerance parameters; every field has a default.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct SceneParams {
    pub dist_tol: f64,
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub max_iters: usize,
    pub cap: usize,
    pub threads: usize,
    pub seed: u64,
    pub rank_tol: f64,
    pub criterion_tol: f64,
}

impl Default for SceneParams {
    fn default() -> Self {
        Self {
            dist_tol: 1e-6,
            gap_tol: 1e-8,
            feas_tol: 1e-7,
            max_iters: 50_000,
            cap: STRATEGY_CAP,
            threads: 1,
            seed: 0,
            rank_tol: 1e-9,
            criterion_tol: 1e-8,
        }
    }
}

/// Command-line overrides applied on top of the scene's parameters.
#[derive(Debug, Clone, Copy, Default)]
pub struct ParamOverrides {
    pub dist_tol: Option<f64>,
    pub gap_tol: Option<f64>,
    pub feas_tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
}

impl ParamOverrides {
    fn apply(&self, params: &mut SceneParams) {
        if let Some(v) = self.dist_tol {
            params.dist_tol = v;
        }
        if let Some(v) = self.gap_tol {
            params.gap_tol = v;
        }
        if let Some(v) = self.feas_tol {
            params.feas_tol = v;
        }
        if let Some(v) = self.max_iters {
            params.max_iters = v;
        }
        if let Some(v) = self.threads {
            params.threads = v;
        }
        if let Some(v) = self.seed {
            params.seed = v;
        }
    }
}

/// A parsed scene file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scene {
    pub schema: u32,
    pub state: StateSpec,
    #[serde(default)]
    pub alice_assemblage: Vec<PovmSpec>,
    #[serde(default)]
    pub bob_assemblage: Vec<PovmSpec>,
    pub task: Task,
    #[serde(default)]
    pub params: SceneParams,
}

impl Scene {
    pub fn from_json(text: &str) -> Result<Scene> {
        let scene: Scene = serde_json::from_str(text)?;
        if scene.schema != SCHEMA_VERSION {
            return Err(Error::Scene(format!(
                "unsupported schema version {}, expected {SCHEMA_VERSION}",
                scene.schema
            )));
        }
        Ok(scene)
    }

    pub fn from_path(path: &Path) -> Result<Scene> {
        let text = std::fs::read_to_string(path)?;
        Scene::from_json(&text)
    }
}

/// Certificate payload of a report.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Certificate {
    BellLocalModel {
        weights: Vec<Vec<f64>>,
        reconstruction_residual: f64,
    },
    BellWitness {
        /// coefficients[x][y][a][b]
        coefficients: Vec<Vec<Vec<Vec<f64>>>>,
        local_bound: f64,
        value_on_target: f64,
        margin: f64,
    },
    LhsModel {
        /// τ_k matrices, index-aligned with `assignments`.
        tau: Vec<WireMatrix>,
        /// assignments[k][x] = outcome the k-th strategy gives setting x.
        assignments: Vec<Vec<usize>>,
        reconstruction_residual: f64,
    },
    SteeringWitness {
        /// functionals[x][a] = F(a, x).
        functionals: Vec<Vec<WireMatrix>>,
        lhs_bound: f64,
        value_on_target: f64,
        margin: f64,
    },
    DisjointCriterion {
        e_columns: WireMatrix,
        f_columns: WireMatrix,
        c: Vec<f64>,
        d: Vec<f64>,
        max_cross_overlap: f64,
    },
    MeasurementPair {
        p_effects: Vec<WireMatrix>,
        q_effects: Vec<WireMatrix>,
    },
}

/// Residual block of a report.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Residuals {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reconstruction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fw_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lp_distance: Option<f64>,
}

/// Machine-readable result of a scene run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub tool_version: String,
    pub task: String,
    pub verdict: String,
    pub exit_code: i32,
    pub params: SceneParams,
    pub residuals: Residuals,
    pub wall_time_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// The deterministic part of the report (everything except timing).
    pub fn certificate_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&(
            &self.verdict,
            &self.exit_code,
            &self.certificate,
        ))?)
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let mut s = format!("task {}: verdict {}", self.task, self.verdict);
        if let Some(d) = self.residuals.distance {
            s.push_str(&format!(", distance {d:.6e}"));
        }
        if let Some(g) = self.residuals.fw_gap {
            s.push_str(&format!(", gap {g:.3e}"));
        }
        if let Some(r) = self.residuals.reconstruction {
            s.push_str(&format!(", reconstruction residual {r:.3e}"));
        }
        s
    }
}

fn build_assemblage(specs: &[PovmSpec], expect_dim: usize, who: &str) -> Result<MeasurementAssemblage> {
    if specs.is_empty() {
        return Err(Error::Scene(format!("{who} assemblage is empty")));
    }
    let povms = specs.iter().map(PovmSpec::build).collect::<Result<Vec<_>>>()?;
    if povms.iter().any(|p| p.dim() != expect_dim) {
        return Err(Error::Scene(format!(
            "{who} POVMs must act on dimension {expect_dim}"
        )));
    }
    MeasurementAssemblage::new(povms)
}

fn bell_certificate(verdict: &BellVerdict) -> (String, i32, Residuals, Option<Certificate>) {
    match verdict.tag {
        BellTag::Local => {
            let model = verdict.model.as_ref().expect("local verdict carries a model");
            let cert = Certificate::BellLocalModel {
                weights: model.weight_grid(),
                reconstruction_residual: verdict.residual,
            };
            (
                "local".into(),
                exit_code::LOCAL,
                Residuals {
                    reconstruction: Some(verdict.residual),
                    lp_distance: Some(verdict.residual),
                    ..Default::default()
                },
                Some(cert),
            )
        }
        BellTag::Nonlocal => {
            let w = verdict.witness.as_ref().expect("nonlocal verdict carries a witness");
            let (o_a, o_b, m_a, m_b) = w.shape();
            let coefficients = (0..m_a)
                .map(|x| {
                    (0..m_b)
                        .map(|y| {
                            (0..o_a)
                                .map(|a| (0..o_b).map(|b| w.coefficient(a, b, x, y)).collect())
                                .collect()
                        })
                        .collect()
                })
                .collect();
            let cert = Certificate::BellWitness {
                coefficients,
                local_bound: w.local_bound(),
                value_on_target: w.value_on_target(),
                margin: w.margin(),
            };
            (
                "nonlocal".into(),
                exit_code::NONLOCAL,
                Residuals {
                    lp_distance: Some(verdict.residual),
                    ..Default::default()
                },
                Some(cert),
            )
        }
    }
}

fn steering_certificate(verdict: &SteeringVerdict) -> (String, i32, Residuals, Option<Certificate>) {
    let residuals = Residuals {
        distance: Some(verdict.distance),
        fw_gap: Some(verdict.fw_gap),
        ..Default::default()
    };
    match verdict.tag {
        SteeringTag::Unsteerable => {
            let model = verdict.model.as_ref().expect("unsteerable verdict carries a model");
            let cert = Certificate::LhsModel {
                tau: model.tau().iter().map(to_wire).collect(),
                assignments: model
                    .strategy_space()
                    .iter()
                    .map(|s| s.assignment().to_vec())
                    .collect(),
                reconstruction_residual: verdict.distance,
            };
            ("unsteerable".into(), exit_code::UNSTEERABLE, residuals, Some(cert))
        }
        SteeringTag::Steerable => {
            let w = verdict.witness.as_ref().expect("steerable verdict carries a witness");
            let functionals = (0..w.settings())
                .map(|x| (0..w.outcomes()).map(|a| to_wire(w.functional(a, x))).collect())
                .collect();
            let cert = Certificate::SteeringWitness {
                functionals,
                lhs_bound: w.lhs_bound(),
                value_on_target: w.value_on_target(),
                margin: w.margin(),
            };
            ("steerable".into(), exit_code::STEERABLE, residuals, Some(cert))
        }
    }
}

/// Run a scene and produce its report.
pub fn run_scene(scene: &Scene, overrides: &ParamOverrides) -> Result<Report> {
    let started = Instant::now();
    let mut params = scene.params;
    overrides.apply(&mut params);

    let (rho, dim_a, dim_b) = scene.state.build()?;
    if rho.dim() != dim_a * dim_b {
        return Err(Error::Scene("state dimensions are inconsistent".into()));
    }

    let steering_opts = SteeringOptions {
        dist_tol: params.dist_tol,
        gap_tol: params.gap_tol,
        max_iters: params.max_iters,
        cap: params.cap,
        threads: params.threads,
    };
    let bell_opts = BellOptions {
        feas_tol: params.feas_tol,
        cap: params.cap,
    };

    let (verdict, code, residuals, certificate) = match scene.task {
        Task::Bell => {
            let ma = build_assemblage(&scene.alice_assemblage, dim_a, "alice")?;
            let nb = build_assemblage(&scene.bob_assemblage, dim_b, "bob")?;
            let p = correlations_of(&rho, &ma, &nb)?;
            let verdict = decide_bell_local(&p, &bell_opts)?;
            bell_certificate(&verdict)
        }
        Task::SteerAb => {
            let ma = build_assemblage(&scene.alice_assemblage, dim_a, "alice")?;
            let sigma = assemblage_of(&rho, &ma)?;
            let verdict = decide_unsteerable(&sigma, &steering_opts)?;
            steering_certificate(&verdict)
        }
        Task::SteerBa => {
            let nb = build_assemblage(&scene.bob_assemblage, dim_b, "bob")?;
            let swapped = DensityMatrix::new(swap_subsystems(rho.matrix(), dim_a, dim_b)?)?;
            let sigma = assemblage_of(&swapped, &nb)?;
            let verdict = decide_unsteerable(&sigma, &steering_opts)?;
            steering_certificate(&verdict)
        }
        Task::Criterion => {
            if scene.alice_assemblage.len() != 2 {
                return Err(Error::Scene(
                    "criterion task needs exactly two POVMs in alice_assemblage".into(),
                ));
            }
            let p = scene.alice_assemblage[0].build()?;
            let q = scene.alice_assemblage[1].build()?;
            if p.dim() != dim_a || q.dim() != dim_a {
                return Err(Error::Scene(format!(
                    "criterion POVMs must act on dimension {dim_a}"
                )));
            }
            match criterion_disjoint_bases(&rho, &p, &q, params.criterion_tol)? {
                Some(cert) => {
                    let payload = Certificate::DisjointCriterion {
                        e_columns: to_wire(cert.e_columns()),
                        f_columns: to_wire(cert.f_columns()),
                        c: cert.c().to_vec(),
                        d: cert.d().to_vec(),
                        max_cross_overlap: cert.max_cross_overlap(),
                    };
                    (
                        "steerable".into(),
                        exit_code::STEERABLE,
                        Residuals::default(),
                        Some(payload),
                    )
                }
                None => (
                    "no_certificate".into(),
                    exit_code::SUCCESS,
                    Residuals::default(),
                    None,
                ),
            }
        }
        Task::ConstructMeasurements => {
            if dim_a != dim_b {
                return Err(Error::Scene(
                    "construct-measurements needs equal local dimensions".into(),
                ));
            }
            let (p, q) = steering_measurements_for_pure(&rho, params.rank_tol)?;
            let payload = Certificate::MeasurementPair {
                p_effects: p.effects().map(to_wire).collect(),
                q_effects: q.effects().map(to_wire).collect(),
            };
            (
                "constructed".into(),
                exit_code::SUCCESS,
                Residuals::default(),
                Some(payload),
            )
        }
    };

    Ok(Report {
        schema: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        task: scene.task.name().to_string(),
        verdict,
        exit_code: code,
        params,
        residuals,
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
        certificate,
    })
}

/// Run a scene file; write the report if requested. Returns the report.
pub fn run_scene_file(
    scene_path: &Path,
    out_path: Option<&Path>,
    overrides: &ParamOverrides,
) -> Result<Report> {
    let scene = Scene::from_path(scene_path)?;
    let report = run_scene(&scene, overrides)?;
    if let Some(out) = out_path {
        std::fs::write(out, report.to_json()?)?;
    }
    Ok(report)
}
