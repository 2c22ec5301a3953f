//! Python bindings: states, measurements, the two deciders and the scene
//! runner, with matrices passed as nested lists of Python complex numbers.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use lhvlab_core::bell::{decide_bell_local, BellOptions, BellTag};
use lhvlab_core::error::Error;
use lhvlab_core::linalg::{schmidt, ComplexMatrix};
use lhvlab_core::quantum::{
    self, assemblage_of, correlations_of, fourier_basis, is_disjoint, Basis, DensityMatrix,
    MeasurementAssemblage, Povm,
};
use lhvlab_core::scene::{run_scene, ParamOverrides, Scene};
use lhvlab_core::steering::{
    criterion_disjoint_bases, decide_unsteerable, steering_measurements_for_pure,
    SteeringOptions, SteeringTag,
};

type PyMatrix = Vec<Vec<Complex64>>;

fn to_err(e: Error) -> PyErr {
    match e {
        Error::Solver(_) | Error::Convergence { .. } | Error::Indeterminate(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        other => PyValueError::new_err(other.to_string()),
    }
}

fn matrix_from_py(rows: &PyMatrix) -> PyResult<ComplexMatrix> {
    let cols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != cols) {
        return Err(PyValueError::new_err("ragged matrix"));
    }
    let entries: Vec<Complex64> = rows.iter().flatten().copied().collect();
    ComplexMatrix::from_entries(rows.len(), cols, entries).map_err(to_err)
}

fn matrix_to_py(m: &ComplexMatrix) -> PyMatrix {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect())
        .collect()
}

/// A bipartite density matrix with an explicit dim_a·dim_b split.
#[pyclass(name = "State", from_py_object)]
#[derive(Clone)]
struct PyState {
    rho: DensityMatrix,
    dim_a: usize,
    dim_b: usize,
}

#[pymethods]
impl PyState {
    #[new]
    fn new(matrix: PyMatrix, dim_a: usize, dim_b: usize) -> PyResult<Self> {
        let m = matrix_from_py(&matrix)?;
        if m.rows() != dim_a * dim_b {
            return Err(PyValueError::new_err("matrix size is not dim_a*dim_b"));
        }
        Ok(Self {
            rho: DensityMatrix::new(m).map_err(to_err)?,
            dim_a,
            dim_b,
        })
    }

    #[staticmethod]
    fn from_pure(vector: Vec<Complex64>, dim_a: usize, dim_b: usize) -> PyResult<Self> {
        if vector.len() != dim_a * dim_b {
            return Err(PyValueError::new_err("vector length is not dim_a*dim_b"));
        }
        Ok(Self {
            rho: DensityMatrix::from_pure(&vector).map_err(to_err)?,
            dim_a,
            dim_b,
        })
    }

    #[staticmethod]
    fn maximally_entangled(n: usize) -> PyResult<Self> {
        Ok(Self {
            rho: quantum::maximally_entangled(n).map_err(to_err)?,
            dim_a: n,
            dim_b: n,
        })
    }

    #[getter]
    fn dim_a(&self) -> usize {
        self.dim_a
    }

    #[getter]
    fn dim_b(&self) -> usize {
        self.dim_b
    }

    fn matrix(&self) -> PyMatrix {
        matrix_to_py(self.rho.matrix())
    }

    /// Schmidt coefficients of a pure state.
    fn schmidt_coefficients(&self) -> PyResult<Vec<f64>> {
        let psi = self.rho.pure_vector().map_err(to_err)?;
        let dec = schmidt(&psi, self.dim_a, self.dim_b, 1e-9).map_err(to_err)?;
        Ok(dec.coefficients.clone())
    }
}

/// A POVM given by its effect matrices.
#[pyclass(name = "Povm", from_py_object)]
#[derive(Clone)]
struct PyPovm {
    povm: Povm,
}

#[pymethods]
impl PyPovm {
    #[new]
    fn new(effects: Vec<PyMatrix>) -> PyResult<Self> {
        let mats = effects
            .iter()
            .map(matrix_from_py)
            .collect::<PyResult<Vec<_>>>()?;
        Ok(Self {
            povm: Povm::new(mats).map_err(to_err)?,
        })
    }

    #[staticmethod]
    fn computational(dim: usize) -> Self {
        Self {
            povm: Basis::computational(dim).projectors(),
        }
    }

    #[staticmethod]
    #[pyo3(signature = (n, conjugated = false))]
    fn fourier(n: usize, conjugated: bool) -> PyResult<Self> {
        let b = fourier_basis(n).map_err(to_err)?;
        let b = if conjugated { b.conjugate() } else { b };
        Ok(Self { povm: b.projectors() })
    }

    #[getter]
    fn outcomes(&self) -> usize {
        self.povm.outcomes()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.povm.dim()
    }

    fn effects(&self) -> Vec<PyMatrix> {
        self.povm.effects().map(matrix_to_py).collect()
    }
}

#[pyclass(name = "BellVerdict")]
struct PyBellVerdict {
    #[pyo3(get)]
    local: bool,
    #[pyo3(get)]
    residual: f64,
    #[pyo3(get)]
    model_weights: Option<Vec<Vec<f64>>>,
    #[pyo3(get)]
    witness_margin: Option<f64>,
}

#[pyclass(name = "SteeringVerdict")]
struct PySteeringVerdict {
    #[pyo3(get)]
    steerable: bool,
    #[pyo3(get)]
    distance: f64,
    #[pyo3(get)]
    fw_gap: f64,
    #[pyo3(get)]
    witness_margin: Option<f64>,
    model_tau: Option<Vec<ComplexMatrix>>,
}

#[pymethods]
impl PySteeringVerdict {
    /// LHS model operators when the verdict is unsteerable.
    fn model(&self) -> Option<Vec<PyMatrix>> {
        self.model_tau
            .as_ref()
            .map(|tau| tau.iter().map(matrix_to_py).collect())
    }
}

fn assemblage_from_py(povms: Vec<PyPovm>) -> PyResult<MeasurementAssemblage> {
    MeasurementAssemblage::new(povms.into_iter().map(|p| p.povm).collect()).map_err(to_err)
}

/// Joint correlations P(a,b|x,y) as a nested list [x][y][a][b].
#[pyfunction]
fn correlations(state: &PyState, alice: Vec<PyPovm>, bob: Vec<PyPovm>) -> PyResult<Vec<Vec<Vec<Vec<f64>>>>> {
    let ma = assemblage_from_py(alice)?;
    let nb = assemblage_from_py(bob)?;
    let p = correlations_of(&state.rho, &ma, &nb).map_err(to_err)?;
    Ok((0..p.settings_a())
        .map(|x| {
            (0..p.settings_b())
                .map(|y| {
                    (0..p.outcomes_a())
                        .map(|a| (0..p.outcomes_b()).map(|b| p.get(a, b, x, y)).collect())
                        .collect()
                })
                .collect()
        })
        .collect())
}

/// Decide Bell locality of the scenario (state, alice, bob).
#[pyfunction]
#[pyo3(signature = (state, alice, bob, feas_tol = 1e-7))]
fn bell_decide(
    state: &PyState,
    alice: Vec<PyPovm>,
    bob: Vec<PyPovm>,
    feas_tol: f64,
) -> PyResult<PyBellVerdict> {
    let ma = assemblage_from_py(alice)?;
    let nb = assemblage_from_py(bob)?;
    let p = correlations_of(&state.rho, &ma, &nb).map_err(to_err)?;
    let opts = BellOptions {
        feas_tol,
        ..BellOptions::default()
    };
    let verdict = decide_bell_local(&p, &opts).map_err(to_err)?;
    Ok(PyBellVerdict {
        local: verdict.tag == BellTag::Local,
        residual: verdict.residual,
        model_weights: verdict.model.as_ref().map(|m| m.weight_grid()),
        witness_margin: verdict.witness.as_ref().map(|w| w.margin()),
    })
}

/// Decide steerability from A to B for the state under Alice's POVMs.
#[pyfunction]
#[pyo3(signature = (state, alice, dist_tol = 1e-6, gap_tol = 1e-8, max_iters = 50_000))]
fn steering_decide(
    state: &PyState,
    alice: Vec<PyPovm>,
    dist_tol: f64,
    gap_tol: f64,
    max_iters: usize,
) -> PyResult<PySteeringVerdict> {
    let ma = assemblage_from_py(alice)?;
    let sigma = assemblage_of(&state.rho, &ma).map_err(to_err)?;
    let opts = SteeringOptions {
        dist_tol,
        gap_tol,
        max_iters,
        ..SteeringOptions::default()
    };
    let verdict = decide_unsteerable(&sigma, &opts).map_err(to_err)?;
    Ok(PySteeringVerdict {
        steerable: verdict.tag == SteeringTag::Steerable,
        distance: verdict.distance,
        fw_gap: verdict.fw_gap,
        witness_margin: verdict.witness.as_ref().map(|w| w.margin()),
        model_tau: verdict.model.as_ref().map(|m| m.tau().to_vec()),
    })
}

/// Check the rank-one disjoint-direction criterion for (state, P, Q).
/// Returns (c, d) weights when the certificate exists.
#[pyfunction]
#[pyo3(signature = (state, p, q, tol = 1e-8))]
fn criterion(
    state: &PyState,
    p: &PyPovm,
    q: &PyPovm,
    tol: f64,
) -> PyResult<Option<(Vec<f64>, Vec<f64>)>> {
    let cert = criterion_disjoint_bases(&state.rho, &p.povm, &q.povm, tol).map_err(to_err)?;
    Ok(cert.map(|c| (c.c().to_vec(), c.d().to_vec())))
}

/// Build the steering measurement pair for an entangled pure state.
#[pyfunction]
#[pyo3(signature = (state, rank_tol = 1e-9))]
fn construct_measurements(state: &PyState, rank_tol: f64) -> PyResult<(PyPovm, PyPovm)> {
    let (p, q) = steering_measurements_for_pure(&state.rho, rank_tol).map_err(to_err)?;
    Ok((PyPovm { povm: p }, PyPovm { povm: q }))
}

/// True iff the n-point Fourier basis is disjoint from the computational one.
#[pyfunction]
#[pyo3(signature = (n, tol = 1e-9))]
fn fourier_disjoint(n: usize, tol: f64) -> PyResult<bool> {
    let e = Basis::computational(n);
    let f = fourier_basis(n).map_err(to_err)?;
    is_disjoint(&e, &f, tol).map_err(to_err)
}

/// Run a JSON scene string; returns the JSON report.
#[pyfunction]
fn run_scene_json(scene_json: &str) -> PyResult<String> {
    let scene = Scene::from_json(scene_json).map_err(to_err)?;
    let report = run_scene(&scene, &ParamOverrides::default()).map_err(to_err)?;
    report.to_json().map_err(to_err)
}

#[pymodule]
fn lhvlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyState>()?;
    m.add_class::<PyPovm>()?;
    m.add_class::<PyBellVerdict>()?;
    m.add_class::<PySteeringVerdict>()?;
    m.add_function(wrap_pyfunction!(correlations, m)?)?;
    m.add_function(wrap_pyfunction!(bell_decide, m)?)?;
    m.add_function(wrap_pyfunction!(steering_decide, m)?)?;
    m.add_function(wrap_pyfunction!(criterion, m)?)?;
    m.add_function(wrap_pyfunction!(construct_measurements, m)?)?;
    m.add_function(wrap_pyfunction!(fourier_disjoint, m)?)?;
    m.add_function(wrap_pyfunction!(run_scene_json, m)?)?;
    Ok(())
}
