//! Python bindings for the gsem library.
//!
//! Exposes the fitting, evaluation, interpretation and benchmark-generation
//! entry points with plain Python types: matrices cross the boundary as
//! nested lists of floats, identifiers as lists of strings. Build the
//! importable module with
//! `cargo build -p gsem-py --release --features extension-module` and place
//! the resulting `libgsem_py.so` on `sys.path` as `gsem_py.so`.

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ndarray::Array2;

use gsem::data::AssociationMatrix;
use gsem::graph::{build_graph, SimilarityGraph};
use gsem::interpret::DiseaseClassMap;
use gsem::model::{CoefficientMatrix, FitOptions};

fn to_py_err(e: gsem::Error) -> PyErr {
    match &e {
        gsem::Error::Io { .. } => PyIOError::new_err(e.to_string()),
        gsem::Error::Numerical(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_array2(rows: Vec<Vec<f64>>, what: &str) -> PyResult<Array2<f64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(PyValueError::new_err(format!("{what}: ragged rows")));
    }
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Array2::from_shape_vec((n, m), flat).map_err(|e| PyValueError::new_err(format!("{what}: {e}")))
}

fn to_rows(values: &Array2<f64>) -> Vec<Vec<f64>> {
    values.rows().into_iter().map(|r| r.to_vec()).collect()
}

fn association_matrix(
    associations: Vec<Vec<f64>>,
    drug_ids: Vec<String>,
    disease_ids: Vec<String>,
) -> PyResult<AssociationMatrix> {
    let values = to_array2(associations, "associations")?;
    AssociationMatrix::new(values, drug_ids, disease_ids).map_err(to_py_err)
}

/// Builds the graph the hyperparameters call for; `None` with alpha > 0 is
/// an error because the smoothness term would have nothing to smooth over.
fn graph_for(
    similarity: Option<Vec<Vec<f64>>>,
    hp: &gsem::Hyperparameters,
    m: usize,
) -> PyResult<SimilarityGraph> {
    match similarity {
        Some(rows) => {
            let raw = to_array2(rows, "similarity")?;
            build_graph(&raw, hp.tau).map_err(to_py_err)
        }
        None if hp.alpha == 0.0 => Ok(SimilarityGraph::empty(m)),
        None => Err(PyValueError::new_err("alpha > 0 needs a similarity matrix")),
    }
}

/// Objective weights: alpha (graph smoothness), beta (ridge), lambda_
/// (sparsity), gamma (diagonal suppression) and tau (similarity threshold).
#[pyclass(name = "Hyperparameters", module = "gsem_py", from_py_object)]
#[derive(Clone)]
pub struct Hyperparameters {
    inner: gsem::Hyperparameters,
}

#[pymethods]
impl Hyperparameters {
    #[new]
    #[pyo3(signature = (alpha=0.0, beta=0.0, lambda_=0.0, gamma=1e4, tau=0.0))]
    fn new(alpha: f64, beta: f64, lambda_: f64, gamma: f64, tau: f64) -> PyResult<Self> {
        let inner = gsem::Hyperparameters {
            alpha,
            beta,
            lambda: lambda_,
            gamma,
            tau,
        };
        inner.validate().map_err(to_py_err)?;
        Ok(Hyperparameters { inner })
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta
    }

    #[getter]
    fn lambda_(&self) -> f64 {
        self.inner.lambda
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }

    #[getter]
    fn tau(&self) -> f64 {
        self.inner.tau
    }

    fn __repr__(&self) -> String {
        format!(
            "Hyperparameters(alpha={}, beta={}, lambda_={}, gamma={}, tau={})",
            self.inner.alpha, self.inner.beta, self.inner.lambda, self.inner.gamma, self.inner.tau
        )
    }
}

/// Outcome of a fitting run.
#[pyclass(name = "FitResult", module = "gsem_py")]
pub struct FitResult {
    inner: gsem::FitResult,
}

#[pymethods]
impl FitResult {
    /// Learned coefficient matrix as nested lists.
    fn coefficients(&self) -> Vec<Vec<f64>> {
        to_rows(self.inner.coefficients.values())
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    #[getter]
    fn objective(&self) -> f64 {
        self.inner.objective()
    }

    /// Objective value after every update, starting at the initial iterate.
    fn objective_history(&self) -> Vec<f64> {
        self.inner.objective_history.clone()
    }

    #[getter]
    fn kkt_residual(&self) -> f64 {
        self.inner.kkt_residual
    }

    #[getter]
    fn sparsity(&self) -> f64 {
        self.inner.coefficients.sparsity()
    }

    fn __repr__(&self) -> String {
        format!(
            "FitResult(iterations={}, converged={}, objective={})",
            self.inner.iterations,
            self.inner.converged,
            self.inner.objective()
        )
    }
}

/// Cross-validation outcome: per-fold AUPR values by ratio.
#[pyclass(name = "EvalReport", module = "gsem_py")]
pub struct EvalReport {
    inner: gsem::EvalReport,
}

#[pymethods]
impl EvalReport {
    #[getter]
    fn ratios(&self) -> Vec<f64> {
        self.inner.ratios.clone()
    }

    /// Mean AUPR per ratio, in ratio order.
    fn means(&self) -> Vec<f64> {
        (0..self.inner.ratios.len())
            .map(|ri| self.inner.mean(ri))
            .collect()
    }

    /// Sample standard deviation of AUPR per ratio.
    fn sds(&self) -> Vec<f64> {
        (0..self.inner.ratios.len())
            .map(|ri| self.inner.sd(ri))
            .collect()
    }

    /// AUPR values indexed `[ratio][fold]`.
    fn aupr(&self) -> Vec<Vec<f64>> {
        self.inner.aupr.clone()
    }

    #[getter]
    fn folds(&self) -> usize {
        self.inner.k
    }

    fn __repr__(&self) -> String {
        format!(
            "EvalReport(folds={}, ratios={:?})",
            self.inner.k, self.inner.ratios
        )
    }
}

/// Disease-similarity analysis of a fitted model against classes.
#[pyclass(name = "Analysis", module = "gsem_py")]
pub struct Analysis {
    inner: gsem::SimilarityAnalysis,
}

#[pymethods]
impl Analysis {
    #[getter]
    fn mean_intra(&self) -> f64 {
        self.inner.mean_intra()
    }

    #[getter]
    fn mean_inter(&self) -> f64 {
        self.inner.mean_inter()
    }

    #[getter]
    fn log10_p(&self) -> f64 {
        self.inner.test.log10_p
    }

    #[getter]
    fn z(&self) -> f64 {
        self.inner.test.z
    }

    /// Pairwise cosine similarities within classes.
    fn intra_values(&self) -> Vec<f64> {
        self.inner.intra_values.clone()
    }

    /// Pairwise cosine similarities across classes.
    fn inter_values(&self) -> Vec<f64> {
        self.inner.inter_values.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "Analysis(mean_intra={:.4}, mean_inter={:.4}, log10_p={:.1})",
            self.inner.mean_intra(),
            self.inner.mean_inter(),
            self.inner.test.log10_p
        )
    }
}

/// Deterministic synthetic benchmark dataset.
#[pyclass(name = "SyntheticData", module = "gsem_py")]
pub struct SyntheticData {
    inner: gsem::synth::SyntheticDataset,
}

#[pymethods]
impl SyntheticData {
    fn associations(&self) -> Vec<Vec<f64>> {
        to_rows(self.inner.associations.values())
    }

    fn similarity(&self) -> Vec<Vec<f64>> {
        to_rows(&self.inner.similarity)
    }

    #[getter]
    fn drug_ids(&self) -> Vec<String> {
        self.inner.associations.drug_ids().to_vec()
    }

    #[getter]
    fn disease_ids(&self) -> Vec<String> {
        self.inner.associations.disease_ids().to_vec()
    }

    /// Raw (disease, class) assignment pairs.
    #[getter]
    fn class_pairs(&self) -> Vec<(String, String)> {
        self.inner.class_pairs.clone()
    }

    #[getter]
    fn n_drugs(&self) -> usize {
        self.inner.associations.n_drugs()
    }

    #[getter]
    fn n_diseases(&self) -> usize {
        self.inner.associations.n_diseases()
    }

    #[getter]
    fn n_positives(&self) -> usize {
        self.inner.associations.n_positives()
    }

    fn __repr__(&self) -> String {
        format!(
            "SyntheticData(n_drugs={}, n_diseases={}, n_positives={})",
            self.n_drugs(),
            self.n_diseases(),
            self.n_positives()
        )
    }
}

/// Fits the coefficient matrix by multiplicative updates.
#[pyfunction]
#[pyo3(signature = (
    associations,
    drug_ids,
    disease_ids,
    hyperparameters,
    similarity=None,
    maxiter=3000,
    tol=1e-3,
    init_bound=1e-2,
    seed=0,
))]
#[allow(clippy::too_many_arguments)]
fn fit(
    associations: Vec<Vec<f64>>,
    drug_ids: Vec<String>,
    disease_ids: Vec<String>,
    hyperparameters: Hyperparameters,
    similarity: Option<Vec<Vec<f64>>>,
    maxiter: usize,
    tol: f64,
    init_bound: f64,
    seed: u64,
) -> PyResult<FitResult> {
    let x = association_matrix(associations, drug_ids, disease_ids)?;
    let hp = hyperparameters.inner;
    let graph = graph_for(similarity, &hp, x.n_diseases())?;
    let opts = FitOptions {
        maxiter,
        tol,
        init_bound,
        seed,
        ..FitOptions::default()
    };
    let inner = gsem::solver::fit(&x, &graph, &hp, &opts).map_err(to_py_err)?;
    Ok(FitResult { inner })
}

/// Cross-validated AUPR over negative-to-positive ratios.
#[pyfunction]
#[pyo3(signature = (
    associations,
    drug_ids,
    disease_ids,
    hyperparameters,
    similarity=None,
    folds=10,
    ratios=vec![1.0, 5.0, 10.0, 15.0, 20.0, 30.0, 40.0, 50.0, 100.0],
    maxiter=3000,
    tol=1e-3,
    seed=0,
))]
#[allow(clippy::too_many_arguments)]
fn cross_validate(
    associations: Vec<Vec<f64>>,
    drug_ids: Vec<String>,
    disease_ids: Vec<String>,
    hyperparameters: Hyperparameters,
    similarity: Option<Vec<Vec<f64>>>,
    folds: usize,
    ratios: Vec<f64>,
    maxiter: usize,
    tol: f64,
    seed: u64,
) -> PyResult<EvalReport> {
    let x = association_matrix(associations, drug_ids, disease_ids)?;
    let hp = hyperparameters.inner;
    let graph = graph_for(similarity, &hp, x.n_diseases())?;
    let opts = FitOptions {
        maxiter,
        tol,
        ..FitOptions::default()
    };
    let inner = gsem::eval::cross_validate(&x, &graph, &hp, &opts, folds, &ratios, seed)
        .map_err(to_py_err)?;
    Ok(EvalReport { inner })
}

/// Area under the precision-recall curve with step interpolation.
#[pyfunction]
fn aupr(scores: Vec<f64>, labels: Vec<bool>) -> PyResult<f64> {
    gsem::eval::aupr(&scores, &labels).map_err(to_py_err)
}

/// Disease-similarity analysis of a coefficient matrix against classes.
#[pyfunction]
fn analyze(
    coefficients: Vec<Vec<f64>>,
    disease_ids: Vec<String>,
    class_pairs: Vec<(String, String)>,
) -> PyResult<Analysis> {
    let values = to_array2(coefficients, "coefficients")?;
    let c = CoefficientMatrix::new(values).map_err(to_py_err)?;
    let known = disease_ids.iter().cloned().collect();
    let classes = DiseaseClassMap::from_pairs(&class_pairs, Some(&known));
    let inner = gsem::interpret::analyze(&c, &disease_ids, &classes).map_err(to_py_err)?;
    Ok(Analysis { inner })
}

/// Rank by singular values above the scaled machine-precision cutoff.
#[pyfunction]
fn numerical_rank(matrix: Vec<Vec<f64>>) -> PyResult<usize> {
    Ok(gsem::linalg::numerical_rank(&to_array2(matrix, "matrix")?))
}

/// Generates the deterministic full-scale benchmark dataset.
#[pyfunction]
#[pyo3(signature = (seed=77))]
fn synthetic_benchmark(seed: u64) -> SyntheticData {
    SyntheticData {
        inner: gsem::synth::benchmark_scale(seed),
    }
}

#[pymodule]
fn gsem_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Hyperparameters>()?;
    m.add_class::<FitResult>()?;
    m.add_class::<EvalReport>()?;
    m.add_class::<Analysis>()?;
    m.add_class::<SyntheticData>()?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(cross_validate, m)?)?;
    m.add_function(wrap_pyfunction!(aupr, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(numerical_rank, m)?)?;
    m.add_function(wrap_pyfunction!(synthetic_benchmark, m)?)?;
    Ok(())
}
