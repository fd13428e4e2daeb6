//! Model parameters, objective function and gradient.
//!
//! The model approximates the association matrix `X` by `X * C` where `C`
//! is non-negative and square over diseases. Fitting minimises
//!
//! ```text
//! Q(C) = 1/2 ||X - XC||_F^2 + beta/2 ||C||_F^2 + lambda ||C||_1
//!        + alpha/2 Tr(C L C^T) + gamma Tr(C)
//! ```
//!
//! subject to `C >= 0`. Since `C` is non-negative, `||C||_1` is the plain
//! entry sum, which keeps the objective smooth on the feasible region. The
//! smoothness term is defined canonically as `Tr(C L C^T)`; for a symmetric
//! adjacency it equals the sum of `w_ij ||c_i - c_j||^2` over unordered
//! pairs of columns, which the tests verify directly.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::data::AssociationMatrix;
use crate::error::{Error, Result};
use crate::graph::SimilarityGraph;

/// Penalty weights of the objective plus the graph threshold.
///
/// `tau` is carried here because tuning treats it as a fourth
/// hyperparameter: changing it rebuilds the graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparameters {
    /// Smoothness weight on `Tr(C L C^T)`.
    pub alpha: f64,
    /// Ridge weight on the squared Frobenius norm.
    pub beta: f64,
    /// Sparsity weight on the entry sum.
    pub lambda: f64,
    /// Diagonal penalty weight on `Tr(C)`; large by default so that
    /// diseases do not trivially express themselves.
    pub gamma: f64,
    /// Similarity threshold used when building the graph.
    pub tau: f64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters {
            alpha: 0.0,
            beta: 0.0,
            lambda: 0.0,
            gamma: 1e4,
            tau: 0.0,
        }
    }
}

impl Hyperparameters {
    /// Checks ranges: weights must be finite and non-negative, `tau` must
    /// lie in `[0, 1]`.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("lambda", self.lambda),
            ("gamma", self.gamma),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        if !self.tau.is_finite() || !(0.0..=1.0).contains(&self.tau) {
            return Err(Error::InvalidArgument(format!(
                "tau must lie in [0, 1], got {}",
                self.tau
            )));
        }
        Ok(())
    }
}

/// Controls for the fitting loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitOptions {
    /// Iteration cap.
    pub maxiter: usize,
    /// Stop once the relative coefficient change drops below this.
    pub tol: f64,
    /// Upper bound `b` of the uniform `[0, b)` initialisation.
    pub init_bound: f64,
    /// Small constant added to update denominators and to the stopping
    /// rule denominator to avoid division by zero.
    pub epsilon: f64,
    /// Seed for coefficient initialisation.
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            maxiter: 3000,
            tol: 1e-3,
            init_bound: 1e-2,
            epsilon: 1e-16,
            seed: 0,
        }
    }
}

impl FitOptions {
    pub fn validate(&self) -> Result<()> {
        if self.maxiter == 0 {
            return Err(Error::InvalidArgument("maxiter must be positive".into()));
        }
        for (name, v) in [
            ("tol", self.tol),
            ("init_bound", self.init_bound),
            ("epsilon", self.epsilon),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Learned non-negative square coefficient matrix.
///
/// Construction validates shape, finiteness and the sign constraint, so a
/// value of this type always satisfies them.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    values: Array2<f64>,
}

impl CoefficientMatrix {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        let (rows, cols) = values.dim();
        if rows != cols {
            return Err(Error::InvalidData(format!(
                "coefficient matrix must be square, got {rows}x{cols}"
            )));
        }
        for ((i, j), &v) in values.indexed_iter() {
            if !v.is_finite() {
                return Err(Error::Numerical(format!(
                    "coefficient entry ({i}, {j}) is {v}"
                )));
            }
            if v < 0.0 {
                return Err(Error::InvalidData(format!(
                    "coefficient entry ({i}, {j}) is negative: {v}"
                )));
            }
        }
        Ok(CoefficientMatrix { values })
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values
    }

    /// Matrix dimension (number of diseases).
    pub fn size(&self) -> usize {
        self.values.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.values.diag().sum()
    }

    /// Largest diagonal entry; diagnostic for the gamma penalty.
    pub fn max_diagonal(&self) -> f64 {
        self.values.diag().iter().cloned().fold(0.0, f64::max)
    }

    /// Fraction of entries that are exactly zero.
    pub fn sparsity(&self) -> f64 {
        let zeros = self.values.iter().filter(|&&v| v == 0.0).count();
        zeros as f64 / (self.size() * self.size()) as f64
    }
}

/// The five objective terms, stored separately for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObjectiveTerms {
    /// `1/2 ||X - XC||_F^2`
    pub reconstruction: f64,
    /// `beta/2 ||C||_F^2`
    pub ridge: f64,
    /// `lambda * sum(C)`
    pub l1: f64,
    /// `alpha/2 * Tr(C L C^T)`
    pub smoothness: f64,
    /// `gamma * Tr(C)`
    pub diagonal: f64,
}

impl ObjectiveTerms {
    pub fn total(&self) -> f64 {
        self.reconstruction + self.ridge + self.l1 + self.smoothness + self.diagonal
    }
}

fn check_shapes(
    x: &AssociationMatrix,
    c: &CoefficientMatrix,
    graph: &SimilarityGraph,
) -> Result<()> {
    if c.size() != x.n_diseases() {
        return Err(Error::DimensionMismatch {
            context: "coefficient matrix vs diseases",
            expected: x.n_diseases(),
            got: c.size(),
        });
    }
    if graph.size() != x.n_diseases() {
        return Err(Error::DimensionMismatch {
            context: "similarity graph vs diseases",
            expected: x.n_diseases(),
            got: graph.size(),
        });
    }
    Ok(())
}

/// Smoothness energy `Tr(C L C^T)` of the coefficient columns over the graph.
///
/// Zero when all columns are equal or the graph has no edges. For symmetric
/// `W` this equals the sum of `w_ij ||c_i - c_j||^2` over unordered pairs.
pub fn dirichlet_energy(c: &CoefficientMatrix, graph: &SimilarityGraph) -> Result<f64> {
    if c.size() != graph.size() {
        return Err(Error::DimensionMismatch {
            context: "coefficient matrix vs graph",
            expected: graph.size(),
            got: c.size(),
        });
    }
    // Tr(C L C^T) = sum_ij (C L)_ij C_ij.
    let cl = c.values().dot(graph.laplacian());
    Ok((&cl * c.values()).sum())
}

/// Evaluates the objective term by term.
pub fn objective_terms(
    x: &AssociationMatrix,
    c: &CoefficientMatrix,
    graph: &SimilarityGraph,
    hp: &Hyperparameters,
) -> Result<ObjectiveTerms> {
    check_shapes(x, c, graph)?;
    hp.validate()?;
    let residual = x.values() - &x.values().dot(c.values());
    let reconstruction = 0.5 * residual.iter().map(|v| v * v).sum::<f64>();
    let ridge = 0.5 * hp.beta * c.values().iter().map(|v| v * v).sum::<f64>();
    let l1 = hp.lambda * c.values().sum();
    // Skipped entirely at alpha = 0 so that the value never depends on the
    // graph argument in the plain self-expressive case.
    let smoothness = if hp.alpha == 0.0 {
        0.0
    } else {
        0.5 * hp.alpha * dirichlet_energy(c, graph)?
    };
    let diagonal = hp.gamma * c.trace();
    Ok(ObjectiveTerms {
        reconstruction,
        ridge,
        l1,
        smoothness,
        diagonal,
    })
}

/// Objective value `Q(C)`; the sum of the five terms.
pub fn objective(
    x: &AssociationMatrix,
    c: &CoefficientMatrix,
    graph: &SimilarityGraph,
    hp: &Hyperparameters,
) -> Result<f64> {
    Ok(objective_terms(x, c, graph, hp)?.total())
}

/// Gradient of the objective on the feasible region:
/// `X^T X C + alpha C L + beta C + lambda 1 + gamma I - X^T X`.
///
/// `lambda` is added to every entry and `gamma` to the diagonal. The graph
/// term is skipped entirely at `alpha = 0`.
pub fn gradient(
    x: &AssociationMatrix,
    c: &CoefficientMatrix,
    graph: &SimilarityGraph,
    hp: &Hyperparameters,
) -> Result<Array2<f64>> {
    check_shapes(x, c, graph)?;
    hp.validate()?;
    let xtx = x.values().t().dot(x.values());
    let mut grad = xtx.dot(c.values());
    grad.scaled_add(hp.beta, c.values());
    if hp.alpha != 0.0 {
        grad.scaled_add(hp.alpha, &c.values().dot(graph.laplacian()));
    }
    grad += hp.lambda;
    grad -= &xtx;
    for i in 0..c.size() {
        grad[(i, i)] += hp.gamma;
    }
    Ok(grad)
}
