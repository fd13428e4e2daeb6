//! Multiplicative-update solver for the coefficient matrix.
//!
//! Starting from a small random non-negative matrix, each iteration rescales
//! every entry by the ratio of the negative and positive parts of the
//! gradient:
//!
//! ```text
//! c_ij <- c_ij * (X^T X + alpha C W)_ij
//!              / ((X^T X C + alpha C D + beta C)_ij + lambda + gamma [i=j] + eps)
//! ```
//!
//! The rule keeps `C` non-negative, fixes entries that are exactly zero and
//! decreases the objective, so the iteration settles at the constrained
//! minimum. Iteration stops when the largest entry change relative to the
//! largest previous entry falls below the tolerance, or at the iteration cap.

use ndarray::{Array1, Array2};

use crate::data::AssociationMatrix;
use crate::error::{Error, Result};
use crate::graph::SimilarityGraph;
use crate::model::{CoefficientMatrix, FitOptions, Hyperparameters, ObjectiveTerms};
use crate::rng::{derive_seed, Rng, TAG_INIT};

/// Outcome of a fitting run.
///
/// Histories include the initial iterate, so `objective_history` and
/// `term_history` hold `iterations + 1` entries while `delta_history` holds
/// one entry per completed update. The stored coefficients have a
/// hard-zeroed diagonal; `max_diagonal` records the largest diagonal entry
/// beforehand as a check on the diagonal penalty.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub coefficients: CoefficientMatrix,
    pub objective_history: Vec<f64>,
    pub term_history: Vec<ObjectiveTerms>,
    pub delta_history: Vec<f64>,
    pub iterations: usize,
    /// True iff the tolerance fired before the iteration cap.
    pub converged: bool,
    /// `max_ij |(grad Q)_ij * c_ij|` at the final iterate (before the
    /// diagonal is zeroed); near zero at a constrained optimum.
    pub kkt_residual: f64,
    /// Same residual at the initial iterate, for scale.
    pub kkt_residual_initial: f64,
    /// Largest diagonal entry before hard-zeroing.
    pub max_diagonal: f64,
    /// Updates where the objective rose by more than 1e-9; expected empty.
    pub monotonicity_violations: usize,
}

impl FitResult {
    /// Final objective value.
    pub fn objective(&self) -> f64 {
        *self
            .objective_history
            .last()
            .expect("history always holds the initial value")
    }
}

/// Draws the initial coefficient matrix, entries i.i.d. uniform on
/// `[0, init_bound)`. Deterministic for a fixed seed.
pub fn init_coefficients(m: usize, opts: &FitOptions) -> Result<CoefficientMatrix> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "coefficient matrix needs dimension >= 2, got {m}"
        )));
    }
    opts.validate()?;
    let mut rng = Rng::new(derive_seed(opts.seed, &[TAG_INIT]));
    let values = Array2::from_shape_fn((m, m), |_| rng.uniform_below(opts.init_bound));
    CoefficientMatrix::new(values)
}

/// One multiplicative update from cached products.
///
/// `g = X^T X C` and `cw = C W` belong to the current iterate; `cw` is only
/// read when `alpha > 0`.
fn update_from_parts(
    c: &Array2<f64>,
    xtx: &Array2<f64>,
    g: &Array2<f64>,
    cw: &Array2<f64>,
    degrees: &Array1<f64>,
    hp: &Hyperparameters,
    epsilon: f64,
) -> Array2<f64> {
    let m = c.nrows();
    let mut next = Array2::zeros((m, m));
    for i in 0..m {
        for j in 0..m {
            let cij = c[(i, j)];
            let mut numer = xtx[(i, j)];
            let mut denom = g[(i, j)] + hp.beta * cij;
            if hp.alpha != 0.0 {
                numer += hp.alpha * cw[(i, j)];
                denom += hp.alpha * cij * degrees[j];
            }
            denom += hp.lambda;
            if i == j {
                denom += hp.gamma;
            }
            next[(i, j)] = cij * numer / (denom + epsilon);
        }
    }
    next
}

/// KKT complementarity residual `max_ij |(grad Q)_ij * c_ij|` from cached
/// products; zero at an exact constrained optimum.
fn kkt_from_parts(
    c: &Array2<f64>,
    xtx: &Array2<f64>,
    g: &Array2<f64>,
    cw: &Array2<f64>,
    degrees: &Array1<f64>,
    hp: &Hyperparameters,
) -> f64 {
    let m = c.nrows();
    let mut worst = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            let cij = c[(i, j)];
            let mut grad = g[(i, j)] + hp.beta * cij + hp.lambda - xtx[(i, j)];
            if hp.alpha != 0.0 {
                grad += hp.alpha * (cij * degrees[j] - cw[(i, j)]);
            }
            if i == j {
                grad += hp.gamma;
            }
            worst = worst.max((grad * cij).abs());
        }
    }
    worst
}

/// Objective terms from cached products; matches the direct evaluation in
/// [`crate::model::objective_terms`] up to rounding.
///
/// Uses `||X - XC||^2 = Tr(X^T X) - 2 Tr(X^T X C) + Tr(C^T X^T X C)` and
/// `Tr(C L C^T) = Tr(C D C^T) - Tr(C W C^T)`, all reduced to elementwise
/// sums over the products already needed by the update.
fn terms_from_parts(
    c: &Array2<f64>,
    xtx: &Array2<f64>,
    tr_xtx: f64,
    g: &Array2<f64>,
    cw: &Array2<f64>,
    degrees: &Array1<f64>,
    hp: &Hyperparameters,
) -> ObjectiveTerms {
    let m = c.nrows();
    let mut tr_xtxc = 0.0;
    let mut tr_ct_xtx_c = 0.0;
    let mut frob = 0.0;
    let mut entry_sum = 0.0;
    let mut trace = 0.0;
    for i in 0..m {
        for j in 0..m {
            let cij = c[(i, j)];
            tr_xtxc += xtx[(j, i)] * cij;
            tr_ct_xtx_c += g[(i, j)] * cij;
            frob += cij * cij;
            entry_sum += cij;
        }
        trace += c[(i, i)];
    }
    let smoothness = if hp.alpha == 0.0 {
        0.0
    } else {
        let mut tr_cdct = 0.0;
        let mut tr_cwct = 0.0;
        for i in 0..m {
            for j in 0..m {
                let cij = c[(i, j)];
                tr_cdct += cij * cij * degrees[j];
                tr_cwct += cw[(i, j)] * cij;
            }
        }
        0.5 * hp.alpha * (tr_cdct - tr_cwct)
    };
    ObjectiveTerms {
        reconstruction: 0.5 * (tr_xtx - 2.0 * tr_xtxc + tr_ct_xtx_c),
        ridge: 0.5 * hp.beta * frob,
        l1: hp.lambda * entry_sum,
        smoothness,
        diagonal: hp.gamma * trace,
    }
}

/// Applies one multiplicative update to `c` given the precomputed `X^T X`.
///
/// Zero entries stay zero and the result is non-negative. `epsilon` guards
/// the denominator against division by zero.
pub fn update_step(
    c: &CoefficientMatrix,
    xtx: &Array2<f64>,
    graph: &SimilarityGraph,
    hp: &Hyperparameters,
    epsilon: f64,
) -> Result<CoefficientMatrix> {
    hp.validate()?;
    let m = c.size();
    if xtx.dim() != (m, m) {
        return Err(Error::DimensionMismatch {
            context: "precomputed X^T X vs coefficients",
            expected: m,
            got: xtx.nrows(),
        });
    }
    if graph.size() != m {
        return Err(Error::DimensionMismatch {
            context: "similarity graph vs coefficients",
            expected: m,
            got: graph.size(),
        });
    }
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be finite and positive, got {epsilon}"
        )));
    }
    let g = xtx.dot(c.values());
    let cw = if hp.alpha != 0.0 {
        c.values().dot(graph.adjacency())
    } else {
        Array2::zeros((m, m))
    };
    let next = update_from_parts(c.values(), xtx, &g, &cw, graph.degrees(), hp, epsilon);
    CoefficientMatrix::new(next)
}

/// Fits the coefficient matrix by iterated multiplicative updates.
///
/// Initialises from the seed in `opts`, precomputes `X^T X` once, then
/// updates until the relative change drops below `opts.tol` or `opts.maxiter`
/// updates have run. Graph products are skipped entirely when `alpha == 0`,
/// so fits in that case are independent of the graph argument. Objective
/// values are recorded every iteration; an update that increases the
/// objective by more than 1e-9 is counted and logged but not fatal. Any
/// non-finite coefficient aborts the run with a numerical error.
pub fn fit(
    x: &AssociationMatrix,
    graph: &SimilarityGraph,
    hp: &Hyperparameters,
    opts: &FitOptions,
) -> Result<FitResult> {
    hp.validate()?;
    opts.validate()?;
    let m = x.n_diseases();
    if graph.size() != m {
        return Err(Error::DimensionMismatch {
            context: "similarity graph vs diseases",
            expected: m,
            got: graph.size(),
        });
    }

    let xtx = x.values().t().dot(x.values());
    let tr_xtx = xtx.diag().sum();
    let degrees = graph.degrees();
    let use_graph = hp.alpha != 0.0;

    let mut c = init_coefficients(m, opts)?.into_values();
    let mut g = xtx.dot(&c);
    let mut cw = if use_graph {
        c.dot(graph.adjacency())
    } else {
        Array2::zeros((m, m))
    };

    let kkt_residual_initial = kkt_from_parts(&c, &xtx, &g, &cw, degrees, hp);

    let mut term_history = Vec::with_capacity(opts.maxiter + 1);
    let mut objective_history = Vec::with_capacity(opts.maxiter + 1);
    let mut delta_history = Vec::with_capacity(opts.maxiter);
    let initial_terms = terms_from_parts(&c, &xtx, tr_xtx, &g, &cw, degrees, hp);
    objective_history.push(initial_terms.total());
    term_history.push(initial_terms);

    let mut iterations = 0;
    let mut converged = false;
    let mut monotonicity_violations = 0;

    for iter in 1..=opts.maxiter {
        let next = update_from_parts(&c, &xtx, &g, &cw, degrees, hp, opts.epsilon);
        if let Some(((i, j), &bad)) = next.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "coefficient ({i}, {j}) became {bad} at iteration {iter}"
            )));
        }
        let delta = relative_change(&c, &next, opts.epsilon)?;

        g = xtx.dot(&next);
        if use_graph {
            cw = next.dot(graph.adjacency());
        }
        let terms = terms_from_parts(&next, &xtx, tr_xtx, &g, &cw, degrees, hp);
        let q = terms.total();
        let q_prev = *objective_history.last().unwrap();
        if q > q_prev + 1e-9 {
            monotonicity_violations += 1;
            log::warn!("objective rose from {q_prev} to {q} at iteration {iter}");
        }
        objective_history.push(q);
        term_history.push(terms);
        delta_history.push(delta);

        c = next;
        iterations = iter;
        if delta < opts.tol {
            converged = true;
            break;
        }
    }

    let kkt_residual = kkt_from_parts(&c, &xtx, &g, &cw, degrees, hp);
    let max_diagonal = c.diag().iter().cloned().fold(0.0, f64::max);
    // The diagonal penalty drives self-expression towards zero; remove the
    // residual exactly so it cannot leak into predictions or similarity.
    for i in 0..m {
        c[(i, i)] = 0.0;
    }

    Ok(FitResult {
        coefficients: CoefficientMatrix::new(c)?,
        objective_history,
        term_history,
        delta_history,
        iterations,
        converged,
        kkt_residual,
        kkt_residual_initial,
        max_diagonal,
        monotonicity_violations,
    })
}

/// Largest entry change relative to the largest absolute entry of the
/// previous iterate:
/// `max_ij |next_ij - prev_ij| / (max_ij |prev_ij| + epsilon)`.
///
/// The denominator is the single global maximum, not per entry.
pub fn relative_change(prev: &Array2<f64>, next: &Array2<f64>, epsilon: f64) -> Result<f64> {
    if prev.dim() != next.dim() {
        return Err(Error::DimensionMismatch {
            context: "iterates in relative_change",
            expected: prev.nrows(),
            got: next.nrows(),
        });
    }
    let scale = prev.iter().fold(0.0f64, |acc, v| acc.max(v.abs())) + epsilon;
    let max_diff = prev
        .iter()
        .zip(next.iter())
        .fold(0.0f64, |acc, (p, n)| acc.max((n - p).abs()));
    Ok(max_diff / scale)
}

/// Predicted association scores `X * C`; higher means stronger evidence.
pub fn predict_scores(x: &AssociationMatrix, c: &CoefficientMatrix) -> Result<Array2<f64>> {
    if c.size() != x.n_diseases() {
        return Err(Error::DimensionMismatch {
            context: "coefficient matrix vs diseases",
            expected: x.n_diseases(),
            got: c.size(),
        });
    }
    Ok(x.values().dot(c.values()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::model::objective;
    use ndarray::array;

    fn ids(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    fn random_binary(rng: &mut Rng, n: usize, m: usize) -> AssociationMatrix {
        loop {
            let values =
                Array2::from_shape_fn((n, m), |_| if rng.uniform() < 0.4 { 1.0 } else { 0.0 });
            if values.sum() > 0.0 {
                return AssociationMatrix::new(values, ids("dr", n), ids("di", m)).unwrap();
            }
        }
    }

    fn random_graph(rng: &mut Rng, m: usize) -> SimilarityGraph {
        let raw = Array2::from_shape_fn((m, m), |_| rng.uniform());
        build_graph(&raw, 0.0).unwrap()
    }

    fn test_hp() -> Hyperparameters {
        Hyperparameters {
            alpha: 1.0,
            beta: 0.1,
            lambda: 0.01,
            gamma: 10.0,
            tau: 0.0,
        }
    }

    #[test]
    fn init_is_reproducible_and_in_range() {
        let opts = FitOptions {
            seed: 7,
            ..FitOptions::default()
        };
        let a = init_coefficients(5, &opts).unwrap();
        let b = init_coefficients(5, &opts).unwrap();
        assert_eq!(a.values(), b.values());
        assert!(a
            .values()
            .iter()
            .all(|&v| (0.0..opts.init_bound).contains(&v)));

        let other = init_coefficients(
            5,
            &FitOptions {
                seed: 8,
                ..FitOptions::default()
            },
        )
        .unwrap();
        assert_ne!(a.values(), other.values());
    }

    #[test]
    fn init_rejects_tiny_dimension() {
        assert!(matches!(
            init_coefficients(1, &FitOptions::default()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn update_fixes_zero_matrix_and_zero_entries() {
        let mut rng = Rng::new(3);
        let x = random_binary(&mut rng, 6, 4);
        let xtx = x.values().t().dot(x.values());
        let g = random_graph(&mut rng, 4);
        let hp = test_hp();

        let zero = CoefficientMatrix::new(Array2::zeros((4, 4))).unwrap();
        let next = update_step(&zero, &xtx, &g, &hp, 1e-16).unwrap();
        assert_eq!(next.values().sum(), 0.0);

        let mut values = Array2::from_elem((4, 4), 0.5);
        values[(1, 2)] = 0.0;
        values[(3, 0)] = 0.0;
        let c = CoefficientMatrix::new(values).unwrap();
        let next = update_step(&c, &xtx, &g, &hp, 1e-16).unwrap();
        assert_eq!(next.values()[(1, 2)], 0.0);
        assert_eq!(next.values()[(3, 0)], 0.0);
        assert!(next.values().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn update_holds_at_exact_fixed_point() {
        // X = [1, 1]: the two disease columns are identical, so the
        // permutation C* = [[0,1],[1,0]] reproduces X exactly and satisfies
        // X^T X C* = X^T X. With all penalties off the update leaves it
        // unchanged up to the epsilon bias in the denominator.
        let x = AssociationMatrix::new(array![[1.0, 1.0]], ids("dr", 1), ids("di", 2)).unwrap();
        let xtx = x.values().t().dot(x.values());
        let c = CoefficientMatrix::new(array![[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let hp = Hyperparameters {
            alpha: 0.0,
            beta: 0.0,
            lambda: 0.0,
            gamma: 0.0,
            tau: 0.0,
        };
        let next = update_step(&c, &xtx, &SimilarityGraph::empty(2), &hp, 1e-16).unwrap();
        for (a, b) in c.values().iter().zip(next.values().iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn update_never_increases_the_objective() {
        let mut rng = Rng::new(11);
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..200 {
            let x = random_binary(&mut rng, 6, 4);
            let xtx = x.values().t().dot(x.values());
            let g = random_graph(&mut rng, 4);
            let c = CoefficientMatrix::new(Array2::from_shape_fn((4, 4), |_| 0.01 + rng.uniform()))
                .unwrap();
            let hp = test_hp();
            let next = update_step(&c, &xtx, &g, &hp, 1e-16).unwrap();
            let before = objective(&x, &c, &g, &hp).unwrap();
            let after = objective(&x, &next, &g, &hp).unwrap();
            worst = worst.max(after - before);
            assert!(next.values().iter().all(|&v| v >= 0.0));
        }
        assert!(worst <= 1e-9, "worst objective increase {worst}");
    }

    #[test]
    fn fit_matches_repeated_update_steps() {
        // Guards the cached-products fast path inside fit against the
        // plain public update_step plus the direct objective evaluation.
        let mut rng = Rng::new(19);
        let x = random_binary(&mut rng, 8, 5);
        let g = random_graph(&mut rng, 5);
        let hp = test_hp();
        let opts = FitOptions {
            maxiter: 25,
            tol: 1e-30,
            seed: 99,
            ..FitOptions::default()
        };

        let result = fit(&x, &g, &hp, &opts).unwrap();
        assert_eq!(result.iterations, 25);
        assert_eq!(result.objective_history.len(), 26);
        assert_eq!(result.delta_history.len(), 25);

        let xtx = x.values().t().dot(x.values());
        let mut c = init_coefficients(5, &opts).unwrap();
        let mut objectives = vec![objective(&x, &c, &g, &hp).unwrap()];
        for _ in 0..25 {
            c = update_step(&c, &xtx, &g, &hp, opts.epsilon).unwrap();
            objectives.push(objective(&x, &c, &g, &hp).unwrap());
        }
        for (fast, slow) in result.objective_history.iter().zip(objectives.iter()) {
            let rel = (fast - slow).abs() / (1.0 + slow.abs());
            assert!(rel < 1e-10, "{fast} vs {slow}");
        }
        // Final coefficients agree except for the hard-zeroed diagonal.
        for ((i, j), &v) in c.values().indexed_iter() {
            let expected = if i == j { 0.0 } else { v };
            let got = result.coefficients.values()[(i, j)];
            assert!((got - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn fit_histories_are_monotone_and_convergence_fires() {
        let mut rng = Rng::new(29);
        let x = random_binary(&mut rng, 10, 8);
        let g = random_graph(&mut rng, 8);
        let opts = FitOptions {
            seed: 1,
            ..FitOptions::default()
        };
        let result = fit(&x, &g, &test_hp(), &opts).unwrap();
        assert!(
            result.converged,
            "no convergence in {} iters",
            result.iterations
        );
        assert_eq!(result.monotonicity_violations, 0);
        for w in result.objective_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-9);
        }
        assert!(*result.delta_history.last().unwrap() < opts.tol);
        assert!(result.coefficients.values().iter().all(|&v| v >= 0.0));
        assert_eq!(result.coefficients.max_diagonal(), 0.0);
    }

    #[test]
    fn fit_reconstruction_term_decreases_on_a_converging_run() {
        let mut rng = Rng::new(31);
        let x = random_binary(&mut rng, 10, 6);
        let g = random_graph(&mut rng, 6);
        let opts = FitOptions {
            seed: 2,
            ..FitOptions::default()
        };
        let result = fit(&x, &g, &test_hp(), &opts).unwrap();
        for w in result.term_history.windows(2) {
            assert!(w[1].reconstruction <= w[0].reconstruction + 1e-9);
        }
    }

    #[test]
    fn fit_with_zero_alpha_is_graph_independent() {
        let mut rng = Rng::new(37);
        let x = random_binary(&mut rng, 8, 6);
        let g1 = random_graph(&mut rng, 6);
        let g2 = SimilarityGraph::empty(6);
        let hp = Hyperparameters {
            alpha: 0.0,
            beta: 0.5,
            lambda: 0.01,
            gamma: 100.0,
            tau: 0.0,
        };
        let opts = FitOptions {
            seed: 5,
            maxiter: 200,
            ..FitOptions::default()
        };
        let a = fit(&x, &g1, &hp, &opts).unwrap();
        let b = fit(&x, &g2, &hp, &opts).unwrap();
        assert_eq!(a.coefficients.values(), b.coefficients.values());
        let bits_a: Vec<u64> = a.objective_history.iter().map(|v| v.to_bits()).collect();
        let bits_b: Vec<u64> = b.objective_history.iter().map(|v| v.to_bits()).collect();
        assert_eq!(bits_a, bits_b);
    }

    #[test]
    fn fit_recovers_duplicate_column_structure() {
        // Columns 0/1 and 2/3 are duplicated, so each disease is best
        // expressed by its twin: the largest entry of each column of C must
        // sit on the twin's row.
        let x = AssociationMatrix::new(
            array![
                [1.0, 1.0, 0.0, 0.0],
                [1.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 1.0],
                [0.0, 0.0, 1.0, 1.0],
            ],
            ids("dr", 4),
            ids("di", 4),
        )
        .unwrap();
        let hp = Hyperparameters {
            alpha: 0.0,
            beta: 0.01,
            lambda: 0.0,
            gamma: 1e4,
            tau: 0.0,
        };
        let opts = FitOptions {
            seed: 3,
            ..FitOptions::default()
        };
        let result = fit(&x, &SimilarityGraph::empty(4), &hp, &opts).unwrap();
        let c = result.coefficients.values();
        let twin = [1usize, 0, 3, 2];
        for j in 0..4 {
            let col = c.column(j);
            let argmax = col
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0;
            assert_eq!(argmax, twin[j], "column {j}: {col:?}");
            assert!(
                col[twin[j]] > 0.5,
                "column {j} twin weight {}",
                col[twin[j]]
            );
        }
        assert!(result.max_diagonal < 1e-6);
    }

    #[test]
    fn kkt_residual_shrinks_with_tight_tolerance() {
        let mut rng = Rng::new(41);
        let x = random_binary(&mut rng, 10, 8);
        let g = random_graph(&mut rng, 8);
        let opts = FitOptions {
            tol: 1e-6,
            maxiter: 20_000,
            seed: 7,
            ..FitOptions::default()
        };
        let result = fit(&x, &g, &test_hp(), &opts).unwrap();
        assert!(result.converged);
        assert!(
            result.kkt_residual < 1e-3 * result.kkt_residual_initial,
            "kkt {} vs initial {}",
            result.kkt_residual,
            result.kkt_residual_initial
        );
    }

    #[test]
    fn different_seeds_reach_the_same_objective() {
        let mut rng = Rng::new(43);
        let x = random_binary(&mut rng, 10, 8);
        let g = random_graph(&mut rng, 8);
        let base = FitOptions {
            tol: 1e-6,
            maxiter: 20_000,
            ..FitOptions::default()
        };
        let a = fit(&x, &g, &test_hp(), &FitOptions { seed: 1, ..base }).unwrap();
        let b = fit(&x, &g, &test_hp(), &FitOptions { seed: 2, ..base }).unwrap();
        let qa = a.objective();
        let qb = b.objective();
        let rel = (qa - qb).abs() / (1.0 + qa.abs());
        assert!(rel < 1e-4, "{qa} vs {qb}");
    }

    #[test]
    fn relative_change_follows_the_formula() {
        let a = Array2::ones((2, 2));
        assert_eq!(relative_change(&a, &a, 1e-16).unwrap(), 0.0);

        let mut b = Array2::ones((2, 2));
        b[(0, 1)] = 1.5;
        let delta = relative_change(&a, &b, 1e-16).unwrap();
        assert!((delta - 0.5).abs() < 1e-12);

        let zero = Array2::zeros((2, 2));
        let mut c = Array2::zeros((2, 2));
        c[(1, 1)] = 0.25;
        let delta = relative_change(&zero, &c, 1e-16).unwrap();
        assert!((delta - 0.25 / 1e-16).abs() / (0.25 / 1e-16) < 1e-12);

        assert!(matches!(
            relative_change(&a, &Array2::zeros((3, 3)), 1e-16),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn predict_scores_is_the_plain_product() {
        let x = AssociationMatrix::new(array![[1.0, 0.0], [1.0, 1.0]], ids("dr", 2), ids("di", 2))
            .unwrap();
        let zero = CoefficientMatrix::new(Array2::zeros((2, 2))).unwrap();
        assert_eq!(predict_scores(&x, &zero).unwrap().sum(), 0.0);

        let c = CoefficientMatrix::new(array![[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let scores = predict_scores(&x, &c).unwrap();
        assert_eq!(scores, array![[0.0, 1.0], [1.0, 1.0]]);

        let wrong = CoefficientMatrix::new(Array2::zeros((3, 3))).unwrap();
        assert!(matches!(
            predict_scores(&x, &wrong),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
