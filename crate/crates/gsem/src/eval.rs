//! Cross-validated evaluation and hyperparameter search.
//!
//! The protocol: partition the positive entries into `k` folds such that
//! no drug ever loses its last training positive, mask one fold, fit on
//! the rest, then rank the masked positives against sampled unknown
//! entries at several negative-to-positive ratios and measure the area
//! under the precision-recall curve.

use std::collections::BTreeMap;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::data::AssociationMatrix;
use crate::error::{Error, Result};
use crate::graph::{build_graph, SimilarityGraph};
use crate::model::{FitOptions, Hyperparameters};
use crate::rng::{derive_seed, Rng, TAG_FIT, TAG_FOLDS, TAG_NEGATIVES, TAG_VALIDATION};
use crate::solver::{fit, predict_scores};

/// Partition of the positive entries into test folds.
///
/// Positives of drugs with a single association are pinned: they stay in
/// the training set of every fold, because masking them would leave their
/// drug without any training signal. The remaining positives are split
/// into `k` folds whose sizes differ by at most one, arranged so that
/// every multi-positive drug keeps at least one training positive no
/// matter which fold is masked.
#[derive(Debug, Clone)]
pub struct FoldPlan {
    folds: Vec<Vec<(usize, usize)>>,
    pinned: Vec<(usize, usize)>,
    seed: u64,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.folds.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn folds(&self) -> &[Vec<(usize, usize)>] {
        &self.folds
    }

    pub fn fold(&self, index: usize) -> &[(usize, usize)] {
        &self.folds[index]
    }

    /// Positives excluded from every test fold.
    pub fn pinned(&self) -> &[(usize, usize)] {
        &self.pinned
    }

    pub fn n_pinned(&self) -> usize {
        self.pinned.len()
    }
}

/// Builds a `k`-fold partition of the positives of `X`.
///
/// Deterministic for a fixed seed. Single-positive drugs are pinned out of
/// all folds; the rest are shuffled, dealt round-robin, then repaired by
/// swaps until every multi-positive drug spans at least two folds. Swaps
/// preserve fold sizes, so sizes stay within one of each other.
pub fn make_folds(x: &AssociationMatrix, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "cross-validation needs k >= 2 folds, got {k}"
        )));
    }
    let degrees = x.row_degrees();
    if let Some(drug) = degrees.iter().position(|&d| d == 0) {
        return Err(Error::InvalidData(format!(
            "drug {} has no positive associations",
            x.drug_ids()[drug]
        )));
    }

    let mut pinned = Vec::new();
    let mut items: Vec<(usize, usize)> = Vec::new();
    for (i, j) in x.positives() {
        if degrees[i] == 1 {
            pinned.push((i, j));
        } else {
            items.push((i, j));
        }
    }
    if items.len() < k {
        return Err(Error::InvalidArgument(format!(
            "only {} unpinned positives for {k} folds",
            items.len()
        )));
    }

    let mut rng = Rng::new(derive_seed(seed, &[TAG_FOLDS]));
    rng.shuffle(&mut items);
    let mut assignment: Vec<usize> = (0..items.len()).map(|idx| idx % k).collect();

    // Repair pass: a drug whose positives all landed in one fold would lose
    // every training positive when that fold is masked. Swap one of its
    // items with an item from another fold whose own drug keeps spanning
    // at least two folds. Swapping preserves fold sizes exactly.
    let fold_span = |drug: usize, items: &[(usize, usize)], assignment: &[usize]| {
        let mut folds: Vec<usize> = items
            .iter()
            .zip(assignment)
            .filter(|((i, _), _)| *i == drug)
            .map(|(_, &f)| f)
            .collect();
        folds.sort_unstable();
        folds.dedup();
        folds
    };
    for _pass in 0..3 {
        let mut violations = Vec::new();
        for (drug, &degree) in degrees.iter().enumerate() {
            if degree >= 2 && fold_span(drug, &items, &assignment).len() < 2 {
                violations.push(drug);
            }
        }
        if violations.is_empty() {
            break;
        }
        for drug in violations {
            let span = fold_span(drug, &items, &assignment);
            if span.len() >= 2 {
                continue;
            }
            let stuck_fold = span[0];
            let moving = items
                .iter()
                .position(|&(i, _)| i == drug)
                .expect("drug has positives");
            let mut fixed = false;
            for idx in 0..items.len() {
                if assignment[idx] == stuck_fold {
                    continue;
                }
                let other_drug = items[idx].0;
                let target_fold = assignment[idx];
                // Trial swap: the stuck drug's item goes to the target fold,
                // the other item takes its place in the stuck fold.
                assignment[moving] = target_fold;
                assignment[idx] = stuck_fold;
                if fold_span(other_drug, &items, &assignment).len() >= 2 {
                    fixed = true;
                    break;
                }
                assignment[moving] = stuck_fold;
                assignment[idx] = target_fold;
            }
            if !fixed {
                return Err(Error::InvalidData(format!(
                    "cannot satisfy the training-coverage constraint for drug {}",
                    x.drug_ids()[drug]
                )));
            }
        }
    }
    for (drug, &degree) in degrees.iter().enumerate() {
        if degree >= 2 && fold_span(drug, &items, &assignment).len() < 2 {
            return Err(Error::InvalidData(format!(
                "training-coverage repair failed for drug {}",
                x.drug_ids()[drug]
            )));
        }
    }

    let mut folds = vec![Vec::new(); k];
    for (item, &f) in items.iter().zip(&assignment) {
        folds[f].push(*item);
    }
    if pinned.is_empty() {
        log::debug!("fold plan: {} positives over {k} folds", items.len());
    } else {
        log::info!(
            "fold plan: {} positives over {k} folds, {} single-positive entries pinned to training",
            items.len(),
            pinned.len()
        );
    }
    Ok(FoldPlan {
        folds,
        pinned,
        seed,
    })
}

/// Returns a copy of `X` with the fold's entries nulled out.
pub fn mask_fold(x: &AssociationMatrix, fold: &[(usize, usize)]) -> Result<AssociationMatrix> {
    x.with_masked(fold)
}

/// Samples `floor(ratio * |test_positives|)` distinct zero entries of the
/// full matrix, uniformly without replacement. Deterministic per seed.
///
/// `x` must be the unmasked matrix: masked test positives are still
/// positives and must never be drawn as negatives.
pub fn sample_negatives(
    x: &AssociationMatrix,
    test_positives: &[(usize, usize)],
    ratio: f64,
    seed: u64,
) -> Result<Vec<(usize, usize)>> {
    if !ratio.is_finite() || ratio <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "negative-to-positive ratio must be positive, got {ratio}"
        )));
    }
    let count = (ratio * test_positives.len() as f64).floor() as usize;
    let zeros: Vec<(usize, usize)> = x
        .values()
        .indexed_iter()
        .filter(|&(_, &v)| v == 0.0)
        .map(|(ix, _)| ix)
        .collect();
    if count > zeros.len() {
        return Err(Error::InvalidArgument(format!(
            "requested {count} negatives but only {} zero entries exist",
            zeros.len()
        )));
    }
    let mut rng = Rng::new(seed);
    Ok(rng
        .sample_distinct(zeros.len(), count)
        .into_iter()
        .map(|idx| zeros[idx])
        .collect())
}

/// Area under the precision-recall curve.
///
/// Scores are ranked descending and integrated with the step rule:
/// each distinct score value forms one tied block, precision and recall
/// advance once per block, and the area accumulates
/// `(recall - previous recall) * precision`. With all scores tied the
/// result is the positive prevalence.
pub fn aupr(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            context: "scores vs labels",
            expected: labels.len(),
            got: scores.len(),
        });
    }
    if let Some(bad) = scores.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "scores must be finite, got {bad}"
        )));
    }
    let total_pos = labels.iter().filter(|&&l| l).count();
    let total_neg = labels.len() - total_pos;
    if total_pos == 0 || total_neg == 0 {
        return Err(Error::InvalidArgument(
            "AUPR needs at least one positive and one negative label".into(),
        ));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());

    let mut area = 0.0;
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut prev_recall = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        for &idx in &order[start..end] {
            if labels[idx] {
                tp += 1;
            } else {
                fp += 1;
            }
        }
        let recall = tp as f64 / total_pos as f64;
        let precision = tp as f64 / (tp + fp) as f64;
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
        start = end;
    }
    Ok(area)
}

/// Cross-validation outcome: one AUPR per fold and ratio plus fit
/// diagnostics. Summary statistics are recomputed from the stored values.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub hyperparameters: Hyperparameters,
    pub seed: u64,
    pub k: usize,
    /// Positives pinned outside all test folds.
    pub n_pinned: usize,
    pub ratios: Vec<f64>,
    /// `aupr[r][f]` is the score of fold `f` at `ratios[r]`.
    pub aupr: Vec<Vec<f64>>,
    pub fold_converged: Vec<bool>,
    pub fold_iterations: Vec<usize>,
}

impl EvalReport {
    /// Mean AUPR at a ratio index.
    pub fn mean(&self, ratio_index: usize) -> f64 {
        let v = &self.aupr[ratio_index];
        v.iter().sum::<f64>() / v.len() as f64
    }

    /// Sample standard deviation (n-1 denominator) at a ratio index.
    pub fn sd(&self, ratio_index: usize) -> f64 {
        let v = &self.aupr[ratio_index];
        if v.len() < 2 {
            return 0.0;
        }
        let mean = self.mean(ratio_index);
        let ss: f64 = v.iter().map(|a| (a - mean) * (a - mean)).sum();
        (ss / (v.len() - 1) as f64).sqrt()
    }
}

/// Runs the full cross-validation protocol.
///
/// Per fold: mask the fold, fit on the rest (the fit seed is derived from
/// `seed` and the fold index, superseding `opts.seed`), score the masked
/// positives against freshly sampled negatives at every ratio. The fitted
/// model is shared across ratios; only the negative samples differ. A fit
/// that hits the iteration cap is recorded as non-converged, not fatal.
pub fn cross_validate(
    x: &AssociationMatrix,
    graph: &SimilarityGraph,
    hp: &Hyperparameters,
    opts: &FitOptions,
    k: usize,
    ratios: &[f64],
    seed: u64,
) -> Result<EvalReport> {
    if ratios.is_empty() {
        return Err(Error::InvalidArgument("no evaluation ratios given".into()));
    }
    let plan = make_folds(x, k, seed)?;
    let mut aupr_table = vec![Vec::with_capacity(k); ratios.len()];
    let mut fold_converged = Vec::with_capacity(k);
    let mut fold_iterations = Vec::with_capacity(k);

    for f in 0..k {
        let fold = plan.fold(f);
        let masked = mask_fold(x, fold)?;
        let fit_opts = FitOptions {
            seed: derive_seed(seed, &[TAG_FIT, f as u64]),
            ..*opts
        };
        let result = fit(&masked, graph, hp, &fit_opts)?;
        if !result.converged {
            log::warn!(
                "fold {f}: fit did not converge within {} iterations",
                fit_opts.maxiter
            );
        }
        fold_converged.push(result.converged);
        fold_iterations.push(result.iterations);
        let scores = predict_scores(&masked, &result.coefficients)?;

        for (ri, &ratio) in ratios.iter().enumerate() {
            let neg_seed = derive_seed(seed, &[TAG_NEGATIVES, f as u64, ri as u64]);
            let negatives = sample_negatives(x, fold, ratio, neg_seed)?;
            let mut s = Vec::with_capacity(fold.len() + negatives.len());
            let mut labels = Vec::with_capacity(fold.len() + negatives.len());
            for &(i, j) in fold {
                s.push(scores[(i, j)]);
                labels.push(true);
            }
            for &(i, j) in &negatives {
                s.push(scores[(i, j)]);
                labels.push(false);
            }
            aupr_table[ri].push(aupr(&s, &labels)?);
        }
    }

    Ok(EvalReport {
        hyperparameters: *hp,
        seed,
        k,
        n_pinned: plan.n_pinned(),
        ratios: ratios.to_vec(),
        aupr: aupr_table,
        fold_converged,
        fold_iterations,
    })
}

/// Candidate values for the tuned hyperparameters. `gamma` is fixed, not
/// searched.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchGrid {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub taus: Vec<f64>,
    pub gamma: f64,
}

impl Default for SearchGrid {
    /// The full default search space: six weights per penalty and six
    /// thresholds.
    fn default() -> Self {
        let weights = vec![0.0, 0.01, 0.1, 1.0, 10.0, 100.0];
        SearchGrid {
            alphas: weights.clone(),
            betas: weights.clone(),
            lambdas: weights,
            taus: vec![0.0, 0.25, 0.65, 0.75, 0.85, 0.95],
            gamma: 1e4,
        }
    }
}

impl SearchGrid {
    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty()
            || self.betas.is_empty()
            || self.lambdas.is_empty()
            || self.taus.is_empty()
        {
            return Err(Error::InvalidArgument(
                "search grid must have at least one candidate per hyperparameter".into(),
            ));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.alphas.len() * self.betas.len() * self.lambdas.len() * self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All grid points in deterministic nesting order
    /// (alpha, beta, lambda, tau).
    fn points(&self) -> Vec<Hyperparameters> {
        let mut points = Vec::with_capacity(self.len());
        for &alpha in &self.alphas {
            for &beta in &self.betas {
                for &lambda in &self.lambdas {
                    for &tau in &self.taus {
                        points.push(Hyperparameters {
                            alpha,
                            beta,
                            lambda,
                            gamma: self.gamma,
                            tau,
                        });
                    }
                }
            }
        }
        points
    }
}

/// One evaluated grid point. `mean` is absent when any fold's fit failed.
#[derive(Debug, Clone, Serialize)]
pub struct GridPoint {
    pub hyperparameters: Hyperparameters,
    pub per_fold: Vec<Option<f64>>,
    pub mean: Option<f64>,
}

/// Grid-search outcome: the winning hyperparameters and the full table.
#[derive(Debug, Clone, Serialize)]
pub struct GridSearchResult {
    pub best: Hyperparameters,
    pub table: Vec<GridPoint>,
    pub validation_ratio: f64,
    pub seed: u64,
}

/// Exhaustive grid search by nested validation.
///
/// For each test fold `f`, one further fold serves as the validation set;
/// both are masked during fitting and the validation positives are scored
/// against negatives sampled at `validation_ratio`. Masking two folds
/// means `k` must be at least 3, or no training data would remain.
/// Negatives and fit
/// seeds are shared across grid points, so candidates see identical data.
/// The winner maximises mean validation AUPR; ties prefer smaller alpha,
/// then smaller beta, then larger lambda, then smaller tau. Grid points
/// where any fit fails are excluded from the argmax.
pub fn grid_search(
    x: &AssociationMatrix,
    similarity_raw: &Array2<f64>,
    grid: &SearchGrid,
    opts: &FitOptions,
    k: usize,
    validation_ratio: f64,
    seed: u64,
) -> Result<GridSearchResult> {
    grid.validate()?;
    if k < 3 {
        return Err(Error::InvalidArgument(format!(
            "nested validation needs k >= 3 folds, got {k}: masking the test and \
             validation folds at k = 2 leaves no training data"
        )));
    }
    let plan = make_folds(x, k, seed)?;

    // The graph only depends on tau; build each one once.
    let mut graphs: BTreeMap<u64, SimilarityGraph> = BTreeMap::new();
    for &tau in &grid.taus {
        graphs
            .entry(tau.to_bits())
            .or_insert(build_graph(similarity_raw, tau)?);
    }

    // Per fold: mask test+validation once, sample validation negatives once.
    let mut fold_data = Vec::with_capacity(k);
    for f in 0..k {
        let validation = (f + 1) % k;
        let mut masked = mask_fold(x, plan.fold(f))?;
        masked = mask_fold(&masked, plan.fold(validation))?;
        let neg_seed = derive_seed(seed, &[TAG_VALIDATION, f as u64]);
        let negatives = sample_negatives(x, plan.fold(validation), validation_ratio, neg_seed)?;
        let fit_seed = derive_seed(seed, &[TAG_FIT, f as u64]);
        fold_data.push((masked, plan.fold(validation).to_vec(), negatives, fit_seed));
    }

    let mut table = Vec::with_capacity(grid.len());
    for hp in grid.points() {
        let graph = &graphs[&hp.tau.to_bits()];
        let mut per_fold = Vec::with_capacity(k);
        for (masked, validation, negatives, fit_seed) in &fold_data {
            let fit_opts = FitOptions {
                seed: *fit_seed,
                ..*opts
            };
            let score = match fit(masked, graph, &hp, &fit_opts) {
                Ok(result) => {
                    let scores = predict_scores(masked, &result.coefficients)?;
                    let mut s = Vec::with_capacity(validation.len() + negatives.len());
                    let mut labels = Vec::with_capacity(validation.len() + negatives.len());
                    for &(i, j) in validation {
                        s.push(scores[(i, j)]);
                        labels.push(true);
                    }
                    for &(i, j) in negatives {
                        s.push(scores[(i, j)]);
                        labels.push(false);
                    }
                    Some(aupr(&s, &labels)?)
                }
                Err(err) => {
                    log::warn!("grid point {hp:?} failed: {err}");
                    None
                }
            };
            per_fold.push(score);
        }
        let mean = if per_fold.iter().all(|s| s.is_some()) {
            Some(per_fold.iter().map(|s| s.unwrap()).sum::<f64>() / k as f64)
        } else {
            None
        };
        table.push(GridPoint {
            hyperparameters: hp,
            per_fold,
            mean,
        });
    }

    let best = table
        .iter()
        .filter_map(|p| p.mean.map(|m| (p, m)))
        .max_by(|(pa, ma), (pb, mb)| {
            ma.partial_cmp(mb)
                .unwrap()
                // On equal means, prefer the simpler model: smaller alpha,
                // smaller beta, larger lambda, smaller tau. Reversed terms
                // make the preferred candidate the maximum.
                .then_with(|| {
                    pb.hyperparameters
                        .alpha
                        .partial_cmp(&pa.hyperparameters.alpha)
                        .unwrap()
                })
                .then_with(|| {
                    pb.hyperparameters
                        .beta
                        .partial_cmp(&pa.hyperparameters.beta)
                        .unwrap()
                })
                .then_with(|| {
                    pa.hyperparameters
                        .lambda
                        .partial_cmp(&pb.hyperparameters.lambda)
                        .unwrap()
                })
                .then_with(|| {
                    pb.hyperparameters
                        .tau
                        .partial_cmp(&pa.hyperparameters.tau)
                        .unwrap()
                })
        })
        .map(|(p, _)| p.hyperparameters)
        .ok_or_else(|| Error::Numerical("every grid point failed to fit".into()))?;

    Ok(GridSearchResult {
        best,
        table,
        validation_ratio,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn ids(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    fn random_association(rng: &mut Rng, n: usize, m: usize, density: f64) -> AssociationMatrix {
        loop {
            let values =
                Array2::from_shape_fn((n, m), |_| if rng.uniform() < density { 1.0 } else { 0.0 });
            let ok = values.rows().into_iter().all(|r| r.sum() > 0.0);
            if ok {
                return AssociationMatrix::new(values, ids("dr", n), ids("di", m)).unwrap();
            }
        }
    }

    #[test]
    fn folds_partition_the_unpinned_positives() {
        let mut rng = Rng::new(1);
        let x = random_association(&mut rng, 15, 10, 0.3);
        let plan = make_folds(&x, 5, 42).unwrap();
        let mut collected: Vec<(usize, usize)> = plan
            .folds()
            .iter()
            .flatten()
            .chain(plan.pinned())
            .cloned()
            .collect();
        collected.sort_unstable();
        let mut expected = x.positives();
        expected.sort_unstable();
        assert_eq!(collected, expected);
    }

    #[test]
    fn fold_sizes_are_balanced() {
        let mut rng = Rng::new(2);
        let x = random_association(&mut rng, 30, 12, 0.25);
        let plan = make_folds(&x, 10, 7).unwrap();
        let sizes: Vec<usize> = plan.folds().iter().map(|f| f.len()).collect();
        let min = *sizes.iter().min().unwrap();
        let max = *sizes.iter().max().unwrap();
        assert!(max - min <= 1, "sizes {sizes:?}");
    }

    #[test]
    fn every_drug_keeps_a_training_positive_in_every_fold() {
        let mut rng = Rng::new(3);
        for seed in 0..20 {
            let x = random_association(&mut rng, 20, 8, 0.2);
            let plan = make_folds(&x, 5, seed).unwrap();
            for f in 0..plan.k() {
                let masked = mask_fold(&x, plan.fold(f)).unwrap();
                assert!(
                    masked.row_degrees().iter().all(|&d| d > 0),
                    "seed {seed}, fold {f} leaves a drug uncovered"
                );
            }
        }
    }

    #[test]
    fn single_positive_drugs_are_pinned() {
        let values = array![
            [1.0, 0.0, 0.0, 0.0],
            [1.0, 1.0, 1.0, 1.0],
            [0.0, 1.0, 1.0, 1.0],
            [1.0, 1.0, 0.0, 1.0],
        ];
        let x = AssociationMatrix::new(values, ids("dr", 4), ids("di", 4)).unwrap();
        let plan = make_folds(&x, 2, 9).unwrap();
        assert_eq!(plan.pinned(), &[(0, 0)]);
        assert!(plan.folds().iter().flatten().all(|&(i, _)| i != 0));
    }

    #[test]
    fn folds_are_deterministic_per_seed() {
        let mut rng = Rng::new(4);
        let x = random_association(&mut rng, 15, 8, 0.3);
        let a = make_folds(&x, 4, 11).unwrap();
        let b = make_folds(&x, 4, 11).unwrap();
        assert_eq!(a.folds(), b.folds());
        let c = make_folds(&x, 4, 12).unwrap();
        assert_ne!(a.folds(), c.folds());
    }

    #[test]
    fn make_folds_rejects_bad_arguments() {
        let mut rng = Rng::new(5);
        let x = random_association(&mut rng, 10, 6, 0.3);
        assert!(matches!(
            make_folds(&x, 1, 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            make_folds(&x, 1000, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn masking_respects_totals() {
        let mut rng = Rng::new(6);
        let x = random_association(&mut rng, 12, 8, 0.3);
        let plan = make_folds(&x, 4, 1).unwrap();
        let fold = plan.fold(0);
        let masked = mask_fold(&x, fold).unwrap();
        assert_eq!(masked.n_positives(), x.n_positives() - fold.len());
        let same = mask_fold(&x, &[]).unwrap();
        assert_eq!(same.values(), x.values());
    }

    #[test]
    fn negatives_are_distinct_zeros_with_floor_count() {
        let mut rng = Rng::new(7);
        let x = random_association(&mut rng, 10, 10, 0.2);
        let positives = x.positives();
        let test: Vec<_> = positives.iter().take(10).cloned().collect();

        let negs = sample_negatives(&x, &test, 1.0, 99).unwrap();
        assert_eq!(negs.len(), 10);
        let negs_half = sample_negatives(&x, &test, 0.55, 99).unwrap();
        assert_eq!(negs_half.len(), 5);

        let mut seen = negs.clone();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), negs.len(), "duplicates drawn");
        for &(i, j) in &negs {
            assert_eq!(x.values()[(i, j)], 0.0, "({i},{j}) is not a zero entry");
        }

        let again = sample_negatives(&x, &test, 1.0, 99).unwrap();
        assert_eq!(negs, again);
    }

    #[test]
    fn negatives_reject_overdraw_and_bad_ratio() {
        let x = AssociationMatrix::new(array![[1.0, 0.0], [1.0, 1.0]], ids("dr", 2), ids("di", 2))
            .unwrap();
        let test = vec![(0, 0)];
        assert!(matches!(
            sample_negatives(&x, &test, 5.0, 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            sample_negatives(&x, &test, 0.0, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn aupr_handles_the_worked_example() {
        let scores = [0.9, 0.8, 0.7, 0.1];
        let labels = [true, false, true, false];
        let value = aupr(&scores, &labels).unwrap();
        // Step integration: 0.5 * 1.0 + 0.5 * (2/3).
        let expected = 0.5 + 0.5 * (2.0 / 3.0);
        assert!((value - expected).abs() < 1e-12, "{value}");
    }

    #[test]
    fn aupr_perfect_ranking_is_one() {
        let scores = [5.0, 4.0, 3.0, 0.2, 0.1];
        let labels = [true, true, true, false, false];
        assert!((aupr(&scores, &labels).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn aupr_all_tied_equals_prevalence() {
        let scores = [0.5; 8];
        let labels = [true, true, false, false, false, false, false, false];
        assert!((aupr(&scores, &labels).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn aupr_rejects_degenerate_inputs() {
        assert!(matches!(
            aupr(&[0.1, 0.2], &[true, true]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            aupr(&[0.1, 0.2], &[false, false]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            aupr(&[0.1], &[true, false]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            aupr(&[f64::NAN, 0.2], &[true, false]),
            Err(Error::InvalidArgument(_))
        ));
    }

    /// Threshold-enumeration oracle: for every distinct score, classify
    /// everything at or above it as positive and integrate the resulting
    /// (recall, precision) staircase.
    fn aupr_by_thresholds(scores: &[f64], labels: &[bool]) -> f64 {
        let total_pos = labels.iter().filter(|&&l| l).count() as f64;
        let mut thresholds: Vec<f64> = scores.to_vec();
        thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
        thresholds.dedup();
        let mut area = 0.0;
        let mut prev_recall = 0.0;
        for &t in &thresholds {
            let mut tp = 0.0;
            let mut fp = 0.0;
            for (s, &l) in scores.iter().zip(labels) {
                if *s >= t {
                    if l {
                        tp += 1.0;
                    } else {
                        fp += 1.0;
                    }
                }
            }
            let recall = tp / total_pos;
            let precision = tp / (tp + fp);
            area += (recall - prev_recall) * precision;
            prev_recall = recall;
        }
        area
    }

    #[test]
    fn aupr_matches_threshold_oracle_including_ties() {
        let mut rng = Rng::new(8);
        for trial in 0..200 {
            let len = 2 + rng.below(49) as usize;
            // Quantized scores force heavy ties in many trials.
            let levels = 1 + rng.below(6);
            let scores: Vec<f64> = (0..len)
                .map(|_| (rng.below(levels) as f64) / levels as f64)
                .collect();
            let mut labels: Vec<bool> = (0..len).map(|_| rng.uniform() < 0.4).collect();
            if labels.iter().all(|&l| l) {
                labels[0] = false;
            }
            if labels.iter().all(|&l| !l) {
                labels[0] = true;
            }
            let fast = aupr(&scores, &labels).unwrap();
            let slow = aupr_by_thresholds(&scores, &labels);
            assert!(
                (fast - slow).abs() < 1e-12,
                "trial {trial}: {fast} vs {slow}"
            );
        }
    }

    #[test]
    fn aupr_is_invariant_under_monotone_transforms() {
        let mut rng = Rng::new(9);
        for _ in 0..50 {
            let len = 5 + rng.below(30) as usize;
            let scores: Vec<f64> = (0..len).map(|_| rng.uniform()).collect();
            let mut labels: Vec<bool> = (0..len).map(|_| rng.uniform() < 0.5).collect();
            labels[0] = true;
            labels[1] = false;
            let base = aupr(&scores, &labels).unwrap();
            let squashed: Vec<f64> = scores.iter().map(|s| (3.0 * s).exp()).collect();
            let shifted: Vec<f64> = scores.iter().map(|s| 10.0 + 0.1 * s).collect();
            assert!((aupr(&squashed, &labels).unwrap() - base).abs() < 1e-12);
            assert!((aupr(&shifted, &labels).unwrap() - base).abs() < 1e-12);
        }
    }

    fn block_matrix() -> AssociationMatrix {
        // Three blocks of seven drugs sharing two duplicated diseases each:
        // masked entries are recoverable from the twin column. Column degree
        // is 7, above the fold size used below, so no disease column can be
        // masked out entirely.
        let mut values = Array2::zeros((21, 6));
        for block in 0..3 {
            for drug in 0..7 {
                values[(block * 7 + drug, block * 2)] = 1.0;
                values[(block * 7 + drug, block * 2 + 1)] = 1.0;
            }
        }
        AssociationMatrix::new(values, ids("dr", 21), ids("di", 6)).unwrap()
    }

    #[test]
    fn cross_validation_recovers_block_structure() {
        let x = block_matrix();
        let hp = Hyperparameters {
            alpha: 0.0,
            beta: 0.1,
            lambda: 0.0,
            gamma: 1e4,
            tau: 0.0,
        };
        let opts = FitOptions::default();
        let report =
            cross_validate(&x, &SimilarityGraph::empty(6), &hp, &opts, 7, &[1.0], 13).unwrap();
        assert_eq!(report.aupr.len(), 1);
        assert_eq!(report.aupr[0].len(), 7);
        // Every masked positive keeps its twin-column signal while negatives
        // score exactly zero, so each fold separates them perfectly.
        assert!(report.mean(0) > 0.99, "mean AUPR {}", report.mean(0));
        assert!(report.fold_converged.iter().all(|&c| c));
    }

    #[test]
    fn cross_validation_is_deterministic() {
        let x = block_matrix();
        let hp = Hyperparameters {
            alpha: 0.0,
            beta: 0.1,
            lambda: 0.0,
            gamma: 1e4,
            tau: 0.0,
        };
        let opts = FitOptions::default();
        let g = SimilarityGraph::empty(6);
        let a = cross_validate(&x, &g, &hp, &opts, 3, &[1.0, 2.0], 21).unwrap();
        let b = cross_validate(&x, &g, &hp, &opts, 3, &[1.0, 2.0], 21).unwrap();
        let bits =
            |r: &EvalReport| -> Vec<u64> { r.aupr.iter().flatten().map(|v| v.to_bits()).collect() };
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn report_summaries_recompute_from_stored_values() {
        let report = EvalReport {
            hyperparameters: Hyperparameters::default(),
            seed: 0,
            k: 3,
            n_pinned: 0,
            ratios: vec![1.0],
            aupr: vec![vec![0.8, 0.9, 1.0]],
            fold_converged: vec![true; 3],
            fold_iterations: vec![10; 3],
        };
        assert!((report.mean(0) - 0.9).abs() < 1e-15);
        assert!((report.sd(0) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn grid_search_single_point_returns_it() {
        let x = block_matrix();
        let raw = Array2::from_elem((6, 6), 0.5);
        let grid = SearchGrid {
            alphas: vec![1.0],
            betas: vec![0.1],
            lambdas: vec![0.0],
            taus: vec![0.25],
            gamma: 1e4,
        };
        let result = grid_search(&x, &raw, &grid, &FitOptions::default(), 3, 2.0, 5).unwrap();
        assert_eq!(result.table.len(), 1);
        assert_eq!(result.best.alpha, 1.0);
        assert_eq!(result.best.beta, 0.1);
        assert!(result.table[0].mean.is_some());
    }

    #[test]
    fn grid_search_rejects_two_folds() {
        let x = block_matrix();
        let raw = Array2::from_elem((6, 6), 0.5);
        let grid = SearchGrid {
            alphas: vec![0.0],
            betas: vec![0.1],
            lambdas: vec![0.0],
            taus: vec![0.0],
            gamma: 1e4,
        };
        // At k = 2 the test and validation folds cover every positive, so
        // the search must refuse rather than fit on an empty matrix.
        let err = grid_search(&x, &raw, &grid, &FitOptions::default(), 2, 2.0, 5).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
        assert!(err.to_string().contains("3 folds"));
    }

    #[test]
    fn grid_search_prefers_better_mean_and_breaks_ties() {
        let x = block_matrix();
        let raw = Array2::from_elem((6, 6), 0.5);
        // Two identical points except alpha: scores tie exactly because
        // the graph is uniform and both fits share seeds; the tie must
        // break toward the smaller alpha.
        let grid = SearchGrid {
            alphas: vec![0.0],
            betas: vec![0.1, 0.2],
            lambdas: vec![0.0],
            taus: vec![0.0],
            gamma: 1e4,
        };
        let result = grid_search(&x, &raw, &grid, &FitOptions::default(), 3, 2.0, 5).unwrap();
        assert_eq!(result.table.len(), 2);
        let m0 = result.table[0].mean.unwrap();
        let m1 = result.table[1].mean.unwrap();
        // Ties break toward the earlier grid point, so the second point
        // wins only with a strictly better mean.
        let expected = if m1 > m0 { 0.2 } else { 0.1 };
        assert_eq!(result.best.beta, expected);
    }
}
