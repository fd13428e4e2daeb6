//! Interpretation of fitted coefficients via disease-disease similarity.
//!
//! The learned matrix is symmetrized to `S = (C + C^T)/2`, rows of `S` are
//! compared by cosine similarity, and the resulting values are split into
//! intra-class and inter-class pairs using a disease classification. A
//! rank-sum test quantifies whether same-class diseases look more alike.

use std::collections::{BTreeMap, HashMap, HashSet};

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::model::CoefficientMatrix;
use crate::stats::{midranks, normal_log10_sf, normal_sf};

/// Classes with fewer members than this carry too little signal and are
/// dropped during map construction.
pub const MIN_CLASS_MEMBERS: usize = 5;

/// Disease-to-class assignment after filtering.
///
/// Diseases listed with more than one class are dropped, as are classes
/// that end up with fewer than [`MIN_CLASS_MEMBERS`] diseases. The dropped
/// items are kept for reporting.
#[derive(Debug, Clone)]
pub struct DiseaseClassMap {
    assignments: BTreeMap<String, String>,
    class_counts: BTreeMap<String, usize>,
    dropped_multi_class: Vec<String>,
    dropped_small_classes: Vec<String>,
    skipped_unknown: Vec<String>,
}

impl DiseaseClassMap {
    /// Builds the map from raw (disease, class) pairs.
    ///
    /// When `known` is given, diseases outside it are skipped (they do not
    /// appear in the association matrix, so no similarity exists for them).
    /// Exact duplicate pairs collapse silently; conflicting classes drop
    /// the disease.
    pub fn from_pairs(
        pairs: &[(String, String)],
        known: Option<&HashSet<String>>,
    ) -> DiseaseClassMap {
        let mut skipped_unknown = Vec::new();
        let mut classes_of: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (disease, class) in pairs {
            if let Some(known) = known {
                if !known.contains(disease) {
                    if !skipped_unknown.contains(disease) {
                        skipped_unknown.push(disease.clone());
                    }
                    continue;
                }
            }
            let entry = classes_of.entry(disease).or_default();
            if !entry.contains(&class.as_str()) {
                entry.push(class);
            }
        }

        let mut dropped_multi_class = Vec::new();
        let mut assignments: BTreeMap<String, String> = BTreeMap::new();
        for (disease, classes) in &classes_of {
            if classes.len() == 1 {
                assignments.insert(disease.to_string(), classes[0].to_string());
            } else {
                dropped_multi_class.push(disease.to_string());
            }
        }

        let mut class_counts: BTreeMap<String, usize> = BTreeMap::new();
        for class in assignments.values() {
            *class_counts.entry(class.clone()).or_insert(0) += 1;
        }
        let dropped_small_classes: Vec<String> = class_counts
            .iter()
            .filter(|(_, &count)| count < MIN_CLASS_MEMBERS)
            .map(|(class, _)| class.clone())
            .collect();
        for class in &dropped_small_classes {
            class_counts.remove(class);
        }
        assignments.retain(|_, class| class_counts.contains_key(class));

        if !skipped_unknown.is_empty() {
            log::warn!(
                "class map: skipped {} diseases absent from the association matrix",
                skipped_unknown.len()
            );
        }
        if !dropped_multi_class.is_empty() {
            log::info!(
                "class map: dropped {} diseases with multiple classes",
                dropped_multi_class.len()
            );
        }
        if !dropped_small_classes.is_empty() {
            log::info!(
                "class map: dropped {} classes with fewer than {MIN_CLASS_MEMBERS} members",
                dropped_small_classes.len()
            );
        }

        DiseaseClassMap {
            assignments,
            class_counts,
            dropped_multi_class,
            dropped_small_classes,
            skipped_unknown,
        }
    }

    /// Class of a disease, if it survived filtering.
    pub fn class_of(&self, disease: &str) -> Option<&str> {
        self.assignments.get(disease).map(|s| s.as_str())
    }

    /// Retained assignments, ordered by disease id.
    pub fn assignments(&self) -> &BTreeMap<String, String> {
        &self.assignments
    }

    /// Retained class sizes, ordered by class label.
    pub fn class_counts(&self) -> &BTreeMap<String, usize> {
        &self.class_counts
    }

    pub fn n_classified(&self) -> usize {
        self.assignments.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_counts.len()
    }

    pub fn dropped_multi_class(&self) -> &[String] {
        &self.dropped_multi_class
    }

    pub fn dropped_small_classes(&self) -> &[String] {
        &self.dropped_small_classes
    }

    pub fn skipped_unknown(&self) -> &[String] {
        &self.skipped_unknown
    }
}

/// Symmetrized coefficients `S = (C + C^T) / 2`.
pub fn symmetrize(c: &CoefficientMatrix) -> Array2<f64> {
    let v = c.values();
    (v + &v.t()) / 2.0
}

/// Pairwise cosine similarity of the rows of `s`, plus the indices of
/// zero-norm rows.
///
/// Zero rows get similarity 0 against everything, their own diagonal
/// included; all other diagonal entries are exactly 1. Values are clamped
/// to [-1, 1] against rounding.
pub fn cosine_rows(s: &Array2<f64>) -> (Array2<f64>, Vec<usize>) {
    let m = s.nrows();
    let gram = s.dot(&s.t());
    let norms: Vec<f64> = (0..m).map(|i| gram[(i, i)].sqrt()).collect();
    let zero_rows: Vec<usize> = (0..m).filter(|&i| norms[i] == 0.0).collect();
    let mut sim = Array2::zeros((m, m));
    for i in 0..m {
        if norms[i] == 0.0 {
            continue;
        }
        sim[(i, i)] = 1.0;
        for j in (i + 1)..m {
            if norms[j] == 0.0 {
                continue;
            }
            let value = (gram[(i, j)] / (norms[i] * norms[j])).clamp(-1.0, 1.0);
            sim[(i, j)] = value;
            sim[(j, i)] = value;
        }
    }
    (sim, zero_rows)
}

/// Splits similarity values into intra-class and inter-class lists over
/// unordered pairs of classified diseases.
///
/// `disease_ids` maps matrix indices to identifiers. Unclassified diseases
/// are ignored; fewer than two classified diseases is an error because no
/// pair exists.
pub fn class_split(
    sim: &Array2<f64>,
    disease_ids: &[String],
    classes: &DiseaseClassMap,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if sim.nrows() != sim.ncols() || sim.nrows() != disease_ids.len() {
        return Err(Error::DimensionMismatch {
            context: "similarity matrix vs disease identifiers",
            expected: disease_ids.len(),
            got: sim.nrows(),
        });
    }
    let class_of: Vec<Option<&str>> = disease_ids.iter().map(|id| classes.class_of(id)).collect();
    let n_classified = class_of.iter().filter(|c| c.is_some()).count();
    if n_classified < 2 {
        return Err(Error::InvalidData(format!(
            "need at least 2 classified diseases for a class split, got {n_classified}"
        )));
    }
    let mut intra = Vec::new();
    let mut inter = Vec::new();
    for i in 0..disease_ids.len() {
        let Some(class_i) = class_of[i] else { continue };
        for j in (i + 1)..disease_ids.len() {
            let Some(class_j) = class_of[j] else { continue };
            if class_i == class_j {
                intra.push(sim[(i, j)]);
            } else {
                inter.push(sim[(i, j)]);
            }
        }
    }
    Ok((intra, inter))
}

/// Outcome of the two-sided rank-sum test.
#[derive(Debug, Clone, Copy)]
pub struct RankSumResult {
    /// Mann-Whitney U of the first sample.
    pub u_statistic: f64,
    /// Expected U under the null, `n1 * n2 / 2`; `u_statistic > u_mean`
    /// means the first sample tends to be larger.
    pub u_mean: f64,
    /// Standardized statistic after tie correction and continuity
    /// correction; non-negative.
    pub z: f64,
    /// Two-sided p-value; 0 when the true value underflows a double.
    pub p_value: f64,
    /// Base-10 log of the p-value, finite even far below the double range.
    pub log10_p: f64,
}

/// Two-sided Wilcoxon rank-sum (Mann-Whitney) test with midranks,
/// tie-corrected variance and continuity correction, under the normal
/// approximation.
///
/// Returns p = 1 when every pooled value is identical (zero variance).
pub fn rank_sum_test(a: &[f64], b: &[f64]) -> Result<RankSumResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument(
            "rank-sum test needs two non-empty samples".into(),
        ));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "rank-sum test needs finite values".into(),
        ));
    }
    let n1 = a.len() as f64;
    let n2 = b.len() as f64;
    let n = n1 + n2;
    let pooled: Vec<f64> = a.iter().chain(b).cloned().collect();
    let (ranks, tie_term) = midranks(&pooled);
    let r1: f64 = ranks[..a.len()].iter().sum();
    let u = r1 - n1 * (n1 + 1.0) / 2.0;
    let u_mean = n1 * n2 / 2.0;
    let variance = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));

    if variance <= 0.0 {
        return Ok(RankSumResult {
            u_statistic: u,
            u_mean,
            z: 0.0,
            p_value: 1.0,
            log10_p: 0.0,
        });
    }
    let z = ((u - u_mean).abs() - 0.5).max(0.0) / variance.sqrt();
    let p_value = (2.0 * normal_sf(z)).min(1.0);
    let log10_p = (std::f64::consts::LN_2 / std::f64::consts::LN_10 + normal_log10_sf(z)).min(0.0);
    Ok(RankSumResult {
        u_statistic: u,
        u_mean,
        z,
        p_value,
        log10_p,
    })
}

/// Full similarity analysis of a fitted model.
#[derive(Debug, Clone)]
pub struct SimilarityAnalysis {
    /// Cosine similarity of the rows of the symmetrized coefficients.
    pub similarity: Array2<f64>,
    pub intra_values: Vec<f64>,
    pub inter_values: Vec<f64>,
    pub test: RankSumResult,
    /// Diseases whose symmetrized coefficient row is all zero.
    pub zero_rows: Vec<usize>,
}

impl SimilarityAnalysis {
    pub fn mean_intra(&self) -> f64 {
        self.intra_values.iter().sum::<f64>() / self.intra_values.len() as f64
    }

    pub fn mean_inter(&self) -> f64 {
        self.inter_values.iter().sum::<f64>() / self.inter_values.len() as f64
    }
}

/// Runs the whole interpretation pipeline on fitted coefficients:
/// symmetrize, cosine similarity, class split, rank-sum test.
pub fn analyze(
    c: &CoefficientMatrix,
    disease_ids: &[String],
    classes: &DiseaseClassMap,
) -> Result<SimilarityAnalysis> {
    if c.size() != disease_ids.len() {
        return Err(Error::DimensionMismatch {
            context: "coefficient matrix vs disease identifiers",
            expected: disease_ids.len(),
            got: c.size(),
        });
    }
    let s = symmetrize(c);
    let (similarity, zero_rows) = cosine_rows(&s);
    if !zero_rows.is_empty() {
        log::warn!(
            "{} diseases have all-zero coefficient rows; their similarities are 0 by convention",
            zero_rows.len()
        );
    }
    let (intra_values, inter_values) = class_split(&similarity, disease_ids, classes)?;
    let test = rank_sum_test(&intra_values, &inter_values)?;
    Ok(SimilarityAnalysis {
        similarity,
        intra_values,
        inter_values,
        test,
        zero_rows,
    })
}

/// A node of the exported similarity network.
#[derive(Debug, Clone)]
pub struct NetworkNode {
    pub id: String,
    pub class: String,
}

/// An undirected weighted edge of the exported network.
#[derive(Debug, Clone)]
pub struct NetworkEdge {
    pub source: String,
    pub target: String,
    pub weight: f64,
}

/// Similarity network restricted to well-populated classes.
#[derive(Debug, Clone)]
pub struct Network {
    pub nodes: Vec<NetworkNode>,
    pub edges: Vec<NetworkEdge>,
}

/// Builds the thresholded similarity network.
///
/// Nodes are classified diseases whose class has at least `min_class_size`
/// members; edges connect node pairs with similarity at or above
/// `edge_threshold` (which must lie in [0, 1]). An empty edge set is
/// allowed and only logged.
pub fn build_network(
    sim: &Array2<f64>,
    disease_ids: &[String],
    classes: &DiseaseClassMap,
    edge_threshold: f64,
    min_class_size: usize,
) -> Result<Network> {
    if sim.nrows() != sim.ncols() || sim.nrows() != disease_ids.len() {
        return Err(Error::DimensionMismatch {
            context: "similarity matrix vs disease identifiers",
            expected: disease_ids.len(),
            got: sim.nrows(),
        });
    }
    if !(0.0..=1.0).contains(&edge_threshold) {
        return Err(Error::InvalidArgument(format!(
            "edge threshold must lie in [0, 1], got {edge_threshold}"
        )));
    }
    let retained: HashMap<&str, &str> = classes
        .assignments()
        .iter()
        .filter(|(_, class)| classes.class_counts()[*class] >= min_class_size)
        .map(|(id, class)| (id.as_str(), class.as_str()))
        .collect();

    let mut nodes = Vec::new();
    let mut node_indices = Vec::new();
    for (index, id) in disease_ids.iter().enumerate() {
        if let Some(class) = retained.get(id.as_str()) {
            nodes.push(NetworkNode {
                id: id.clone(),
                class: class.to_string(),
            });
            node_indices.push(index);
        }
    }

    let mut edges = Vec::new();
    for (a, &i) in node_indices.iter().enumerate() {
        for &j in node_indices.iter().skip(a + 1) {
            let weight = sim[(i, j)];
            if weight >= edge_threshold {
                edges.push(NetworkEdge {
                    source: disease_ids[i].clone(),
                    target: disease_ids[j].clone(),
                    weight,
                });
            }
        }
    }
    if edges.is_empty() {
        log::warn!("edge threshold {edge_threshold} leaves no edges in the network");
    }
    Ok(Network { nodes, edges })
}
