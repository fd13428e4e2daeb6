//! Deterministic synthetic benchmark data.
//!
//! Generates a drug-disease association matrix, a disease similarity
//! matrix and a disease class file with the same shape statistics as the
//! reference benchmark (DrugBank drugs, OMIM diseases, MimMiner phenotype
//! similarities): 593 drugs, 313 diseases, 1933 positive entries (1.04%
//! density), numerical rank exactly 238, and 13 disease classes of at
//! least 5 members covering 182 diseases.
//!
//! The construction is cluster-based so the learning problem is realistic:
//!
//! * Diseases are grouped into clusters. Within a cluster, drugs treat a
//!   few "duplicate groups" of diseases each, so masked associations are
//!   recoverable from overlapping columns.
//! * 75 diseases are exact column duplicates of another disease in their
//!   cluster, which pins the matrix rank at 238 (238 distinct independent
//!   columns; duplicates add none). Independence is by construction: every
//!   non-duplicate, non-margin disease has a private drug associated with
//!   it alone, so those columns restrict to an identity block.
//! * 40 "margin" diseases have exactly one association, held by a hub drug
//!   with several other associations. When that single entry is masked the
//!   column goes dark: a model without the similarity graph has no signal
//!   left, while a graph-smoothed model can still score it through the
//!   cluster's similarity edges.
//! * The similarity matrix is block-structured: strong within clusters,
//!   weak (below the 0.25 threshold) across, strongest between duplicates
//!   and between margin diseases and what their hub treats.

use ndarray::Array2;

use crate::data::AssociationMatrix;
use crate::rng::Rng;

/// Per-cluster layout: non-duplicate diseases, exact duplicates, and
/// single-association margin diseases. The first 13 clusters carry class
/// labels; their base + duplicate counts are the class sizes.
const CLUSTERS: &[(usize, usize, usize)] = &[
    // classified: base + dup = class sizes 38, 25, 25, 16, 13, 13, 10, 9, 9, 7, 7, 5, 5
    (28, 10, 2),
    (18, 7, 2),
    (18, 7, 2),
    (12, 4, 2),
    (10, 3, 1),
    (10, 3, 1),
    (8, 2, 1),
    (7, 2, 1),
    (7, 2, 1),
    (6, 1, 1),
    (6, 1, 1),
    (4, 1, 1),
    (4, 1, 1),
    // unclassified
    (6, 4, 3),
    (6, 4, 3),
    (6, 4, 3),
    (6, 3, 2),
    (6, 3, 2),
    (6, 3, 2),
    (6, 3, 2),
    (6, 3, 2),
    (6, 2, 2),
    (6, 2, 2),
];

const N_CLASSIFIED_CLUSTERS: usize = 13;
const N_DRUGS: usize = 593;
const N_DISEASES: usize = 313;
const N_POSITIVES: usize = 1933;
/// Cross-cluster associations with no structural support. Masked copies are
/// unrecoverable for any model, which keeps evaluation scores off the
/// ceiling the way idiosyncratic clinical annotations do.
const N_NOISE: usize = 45;

/// A generated benchmark dataset plus the ground-truth cluster layout.
pub struct SyntheticDataset {
    pub associations: AssociationMatrix,
    /// Disease-disease similarity in [0, 1], symmetric, unit diagonal.
    pub similarity: Array2<f64>,
    /// Class-file rows, including one duplicate-membership disease and one
    /// undersized class that the class loader is expected to drop.
    pub class_pairs: Vec<(String, String)>,
    /// Cluster index of every disease (generator ground truth).
    pub cluster_assignments: Vec<usize>,
}

struct Cluster {
    /// Disease indices of non-duplicate, non-margin members, one per
    /// duplicate group.
    bases: Vec<usize>,
    /// (duplicate disease, index into `bases` of its source).
    dups: Vec<(usize, usize)>,
    /// Disease indices with exactly one association.
    margins: Vec<usize>,
    /// Non-private drugs of this cluster.
    drugs: Vec<usize>,
}

impl Cluster {
    /// Diseases of duplicate group `g`: the base plus its duplicates.
    fn group_members(&self, g: usize) -> Vec<usize> {
        let mut members = vec![self.bases[g]];
        members.extend(
            self.dups
                .iter()
                .filter(|&&(_, src)| src == g)
                .map(|&(d, _)| d),
        );
        members
    }
}

fn disease_id(index: usize) -> String {
    format!("DS{:04}", index + 1)
}

fn drug_id(index: usize) -> String {
    format!("DR{:04}", index + 1)
}

/// Allocates `total` items over weights by largest remainder, at least one
/// each.
fn apportion(weights: &[usize], total: usize) -> Vec<usize> {
    let sum: usize = weights.iter().sum();
    let mut counts: Vec<usize> = Vec::with_capacity(weights.len());
    let mut remainders: Vec<(usize, f64)> = Vec::with_capacity(weights.len());
    for (i, &w) in weights.iter().enumerate() {
        let exact = total as f64 * w as f64 / sum as f64;
        let floor = (exact.floor() as usize).max(1);
        counts.push(floor);
        remainders.push((i, exact - exact.floor()));
    }
    let mut assigned: usize = counts.iter().sum();
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let mut cursor = 0;
    while assigned < total {
        counts[remainders[cursor % remainders.len()].0] += 1;
        assigned += 1;
        cursor += 1;
    }
    while assigned > total {
        let i = remainders[remainders.len() - 1 - (assigned - total - 1) % remainders.len()].0;
        if counts[i] > 1 {
            counts[i] -= 1;
            assigned -= 1;
        }
    }
    counts
}

/// Builds the full benchmark dataset deterministically from a seed.
pub fn benchmark_scale(seed: u64) -> SyntheticDataset {
    let mut rng = Rng::new(seed);

    // Disease layout: bases, then duplicates, then margins per cluster.
    let mut clusters: Vec<Cluster> = Vec::with_capacity(CLUSTERS.len());
    let mut cluster_assignments = vec![0usize; N_DISEASES];
    let mut next_disease = 0usize;
    for (ci, &(n_base, n_dup, n_margin)) in CLUSTERS.iter().enumerate() {
        let bases: Vec<usize> = (0..n_base).map(|t| next_disease + t).collect();
        // Distinct duplicate sources, chosen at random within the cluster.
        let sources = rng.sample_distinct(n_base, n_dup);
        let dups: Vec<(usize, usize)> = sources
            .iter()
            .enumerate()
            .map(|(t, &src)| (next_disease + n_base + t, src))
            .collect();
        let margins: Vec<usize> = (0..n_margin)
            .map(|t| next_disease + n_base + n_dup + t)
            .collect();
        let size = n_base + n_dup + n_margin;
        cluster_assignments[next_disease..next_disease + size].fill(ci);
        next_disease += size;
        clusters.push(Cluster {
            bases,
            dups,
            margins,
            drugs: Vec::new(),
        });
    }
    assert_eq!(next_disease, N_DISEASES);

    // Drugs: one private drug per base disease (in base order), then
    // cluster drugs apportioned by cluster size.
    let n_bases: usize = clusters.iter().map(|c| c.bases.len()).sum();
    let sizes: Vec<usize> = CLUSTERS.iter().map(|&(b, d, q)| b + d + q).collect();
    let cluster_drug_counts = apportion(&sizes, N_DRUGS - n_bases);
    let mut next_drug = n_bases;
    for (c, &count) in clusters.iter_mut().zip(&cluster_drug_counts) {
        c.drugs = (next_drug..next_drug + count).collect();
        next_drug += count;
    }
    assert_eq!(next_drug, N_DRUGS);

    // Group coverage: each cluster drug treats a few duplicate groups.
    // coverage[cluster][drug-local] = covered group indices.
    let mut coverage: Vec<Vec<Vec<usize>>> = Vec::with_capacity(clusters.len());
    for cluster in &clusters {
        let n_groups = cluster.bases.len();
        let mut per_drug = Vec::with_capacity(cluster.drugs.len());
        for _ in &cluster.drugs {
            let n_g = (2 + rng.below(3) as usize).min(n_groups);
            per_drug.push(rng.sample_distinct(n_groups, n_g));
        }
        // Every group needs at least one covering drug, or its diseases
        // would depend on the private drug alone.
        for g in 0..n_groups {
            if !per_drug.iter().any(|cov| cov.contains(&g)) {
                let d = rng.below(cluster.drugs.len() as u64) as usize;
                per_drug[d].push(g);
            }
        }
        coverage.push(per_drug);
    }

    // Hubs: distinct cluster drugs that hold the single association of one
    // margin disease each.
    let mut hub_of_margin: Vec<(usize, usize)> = Vec::new();
    for cluster in &clusters {
        let picks = rng.sample_distinct(cluster.drugs.len(), cluster.margins.len());
        for (mi, &pick) in picks.iter().enumerate() {
            hub_of_margin.push((cluster.margins[mi], cluster.drugs[pick]));
        }
    }

    // Steer the positive count to the exact target by adding or removing
    // coverage of singleton groups (group size 1 changes the count by 1).
    // Each group contributes (1 + covers) * size positives through its
    // private drug and covering drugs; each margin disease exactly one.
    let group_size = |cluster: &Cluster, g: usize| cluster.group_members(g).len();
    let mut total = 0usize;
    for (cluster, per_drug) in clusters.iter().zip(&coverage) {
        for g in 0..cluster.bases.len() {
            let covers = per_drug.iter().filter(|cov| cov.contains(&g)).count();
            total += (1 + covers) * group_size(cluster, g);
        }
        total += cluster.margins.len();
    }

    let coverage_target = N_POSITIVES - N_NOISE;
    let mut guard = 0;
    while total != coverage_target {
        guard += 1;
        assert!(guard < 100_000, "positive-count adjustment did not settle");
        if total < coverage_target {
            // Add coverage of a singleton group to a random eligible drug.
            let ci = rng.below(clusters.len() as u64) as usize;
            let cluster = &clusters[ci];
            let singles: Vec<usize> = (0..cluster.bases.len())
                .filter(|&g| group_size(cluster, g) == 1)
                .collect();
            if singles.is_empty() {
                continue;
            }
            let g = singles[rng.below(singles.len() as u64) as usize];
            let d = rng.below(cluster.drugs.len() as u64) as usize;
            if !coverage[ci][d].contains(&g) {
                coverage[ci][d].push(g);
                total += 1;
            }
        } else {
            // Remove a redundant singleton cover; keep each group covered
            // and each drug on at least one group.
            let ci = rng.below(clusters.len() as u64) as usize;
            let cluster = &clusters[ci];
            let d = rng.below(cluster.drugs.len() as u64) as usize;
            if coverage[ci][d].len() < 2 {
                continue;
            }
            let local = rng.below(coverage[ci][d].len() as u64) as usize;
            let g = coverage[ci][d][local];
            if group_size(cluster, g) != 1 {
                continue;
            }
            let covers = coverage[ci].iter().filter(|cov| cov.contains(&g)).count();
            if covers < 2 {
                continue;
            }
            coverage[ci][d].remove(local);
            total -= 1;
        }
    }

    // Assemble the matrix from column supports. Duplicates copy their
    // source column exactly, which is what fixes the rank.
    let mut values = Array2::zeros((N_DRUGS, N_DISEASES));
    let mut base_ordinal = 0usize;
    for (cluster, per_drug) in clusters.iter().zip(&coverage) {
        for (g, _) in cluster.bases.iter().enumerate() {
            let members = cluster.group_members(g);
            for &disease in &members {
                values[(base_ordinal, disease)] = 1.0; // private drug row
                for (local, cov) in per_drug.iter().enumerate() {
                    if cov.contains(&g) {
                        values[(cluster.drugs[local], disease)] = 1.0;
                    }
                }
            }
            base_ordinal += 1;
        }
    }
    for &(margin, hub) in &hub_of_margin {
        values[(hub, margin)] = 1.0;
    }

    // Noise associations land on singleton-group bases only: duplicate
    // columns must stay exact copies and margin columns degree one, or the
    // rank and margin constructions break.
    let singleton_bases: Vec<usize> = clusters
        .iter()
        .flat_map(|cluster| {
            (0..cluster.bases.len())
                .filter(|&g| group_size(cluster, g) == 1)
                .map(|g| cluster.bases[g])
                .collect::<Vec<usize>>()
        })
        .collect();
    let all_cluster_drugs: Vec<usize> = clusters.iter().flat_map(|c| c.drugs.clone()).collect();
    let drug_cluster_of = {
        let mut map = vec![0usize; N_DRUGS];
        for (ci, cluster) in clusters.iter().enumerate() {
            for &d in &cluster.drugs {
                map[d] = ci;
            }
        }
        map
    };
    let mut added = 0;
    while added < N_NOISE {
        let drug = all_cluster_drugs[rng.below(all_cluster_drugs.len() as u64) as usize];
        let disease = singleton_bases[rng.below(singleton_bases.len() as u64) as usize];
        if drug_cluster_of[drug] == cluster_assignments[disease] {
            continue;
        }
        if values[(drug, disease)] == 0.0 {
            values[(drug, disease)] = 1.0;
            added += 1;
        }
    }

    // Similarity matrix: strong within clusters, sub-threshold across.
    let mut similarity = Array2::zeros((N_DISEASES, N_DISEASES));
    for i in 0..N_DISEASES {
        similarity[(i, i)] = 1.0;
    }
    // Generic in-cluster weights sit just above the 0.25 threshold: strong
    // enough to connect the cluster, weak enough that the graph does not
    // inflate scores of never-treated cluster members into false positives.
    for i in 0..N_DISEASES {
        for j in (i + 1)..N_DISEASES {
            let w = if cluster_assignments[i] == cluster_assignments[j] {
                0.26 + 0.14 * rng.uniform()
            } else {
                0.2 * rng.uniform()
            };
            similarity[(i, j)] = w;
            similarity[(j, i)] = w;
        }
    }
    // Duplicates look near-identical to their source.
    for cluster in &clusters {
        for &(dup, src) in &cluster.dups {
            let w = 0.8 + 0.15 * rng.uniform();
            similarity[(dup, cluster.bases[src])] = w;
            similarity[(cluster.bases[src], dup)] = w;
        }
    }
    // Margin diseases resemble what their hub drug treats, so the graph
    // can route evidence back when their only association is masked.
    for (ci, cluster) in clusters.iter().enumerate() {
        for &(margin, hub) in hub_of_margin
            .iter()
            .filter(|&&(m, _)| cluster_assignments[m] == ci)
        {
            let local = cluster.drugs.iter().position(|&d| d == hub).unwrap();
            for &g in &coverage[ci][local] {
                for member in cluster.group_members(g) {
                    let w = 0.78 + 0.15 * rng.uniform();
                    similarity[(margin, member)] = w;
                    similarity[(member, margin)] = w;
                }
            }
        }
    }

    // Class file: the first 13 clusters' base + duplicate members, plus one
    // disease listed under two classes and one class below the size floor.
    let mut class_pairs: Vec<(String, String)> = Vec::new();
    for (ci, cluster) in clusters.iter().take(N_CLASSIFIED_CLUSTERS).enumerate() {
        let class = format!("C{:02}", ci + 1);
        let mut members: Vec<usize> = cluster.bases.clone();
        members.extend(cluster.dups.iter().map(|&(d, _)| d));
        members.sort();
        for disease in members {
            class_pairs.push((disease_id(disease), class.clone()));
        }
    }
    let ambiguous = clusters[N_CLASSIFIED_CLUSTERS].bases[0];
    class_pairs.push((disease_id(ambiguous), "C01".to_string()));
    class_pairs.push((disease_id(ambiguous), "C02".to_string()));
    for &disease in &clusters[N_CLASSIFIED_CLUSTERS + 1].bases[..4] {
        class_pairs.push((disease_id(disease), "C14".to_string()));
    }

    let associations = AssociationMatrix::new(
        values,
        (0..N_DRUGS).map(drug_id).collect(),
        (0..N_DISEASES).map(disease_id).collect(),
    )
    .expect("generated matrix is valid by construction");
    assert_eq!(associations.n_positives(), N_POSITIVES);

    SyntheticDataset {
        associations,
        similarity,
        class_pairs,
        cluster_assignments,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::interpret::DiseaseClassMap;
    use crate::linalg::numerical_rank;
    use std::collections::HashSet;

    fn dataset() -> SyntheticDataset {
        benchmark_scale(77)
    }

    #[test]
    fn shape_statistics_match_the_benchmark() {
        let data = dataset();
        let x = &data.associations;
        assert_eq!(x.n_drugs(), 593);
        assert_eq!(x.n_diseases(), 313);
        assert_eq!(x.n_positives(), 1933);
        assert!((x.density() - 0.0104).abs() < 2e-4);
        assert!(x.row_degrees().iter().all(|&d| d >= 1));
    }

    #[test]
    fn rank_is_exactly_238() {
        let data = dataset();
        assert_eq!(numerical_rank(data.associations.values()), 238);
    }

    #[test]
    fn duplicates_are_exact_and_distinct_columns_count_238() {
        let data = dataset();
        let values = data.associations.values();
        let mut distinct: HashSet<Vec<u8>> = HashSet::new();
        for j in 0..values.ncols() {
            distinct.insert(values.column(j).iter().map(|&v| v as u8).collect());
        }
        assert_eq!(distinct.len(), 238);
    }

    #[test]
    fn forty_margin_diseases_have_degree_one_on_multi_degree_drugs() {
        let data = dataset();
        let values = data.associations.values();
        let margins: Vec<usize> = (0..values.ncols())
            .filter(|&j| values.column(j).sum() == 1.0)
            .collect();
        assert_eq!(margins.len(), 40);
        for j in margins {
            let drug = (0..values.nrows())
                .find(|&i| values[(i, j)] == 1.0)
                .unwrap();
            assert!(
                values.row(drug).sum() >= 2.0,
                "margin column {j} must stay maskable"
            );
        }
    }

    #[test]
    fn similarity_is_a_valid_block_structure() {
        let data = dataset();
        let w = &data.similarity;
        for i in 0..313 {
            assert_eq!(w[(i, i)], 1.0);
            for j in 0..313 {
                assert!((0.0..=1.0).contains(&w[(i, j)]));
                assert_eq!(w[(i, j)], w[(j, i)]);
                if i != j && data.cluster_assignments[i] != data.cluster_assignments[j] {
                    assert!(w[(i, j)] < 0.25, "cross-cluster weight above threshold");
                }
            }
        }
        let graph = build_graph(w, 0.25).unwrap();
        assert!(graph.n_edges() > 1000);
    }

    #[test]
    fn class_file_reduces_to_the_reference_sizes() {
        let data = dataset();
        assert_eq!(data.class_pairs.len(), 182 + 2 + 4);
        let known: HashSet<String> = data.associations.disease_ids().iter().cloned().collect();
        let map = DiseaseClassMap::from_pairs(&data.class_pairs, Some(&known));
        assert_eq!(map.n_classified(), 182);
        assert_eq!(map.dropped_multi_class().len(), 1);
        assert_eq!(map.dropped_small_classes(), &["C14".to_string()]);
        let mut sizes: Vec<usize> = map.class_counts().values().cloned().collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(sizes, vec![38, 25, 25, 16, 13, 13, 10, 9, 9, 7, 7, 5, 5]);
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let a = benchmark_scale(9);
        let b = benchmark_scale(9);
        let c = benchmark_scale(10);
        assert_eq!(a.associations.values(), b.associations.values());
        assert_eq!(a.similarity, b.similarity);
        assert_eq!(a.class_pairs, b.class_pairs);
        assert_ne!(a.associations.values(), c.associations.values());
    }
}
