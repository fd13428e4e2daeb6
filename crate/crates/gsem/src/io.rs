//! Tab-separated file formats for matrices, classes and reports.
//!
//! All files are plain TSV with a header line. Matrices are dense with row
//! labels in the first column and column identifiers in the header;
//! association data may instead be an edge list with header `drug\tdisease`.
//! Identifier order is canonicalized by sorting, so matrices loaded from
//! differently ordered files always agree. Writers emit deterministic
//! bytes: no timestamps, stable orderings, default float formatting.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::Write as _;
use std::path::Path;

use ndarray::Array2;

use crate::data::AssociationMatrix;
use crate::error::{Error, Result};
use crate::eval::{EvalReport, GridSearchResult};
use crate::interpret::{DiseaseClassMap, Network, SimilarityAnalysis};
use crate::model::{CoefficientMatrix, FitOptions, Hyperparameters};
use crate::solver::FitResult;

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let content = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(content
        .lines()
        .map(|l| l.trim_end_matches('\r').to_string())
        .collect())
}

fn write_text(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|source| Error::Io {
                path: parent.to_path_buf(),
                source,
            })?;
        }
    }
    let mut file = fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    file.write_all(content.as_bytes())
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}

/// Formats a float for report tables: plain decimal in the ordinary range,
/// scientific for magnitudes below 1e-4 or at 1e16 and above, where the
/// default display would span dozens of digits.
fn fmt_float(v: f64) -> String {
    if v != 0.0 && v.is_finite() && !(1e-4..1e16).contains(&v.abs()) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

fn parse_value(field: &str, path: &Path, line: usize) -> Result<f64> {
    field.parse::<f64>().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("expected a number, got {field:?}"),
    })
}

/// Loads a dense labelled TSV matrix: header with column ids (first cell is
/// a corner label and ignored), one row label per data line.
fn load_dense(path: &Path) -> Result<(Vec<String>, Vec<String>, Array2<f64>)> {
    let lines = read_lines(path)?;
    let mut iter = lines
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = iter
        .next()
        .ok_or_else(|| Error::InvalidData(format!("{}: file is empty", path.display())))?;
    let header_cells: Vec<&str> = header.split('\t').collect();
    if header_cells.len() < 3 {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: "dense matrix header needs a corner label and at least 2 columns".into(),
        });
    }
    let col_ids: Vec<String> = header_cells[1..].iter().map(|s| s.to_string()).collect();

    let mut row_ids = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in iter {
        let lineno = idx + 1;
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != col_ids.len() + 1 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                message: format!(
                    "expected {} columns, got {}",
                    col_ids.len() + 1,
                    cells.len()
                ),
            });
        }
        row_ids.push(cells[0].to_string());
        let mut row = Vec::with_capacity(col_ids.len());
        for cell in &cells[1..] {
            row.push(parse_value(cell, path, lineno)?);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::InvalidData(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    let matrix = Array2::from_shape_fn((rows.len(), col_ids.len()), |(i, j)| rows[i][j]);
    Ok((row_ids, col_ids, matrix))
}

fn sorted_unique(ids: &[String], kind: &str, path: &Path) -> Result<Vec<String>> {
    let mut sorted = ids.to_vec();
    sorted.sort();
    for pair in sorted.windows(2) {
        if pair[0] == pair[1] {
            return Err(Error::InvalidData(format!(
                "{}: duplicate {kind} id {:?}",
                path.display(),
                pair[0]
            )));
        }
    }
    Ok(sorted)
}

/// Loads associations from either an edge list (header `drug\tdisease`) or
/// a dense 0/1 matrix with drug rows and disease columns.
///
/// Identifiers are canonicalized to sorted order in both dimensions.
/// Duplicate edges collapse with a warning; a drug without any association
/// is rejected because it carries no training signal.
pub fn load_associations(path: &Path) -> Result<AssociationMatrix> {
    let lines = read_lines(path)?;
    let first = lines
        .iter()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| Error::InvalidData(format!("{}: file is empty", path.display())))?;
    let header_cells: Vec<&str> = first.split('\t').collect();
    if header_cells == ["drug", "disease"] {
        load_association_edges(path, &lines)
    } else {
        load_association_dense(path)
    }
}

fn load_association_edges(path: &Path, lines: &[String]) -> Result<AssociationMatrix> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    let mut seen_header = false;
    for (idx, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if !seen_header {
            seen_header = true;
            continue;
        }
        let lineno = idx + 1;
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != 2 || cells[0].is_empty() || cells[1].is_empty() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                message: "expected two tab-separated identifiers".into(),
            });
        }
        pairs.push((cells[0].to_string(), cells[1].to_string()));
    }
    if pairs.is_empty() {
        return Err(Error::InvalidData(format!(
            "{}: no associations listed",
            path.display()
        )));
    }

    let total = pairs.len();
    pairs.sort();
    pairs.dedup();
    if pairs.len() < total {
        log::warn!(
            "{}: collapsed {} duplicate associations",
            path.display(),
            total - pairs.len()
        );
    }

    let drug_ids: Vec<String> = {
        let set: HashSet<&String> = pairs.iter().map(|(d, _)| d).collect();
        let mut v: Vec<String> = set.into_iter().cloned().collect();
        v.sort();
        v
    };
    let disease_ids: Vec<String> = {
        let set: HashSet<&String> = pairs.iter().map(|(_, d)| d).collect();
        let mut v: Vec<String> = set.into_iter().cloned().collect();
        v.sort();
        v
    };
    let drug_index: BTreeMap<&str, usize> = drug_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let disease_index: BTreeMap<&str, usize> = disease_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let mut values = Array2::zeros((drug_ids.len(), disease_ids.len()));
    for (drug, disease) in &pairs {
        values[(drug_index[drug.as_str()], disease_index[disease.as_str()])] = 1.0;
    }
    AssociationMatrix::new(values, drug_ids, disease_ids)
}

fn load_association_dense(path: &Path) -> Result<AssociationMatrix> {
    let (row_ids, col_ids, matrix) = load_dense(path)?;
    for &v in matrix.iter() {
        if v != 0.0 && v != 1.0 {
            return Err(Error::InvalidData(format!(
                "{}: association entries must be 0 or 1, found {v}",
                path.display()
            )));
        }
    }
    let drug_sorted = sorted_unique(&row_ids, "drug", path)?;
    let disease_sorted = sorted_unique(&col_ids, "disease", path)?;
    let row_pos: BTreeMap<&str, usize> = row_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let col_pos: BTreeMap<&str, usize> = col_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let values = Array2::from_shape_fn((drug_sorted.len(), disease_sorted.len()), |(i, j)| {
        matrix[(
            row_pos[drug_sorted[i].as_str()],
            col_pos[disease_sorted[j].as_str()],
        )]
    });
    for (i, id) in drug_sorted.iter().enumerate() {
        if values.row(i).sum() == 0.0 {
            return Err(Error::InvalidData(format!(
                "{}: drug {id} has no associations",
                path.display()
            )));
        }
    }
    AssociationMatrix::new(values, drug_sorted, disease_sorted)
}

/// Writes associations as an edge list, one row per positive pair.
pub fn write_association_edges(x: &AssociationMatrix, path: &Path) -> Result<()> {
    let mut out = String::from("drug\tdisease\n");
    for (i, j) in x.positives() {
        out.push_str(&format!("{}\t{}\n", x.drug_ids()[i], x.disease_ids()[j]));
    }
    write_text(path, &out)
}

/// Writes associations as a dense 0/1 matrix.
pub fn write_associations(x: &AssociationMatrix, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str("drug");
    for id in x.disease_ids() {
        out.push('\t');
        out.push_str(id);
    }
    out.push('\n');
    for (i, id) in x.drug_ids().iter().enumerate() {
        out.push_str(id);
        for j in 0..x.n_diseases() {
            out.push('\t');
            out.push_str(if x.values()[(i, j)] == 1.0 { "1" } else { "0" });
        }
        out.push('\n');
    }
    write_text(path, &out)
}

/// Loads a disease-disease similarity matrix and reorders it to the given
/// disease order.
///
/// The file must cover exactly the expected diseases (matched by id, not
/// position) with entries in [0, 1].
pub fn load_similarity(path: &Path, expected: &[String]) -> Result<Array2<f64>> {
    let (row_ids, col_ids, matrix) = load_dense(path)?;
    if row_ids.len() != col_ids.len() {
        return Err(Error::InvalidData(format!(
            "{}: similarity matrix must be square, got {}x{}",
            path.display(),
            row_ids.len(),
            col_ids.len()
        )));
    }
    let rows = sorted_unique(&row_ids, "disease", path)?;
    let cols = sorted_unique(&col_ids, "disease", path)?;
    if rows != cols {
        return Err(Error::InvalidData(format!(
            "{}: row and column identifiers disagree",
            path.display()
        )));
    }
    let mut expected_sorted = expected.to_vec();
    expected_sorted.sort();
    if rows != expected_sorted {
        let have: HashSet<&String> = row_ids.iter().collect();
        let want: HashSet<&String> = expected.iter().collect();
        let missing: Vec<&str> = expected
            .iter()
            .filter(|id| !have.contains(id))
            .map(|s| s.as_str())
            .collect();
        let extra: Vec<&str> = row_ids
            .iter()
            .filter(|id| !want.contains(id))
            .map(|s| s.as_str())
            .collect();
        return Err(Error::InvalidData(format!(
            "{}: similarity diseases do not match associations (missing: {:?}, extra: {:?})",
            path.display(),
            missing,
            extra
        )));
    }
    for &v in matrix.iter() {
        if !v.is_finite() || !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidData(format!(
                "{}: similarity entries must lie in [0, 1], found {v}",
                path.display()
            )));
        }
    }
    let row_pos: BTreeMap<&str, usize> = row_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let col_pos: BTreeMap<&str, usize> = col_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    Ok(Array2::from_shape_fn(
        (expected.len(), expected.len()),
        |(i, j)| matrix[(row_pos[expected[i].as_str()], col_pos[expected[j].as_str()])],
    ))
}

fn write_dense(corner: &str, ids: &[String], matrix: &Array2<f64>, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(corner);
    for id in ids {
        out.push('\t');
        out.push_str(id);
    }
    out.push('\n');
    for (i, id) in ids.iter().enumerate() {
        out.push_str(id);
        for j in 0..ids.len() {
            out.push('\t');
            out.push_str(&matrix[(i, j)].to_string());
        }
        out.push('\n');
    }
    write_text(path, &out)
}

/// Writes a square disease-labelled matrix (similarity or coefficients).
pub fn write_square_matrix(matrix: &Array2<f64>, ids: &[String], path: &Path) -> Result<()> {
    write_dense("disease", ids, matrix, path)
}

/// Loads a coefficient matrix written by [`write_square_matrix`] and checks
/// it against the expected disease order.
pub fn load_coefficients(path: &Path, expected: &[String]) -> Result<CoefficientMatrix> {
    let (row_ids, col_ids, matrix) = load_dense(path)?;
    if row_ids != expected || col_ids != expected {
        return Err(Error::InvalidData(format!(
            "{}: coefficient matrix diseases do not match the association matrix",
            path.display()
        )));
    }
    CoefficientMatrix::new(matrix)
}

/// Writes nonzero coefficients as triplets, row-major.
pub fn write_coefficients_sparse(c: &CoefficientMatrix, ids: &[String], path: &Path) -> Result<()> {
    let mut out = String::from("row_disease\tcol_disease\tvalue\n");
    for ((i, j), &v) in c.values().indexed_iter() {
        if v != 0.0 {
            out.push_str(&format!("{}\t{}\t{v}\n", ids[i], ids[j]));
        }
    }
    write_text(path, &out)
}

/// Loads disease class assignments from a `disease\tclass` TSV and applies
/// the uniqueness and minimum-size filters.
pub fn load_classes(path: &Path, known: &HashSet<String>) -> Result<DiseaseClassMap> {
    let lines = read_lines(path)?;
    let mut pairs = Vec::new();
    let mut seen_header = false;
    for (idx, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let cells: Vec<&str> = line.split('\t').collect();
        if !seen_header {
            seen_header = true;
            if cells == ["disease", "class"] {
                continue;
            }
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                message: "expected header: disease\tclass".into(),
            });
        }
        if cells.len() != 2 || cells[0].is_empty() || cells[1].is_empty() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                message: "expected two tab-separated fields".into(),
            });
        }
        pairs.push((cells[0].to_string(), cells[1].to_string()));
    }
    if pairs.is_empty() {
        return Err(Error::InvalidData(format!(
            "{}: no class assignments",
            path.display()
        )));
    }
    Ok(DiseaseClassMap::from_pairs(&pairs, Some(known)))
}

/// Writes class assignments in the loadable format.
pub fn write_classes(pairs: &[(String, String)], path: &Path) -> Result<()> {
    let mut out = String::from("disease\tclass\n");
    for (disease, class) in pairs {
        out.push_str(&format!("{disease}\t{class}\n"));
    }
    write_text(path, &out)
}

/// Writes fit diagnostics as key-value rows.
pub fn write_fit_summary(
    result: &FitResult,
    hp: &Hyperparameters,
    opts: &FitOptions,
    path: &Path,
) -> Result<()> {
    let terms = result.term_history.last().expect("history never empty");
    let mut out = String::from("key\tvalue\n");
    let mut push = |k: &str, v: String| out.push_str(&format!("{k}\t{v}\n"));
    push("alpha", fmt_float(hp.alpha));
    push("beta", fmt_float(hp.beta));
    push("lambda", fmt_float(hp.lambda));
    push("gamma", fmt_float(hp.gamma));
    push("tau", fmt_float(hp.tau));
    push("maxiter", opts.maxiter.to_string());
    push("tol", fmt_float(opts.tol));
    push("init_bound", fmt_float(opts.init_bound));
    push("epsilon", fmt_float(opts.epsilon));
    push("seed", opts.seed.to_string());
    push("iterations", result.iterations.to_string());
    push("converged", result.converged.to_string());
    push("objective", fmt_float(result.objective()));
    push("reconstruction", fmt_float(terms.reconstruction));
    push("ridge", fmt_float(terms.ridge));
    push("l1", fmt_float(terms.l1));
    push("smoothness", fmt_float(terms.smoothness));
    push("diagonal", fmt_float(terms.diagonal));
    push("kkt_residual", fmt_float(result.kkt_residual));
    push(
        "kkt_residual_initial",
        fmt_float(result.kkt_residual_initial),
    );
    push("max_diagonal", fmt_float(result.max_diagonal));
    push("sparsity", fmt_float(result.coefficients.sparsity()));
    push(
        "monotonicity_violations",
        result.monotonicity_violations.to_string(),
    );
    write_text(path, &out)
}

/// Writes the per-iteration histories: objective, step size and terms.
pub fn write_fit_history(result: &FitResult, path: &Path) -> Result<()> {
    let mut out = String::from(
        "iteration\tobjective\tdelta\treconstruction\tridge\tl1\tsmoothness\tdiagonal\n",
    );
    for (t, (q, terms)) in result
        .objective_history
        .iter()
        .zip(&result.term_history)
        .enumerate()
    {
        let delta = if t == 0 {
            "NA".to_string()
        } else {
            fmt_float(result.delta_history[t - 1])
        };
        out.push_str(&format!(
            "{t}\t{}\t{delta}\t{}\t{}\t{}\t{}\t{}\n",
            fmt_float(*q),
            fmt_float(terms.reconstruction),
            fmt_float(terms.ridge),
            fmt_float(terms.l1),
            fmt_float(terms.smoothness),
            fmt_float(terms.diagonal)
        ));
    }
    write_text(path, &out)
}

/// Writes the per-fold AUPR table: one row per fold and ratio.
pub fn write_eval_folds(report: &EvalReport, path: &Path) -> Result<()> {
    let mut out = String::from("fold\tratio\taupr\n");
    for f in 0..report.k {
        for (ri, ratio) in report.ratios.iter().enumerate() {
            out.push_str(&format!("{f}\t{ratio}\t{}\n", report.aupr[ri][f]));
        }
    }
    write_text(path, &out)
}

/// Writes per-ratio summary statistics.
pub fn write_eval_summary(report: &EvalReport, path: &Path) -> Result<()> {
    let mut out = String::from("ratio\tmean_aupr\tsd_aupr\tfolds\n");
    for (ri, ratio) in report.ratios.iter().enumerate() {
        out.push_str(&format!(
            "{ratio}\t{}\t{}\t{}\n",
            report.mean(ri),
            report.sd(ri),
            report.k
        ));
    }
    write_text(path, &out)
}

/// Writes per-fold fit diagnostics of a cross-validation run.
pub fn write_eval_fits(report: &EvalReport, path: &Path) -> Result<()> {
    let mut out = String::from("fold\tconverged\titerations\n");
    for f in 0..report.k {
        out.push_str(&format!(
            "{f}\t{}\t{}\n",
            report.fold_converged[f], report.fold_iterations[f]
        ));
    }
    write_text(path, &out)
}

/// Writes the full grid-search table, one row per grid point. Failed fits
/// appear as `NA`.
pub fn write_grid_table(result: &GridSearchResult, path: &Path) -> Result<()> {
    let k = result.table.first().map(|p| p.per_fold.len()).unwrap_or(0);
    let mut out = String::from("alpha\tbeta\tlambda\ttau\tgamma\tmean_aupr");
    for f in 0..k {
        out.push_str(&format!("\tfold_{f}"));
    }
    out.push('\n');
    let fmt = |v: &Option<f64>| v.map(|x| x.to_string()).unwrap_or_else(|| "NA".into());
    for point in &result.table {
        let hp = &point.hyperparameters;
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            hp.alpha,
            hp.beta,
            hp.lambda,
            hp.tau,
            hp.gamma,
            fmt(&point.mean)
        ));
        for score in &point.per_fold {
            out.push('\t');
            out.push_str(&fmt(score));
        }
        out.push('\n');
    }
    write_text(path, &out)
}

/// Writes the winning hyperparameters as a TOML fragment that can be fed
/// back as the `[hyperparameters]` section of a run configuration.
pub fn write_best_hyperparameters(hp: &Hyperparameters, path: &Path) -> Result<()> {
    let body = toml::to_string(hp)
        .map_err(|e| Error::InvalidData(format!("cannot serialize hyperparameters: {e}")))?;
    write_text(path, &format!("[hyperparameters]\n{body}"))
}

/// Writes the similarity-analysis outputs into a directory: the statistics
/// table, both value dumps, the zero-row list and the similarity matrix.
pub fn write_analysis(
    analysis: &SimilarityAnalysis,
    disease_ids: &[String],
    dir: &Path,
) -> Result<()> {
    let mut stats = String::from("key\tvalue\n");
    let mut push = |k: &str, v: String| stats.push_str(&format!("{k}\t{v}\n"));
    push("n_intra_pairs", analysis.intra_values.len().to_string());
    push("n_inter_pairs", analysis.inter_values.len().to_string());
    push("mean_intra", fmt_float(analysis.mean_intra()));
    push("mean_inter", fmt_float(analysis.mean_inter()));
    push("u_statistic", fmt_float(analysis.test.u_statistic));
    push("u_mean", fmt_float(analysis.test.u_mean));
    push("z", fmt_float(analysis.test.z));
    push("p_value", fmt_float(analysis.test.p_value));
    push("log10_p", fmt_float(analysis.test.log10_p));
    push("n_zero_rows", analysis.zero_rows.len().to_string());
    write_text(&dir.join("class_similarity_stats.tsv"), &stats)?;

    let dump = |values: &[f64]| {
        let mut out = String::from("value\n");
        for v in values {
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    };
    write_text(
        &dir.join("intra_class_values.tsv"),
        &dump(&analysis.intra_values),
    )?;
    write_text(
        &dir.join("inter_class_values.tsv"),
        &dump(&analysis.inter_values),
    )?;

    let mut zeros = String::from("disease\n");
    for &i in &analysis.zero_rows {
        zeros.push_str(&disease_ids[i]);
        zeros.push('\n');
    }
    write_text(&dir.join("zero_rows.tsv"), &zeros)?;

    write_square_matrix(
        &analysis.similarity,
        disease_ids,
        &dir.join("similarity.tsv"),
    )
}

/// Writes the network node and edge lists.
pub fn write_network(network: &Network, nodes_path: &Path, edges_path: &Path) -> Result<()> {
    let mut nodes = String::from("id\tclass\n");
    for node in &network.nodes {
        nodes.push_str(&format!("{}\t{}\n", node.id, node.class));
    }
    write_text(nodes_path, &nodes)?;

    let mut edges = String::from("source\ttarget\tweight\n");
    for edge in &network.edges {
        edges.push_str(&format!(
            "{}\t{}\t{}\n",
            edge.source, edge.target, edge.weight
        ));
    }
    write_text(edges_path, &edges)
}
