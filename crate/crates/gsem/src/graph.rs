//! Disease similarity graph and its Laplacian.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Thresholded disease-disease similarity graph.
///
/// Holds the processed adjacency `W` (symmetric, zero diagonal, entries in
/// `[0, 1]`), the degree vector `d` with `d_i = sum_j W_ij`, and the
/// combinatorial Laplacian `L = D - W`. `L` is symmetric positive
/// semidefinite with zero row sums by construction.
#[derive(Debug, Clone)]
pub struct SimilarityGraph {
    adjacency: Array2<f64>,
    degrees: Array1<f64>,
    laplacian: Array2<f64>,
    tau: f64,
}

impl SimilarityGraph {
    /// Graph with no edges over `m` nodes.
    ///
    /// Used when the smoothness penalty is disabled: every graph term is
    /// exactly zero, so fits with this graph match fits of the plain
    /// self-expressive model bit for bit.
    pub fn empty(m: usize) -> Self {
        SimilarityGraph {
            adjacency: Array2::zeros((m, m)),
            degrees: Array1::zeros(m),
            laplacian: Array2::zeros((m, m)),
            tau: 0.0,
        }
    }

    pub fn adjacency(&self) -> &Array2<f64> {
        &self.adjacency
    }

    pub fn degrees(&self) -> &Array1<f64> {
        &self.degrees
    }

    pub fn laplacian(&self) -> &Array2<f64> {
        &self.laplacian
    }

    /// Threshold that was applied when the graph was built.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        self.adjacency.nrows()
    }

    /// Number of undirected edges with positive weight.
    pub fn n_edges(&self) -> usize {
        let m = self.size();
        let mut count = 0;
        for i in 0..m {
            for j in (i + 1)..m {
                if self.adjacency[(i, j)] > 0.0 {
                    count += 1;
                }
            }
        }
        count
    }
}

/// Builds a similarity graph from a raw similarity matrix.
///
/// Processing order: symmetrize as `(S + S^T) / 2`, zero the diagonal
/// (self-similarity carries no smoothing information), then zero every
/// entry strictly below `tau`. Degrees and the Laplacian are computed from
/// the thresholded adjacency. The raw matrix must be square with entries
/// in `[0, 1]`; it does not need to be symmetric. `tau` must lie in
/// `[0, 1]`. A threshold that removes every edge is allowed and yields an
/// edgeless graph.
pub fn build_graph(raw: &Array2<f64>, tau: f64) -> Result<SimilarityGraph> {
    let (rows, cols) = raw.dim();
    if rows != cols {
        return Err(Error::InvalidData(format!(
            "similarity matrix must be square, got {rows}x{cols}"
        )));
    }
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::InvalidArgument(format!(
            "similarity threshold must lie in [0, 1], got {tau}"
        )));
    }
    for ((i, j), &v) in raw.indexed_iter() {
        if !v.is_finite() || !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidData(format!(
                "similarity entry ({i}, {j}) is {v}, expected a value in [0, 1]"
            )));
        }
    }

    let m = rows;
    let mut adjacency = Array2::zeros((m, m));
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            let w = 0.5 * (raw[(i, j)] + raw[(j, i)]);
            adjacency[(i, j)] = if w < tau { 0.0 } else { w };
        }
    }

    let degrees: Array1<f64> = adjacency.rows().into_iter().map(|r| r.sum()).collect();
    let mut laplacian = -&adjacency;
    for i in 0..m {
        laplacian[(i, i)] = degrees[i];
    }

    Ok(SimilarityGraph {
        adjacency,
        degrees,
        laplacian,
        tau,
    })
}
