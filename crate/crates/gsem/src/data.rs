//! Drug-disease association matrix container.

use ndarray::Array2;
use std::collections::HashSet;

use crate::error::{Error, Result};

/// Binary drug-disease association matrix with row and column identifiers.
///
/// Rows are drugs, columns are diseases. Entries are exactly 0.0 or 1.0;
/// the constructor rejects anything else, so downstream code can rely on
/// binary values without re-checking.
#[derive(Debug, Clone)]
pub struct AssociationMatrix {
    values: Array2<f64>,
    drug_ids: Vec<String>,
    disease_ids: Vec<String>,
}

impl AssociationMatrix {
    /// Builds a validated association matrix.
    ///
    /// Requires at least one drug and at least two diseases (the model
    /// expresses each disease through the others, which needs a second
    /// column), matching identifier counts, unique identifiers, and strictly
    /// binary entries. Rows with no positive entries are allowed here; the
    /// file loader rejects them because they carry no training signal.
    pub fn new(
        values: Array2<f64>,
        drug_ids: Vec<String>,
        disease_ids: Vec<String>,
    ) -> Result<Self> {
        let (n, m) = values.dim();
        if n == 0 {
            return Err(Error::InvalidData("association matrix has no drugs".into()));
        }
        if m < 2 {
            return Err(Error::InvalidData(format!(
                "association matrix needs at least 2 diseases, got {m}"
            )));
        }
        if drug_ids.len() != n {
            return Err(Error::DimensionMismatch {
                context: "drug identifiers",
                expected: n,
                got: drug_ids.len(),
            });
        }
        if disease_ids.len() != m {
            return Err(Error::DimensionMismatch {
                context: "disease identifiers",
                expected: m,
                got: disease_ids.len(),
            });
        }
        check_unique(&drug_ids, "drug")?;
        check_unique(&disease_ids, "disease")?;
        for ((i, j), &v) in values.indexed_iter() {
            if v != 0.0 && v != 1.0 {
                return Err(Error::InvalidData(format!(
                    "association entry ({i}, {j}) is {v}, expected 0 or 1"
                )));
            }
        }
        Ok(AssociationMatrix {
            values,
            drug_ids,
            disease_ids,
        })
    }

    /// The raw matrix, drugs by diseases.
    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn drug_ids(&self) -> &[String] {
        &self.drug_ids
    }

    pub fn disease_ids(&self) -> &[String] {
        &self.disease_ids
    }

    pub fn n_drugs(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_diseases(&self) -> usize {
        self.values.ncols()
    }

    /// Coordinates of all positive entries in row-major order.
    pub fn positives(&self) -> Vec<(usize, usize)> {
        self.values
            .indexed_iter()
            .filter(|&(_, &v)| v == 1.0)
            .map(|(ix, _)| ix)
            .collect()
    }

    /// Number of positive entries.
    pub fn n_positives(&self) -> usize {
        self.values.iter().filter(|&&v| v == 1.0).count()
    }

    /// Fraction of entries that are positive.
    pub fn density(&self) -> f64 {
        self.n_positives() as f64 / (self.n_drugs() * self.n_diseases()) as f64
    }

    /// Positive count per drug row.
    pub fn row_degrees(&self) -> Vec<usize> {
        self.values
            .rows()
            .into_iter()
            .map(|row| row.iter().filter(|&&v| v == 1.0).count())
            .collect()
    }

    /// Returns a copy with the given entries set to zero.
    ///
    /// Every coordinate must currently be a positive entry; masking a zero
    /// indicates a bookkeeping bug in the caller, so it is an error.
    pub fn with_masked(&self, coords: &[(usize, usize)]) -> Result<Self> {
        let mut values = self.values.clone();
        for &(i, j) in coords {
            if i >= self.n_drugs() || j >= self.n_diseases() {
                return Err(Error::InvalidArgument(format!(
                    "masked coordinate ({i}, {j}) is outside a {}x{} matrix",
                    self.n_drugs(),
                    self.n_diseases()
                )));
            }
            if values[(i, j)] != 1.0 {
                return Err(Error::InvalidArgument(format!(
                    "masked coordinate ({i}, {j}) is not a positive entry"
                )));
            }
            values[(i, j)] = 0.0;
        }
        Ok(AssociationMatrix {
            values,
            drug_ids: self.drug_ids.clone(),
            disease_ids: self.disease_ids.clone(),
        })
    }
}

fn check_unique(ids: &[String], kind: &str) -> Result<()> {
    let mut seen = HashSet::with_capacity(ids.len());
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(Error::InvalidData(format!("duplicate {kind} id: {id}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn ids(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    #[test]
    fn accepts_binary_matrix() {
        let x = AssociationMatrix::new(
            array![[1.0, 0.0, 1.0], [0.0, 1.0, 0.0]],
            ids("dr", 2),
            ids("di", 3),
        )
        .unwrap();
        assert_eq!(x.n_drugs(), 2);
        assert_eq!(x.n_diseases(), 3);
        assert_eq!(x.n_positives(), 3);
        assert_eq!(x.positives(), vec![(0, 0), (0, 2), (1, 1)]);
        assert!((x.density() - 0.5).abs() < 1e-15);
        assert_eq!(x.row_degrees(), vec![2, 1]);
    }

    #[test]
    fn rejects_non_binary_entries() {
        let err = AssociationMatrix::new(array![[0.5, 1.0]], ids("dr", 1), ids("di", 2));
        assert!(matches!(err, Err(Error::InvalidData(_))));
    }

    #[test]
    fn rejects_single_disease() {
        let err = AssociationMatrix::new(array![[1.0], [0.0]], ids("dr", 2), ids("di", 1));
        assert!(matches!(err, Err(Error::InvalidData(_))));
    }

    #[test]
    fn rejects_duplicate_ids() {
        let err = AssociationMatrix::new(
            array![[1.0, 0.0]],
            vec!["a".into()],
            vec!["x".into(), "x".into()],
        );
        assert!(matches!(err, Err(Error::InvalidData(_))));
    }

    #[test]
    fn rejects_id_count_mismatch() {
        let err = AssociationMatrix::new(array![[1.0, 0.0]], ids("dr", 2), ids("di", 2));
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn masking_zeroes_only_requested_positives() {
        let x = AssociationMatrix::new(
            array![[1.0, 0.0, 1.0], [0.0, 1.0, 0.0]],
            ids("dr", 2),
            ids("di", 3),
        )
        .unwrap();
        let masked = x.with_masked(&[(0, 2)]).unwrap();
        assert_eq!(masked.values(), &array![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        // Original is untouched.
        assert_eq!(x.n_positives(), 3);
    }

    #[test]
    fn masking_a_zero_entry_is_an_error() {
        let x = AssociationMatrix::new(array![[1.0, 0.0]], ids("dr", 1), ids("di", 2)).unwrap();
        assert!(matches!(
            x.with_masked(&[(0, 1)]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            x.with_masked(&[(5, 0)]),
            Err(Error::InvalidArgument(_))
        ));
    }
}
