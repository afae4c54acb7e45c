//! Pairwise cosine similarity matrix and the collection similarity
//! score.
//!
//! The score condenses an `n x n` cosine matrix `D` into a scalar
//! `s` in `[0, 1]`: with `N` the mask holding zeros on the diagonal and
//! ones elsewhere, `s` is the Frobenius norm of the elementwise product
//! `N ∘ D` over the Frobenius norm of `N` itself, i.e.
//! `sqrt(sum_{i != j} D[i][j]^2) / sqrt(n(n-1))`. An identity matrix
//! (no shared vocabulary) scores 0 and an all-ones matrix (duplicate
//! content) scores 1.

use thiserror::Error;

use crate::text::TermVector;

/// Entries may exceed [0, 1] by at most this much before they are
/// treated as upstream corruption.
const ENTRY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SimilarityError {
    #[error("vectors have different vocabulary sizes ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("collection has {0} vectors, need at least 2")]
    CorpusTooSmall(usize),
    #[error("matrix entry ({row},{col}) = {value} outside [0, 1]")]
    ValueOutOfRange { row: usize, col: usize, value: f64 },
}

/// Cosine similarity of two TF-IDF vectors; 0 when either norm is 0.
pub fn cosine(a: &TermVector, b: &TermVector) -> Result<f64, SimilarityError> {
    if a.dim() != b.dim() {
        return Err(SimilarityError::DimensionMismatch(a.dim(), b.dim()));
    }
    if a.norm() == 0.0 || b.norm() == 0.0 {
        return Ok(0.0);
    }
    Ok(a.dot(b) / (a.norm() * b.norm()))
}

/// Symmetric matrix of pairwise cosine similarities.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    values: Vec<f64>, // row-major n*n
}

impl SimilarityMatrix {
    /// Validate and wrap a full matrix given as rows.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, SimilarityError> {
        let n = rows.len();
        let mut values = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            for (j, &v) in row.iter().enumerate() {
                validate_entry(i, j, v)?;
                values.push(v);
            }
        }
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    /// Row-major dump at full float precision, one row per line.
    pub fn to_debug_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| format!("{}", self.get(i, j))).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

fn validate_entry(row: usize, col: usize, value: f64) -> Result<(), SimilarityError> {
    if !(-ENTRY_TOLERANCE..=1.0 + ENTRY_TOLERANCE).contains(&value) {
        return Err(SimilarityError::ValueOutOfRange { row, col, value });
    }
    Ok(())
}

/// Compute the full pairwise cosine matrix, diagonal included
/// (self-cosine, which is 0 for a zero vector).
pub fn pairwise_matrix(vectors: &[TermVector]) -> Result<SimilarityMatrix, SimilarityError> {
    let n = vectors.len();
    if n < 2 {
        return Err(SimilarityError::CorpusTooSmall(n));
    }
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let c = cosine(&vectors[i], &vectors[j])?;
            validate_entry(i, j, c)?;
            values[i * n + j] = c;
            values[j * n + i] = c;
        }
    }
    Ok(SimilarityMatrix { n, values })
}

/// Scalar similarity of a collection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectionScore {
    pub s: f64,
    pub n: usize,
    /// Frobenius norm of the off-diagonal (masked) entries.
    pub masked_norm: f64,
    /// Frobenius norm of the mask itself, `sqrt(n(n-1))`.
    pub mask_norm: f64,
}

/// Collapse a similarity matrix into the collection score.
pub fn collection_score(d: &SimilarityMatrix) -> Result<CollectionScore, SimilarityError> {
    let n = d.n;
    if n < 2 {
        return Err(SimilarityError::CorpusTooSmall(n));
    }
    let mut masked_sq = 0.0;
    for i in 0..n {
        for j in 0..n {
            let v = d.get(i, j);
            validate_entry(i, j, v)?;
            if i != j {
                masked_sq += v * v;
            }
        }
    }
    let masked_norm = masked_sq.sqrt();
    let mask_norm = (n as f64 * (n as f64 - 1.0)).sqrt();
    Ok(CollectionScore { s: masked_norm / mask_norm, n, masked_norm, mask_norm })
}

/// Collection score with same-group pairs masked out along with the
/// diagonal. Off by default in the pipeline; `groups[i]` labels vector
/// `i` (for example with its site).
pub fn grouped_collection_score(
    d: &SimilarityMatrix,
    groups: &[usize],
) -> Result<CollectionScore, SimilarityError> {
    let n = d.n;
    if n < 2 {
        return Err(SimilarityError::CorpusTooSmall(n));
    }
    assert_eq!(groups.len(), n, "one group label per vector");
    let mut masked_sq = 0.0;
    let mut mask_count = 0usize;
    for i in 0..n {
        for j in 0..n {
            let v = d.get(i, j);
            validate_entry(i, j, v)?;
            if i != j && groups[i] != groups[j] {
                masked_sq += v * v;
                mask_count += 1;
            }
        }
    }
    let masked_norm = masked_sq.sqrt();
    let mask_norm = (mask_count as f64).sqrt();
    let s = if mask_count == 0 { 0.0 } else { masked_norm / mask_norm };
    Ok(CollectionScore { s, n, masked_norm, mask_norm })
}

/// Frobenius norm of an arbitrary matrix given as rows.
pub fn frobenius_norm(rows: &[Vec<f64>]) -> f64 {
    rows.iter()
        .flat_map(|r| r.iter())
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
}
