//! Acoustic affinity graph: pairwise embedding distances, nearest-neighbor
//! binarization, and symmetrization into the undirected matrix P_ud.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::matrix::AffinityMatrix;
use crate::num::Real;

/// Per-segment speaker embeddings; row i is aligned to segment index i.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet<T: Real> {
    data: Array2<T>,
}

impl<T: Real> EmbeddingSet<T> {
    /// Validates a positive dimension and finite entries.
    pub fn from_array(data: Array2<T>) -> Result<Self> {
        if data.ncols() == 0 {
            return Err(Error::InvalidInput(
                "embedding dimension must be positive".into(),
            ));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "embedding entries must be finite".into(),
            ));
        }
        Ok(Self { data })
    }

    /// Number of embeddings (M).
    pub fn len(&self) -> usize {
        self.data.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.data.ncols()
    }

    pub fn as_array(&self) -> &Array2<T> {
        &self.data
    }
}

/// Euclidean distance matrix between all embedding rows (role: raw P).
///
/// The diagonal is zero and the output is symmetric by construction.
pub fn pairwise_distance_matrix<T: Real>(emb: &EmbeddingSet<T>) -> Result<AffinityMatrix<T>> {
    let m = emb.len();
    if m < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 embeddings to cluster, got {m}"
        )));
    }
    let data = emb.as_array();
    let mut p = Array2::zeros((m, m));
    for i in 0..m {
        for j in (i + 1)..m {
            let mut sq = T::zero();
            for d in 0..emb.dim() {
                let diff = data[[i, d]] - data[[j, d]];
                sq = sq + diff * diff;
            }
            let dist = sq.sqrt();
            p[[i, j]] = dist;
            p[[j, i]] = dist;
        }
    }
    Ok(AffinityMatrix::from_array_unchecked(p))
}

/// Keeps, per row, every entry at or below the N-th smallest value of that
/// row (diagonal included) as a 1, zeroing the rest.
///
/// Ties at the threshold are all kept, so a row may carry more than N
/// ones; the self-distance 0 always survives. N >= M turns every row into
/// all ones.
pub fn binarize_knn<T: Real>(p: &AffinityMatrix<T>, n: usize) -> AffinityMatrix<T> {
    assert!(n >= 1, "neighbor count must be >= 1");
    let m = p.size();
    let mut out = Array2::zeros((m, m));
    let mut sorted = Vec::with_capacity(m);
    for i in 0..m {
        sorted.clear();
        sorted.extend((0..m).map(|j| p.get(i, j)));
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("affinity entries are finite"));
        let threshold = sorted[n.min(m) - 1];
        for j in 0..m {
            if p.get(i, j) <= threshold {
                out[[i, j]] = T::one();
            }
        }
    }
    AffinityMatrix::from_array_unchecked(out)
}

/// Undirected average (a_ij + a_ji) / 2 (role: P_ud).
///
/// 0/1 input entries land in {0, 0.5, 1}.
pub fn symmetrize<T: Real>(p_bin: &AffinityMatrix<T>) -> AffinityMatrix<T> {
    let m = p_bin.size();
    let half = T::of(0.5);
    let mut out = Array2::zeros((m, m));
    for i in 0..m {
        for j in 0..m {
            out[[i, j]] = half * (p_bin.get(i, j) + p_bin.get(j, i));
        }
    }
    AffinityMatrix::from_array_unchecked(out)
}
