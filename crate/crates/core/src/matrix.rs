//! Dense square affinity matrices shared by the acoustic, lexical, fusion
//! and spectral stages.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::num::Real;

/// M x M matrix of pairwise segment affinities.
///
/// Entries are always finite and nonnegative. The binarized, lexical and
/// fused roles built on top of this type additionally keep entries in
/// [0, 1] and symmetric; the operations producing those roles guarantee it
/// by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityMatrix<T: Real> {
    data: Array2<T>,
}

impl<T: Real> AffinityMatrix<T> {
    /// Validates squareness, finiteness and nonnegativity.
    pub fn from_array(data: Array2<T>) -> Result<Self> {
        let (rows, cols) = data.dim();
        if rows != cols {
            return Err(Error::InvalidInput(format!(
                "affinity matrix must be square, got {rows}x{cols}"
            )));
        }
        for &v in data.iter() {
            if !v.is_finite() || v < T::zero() {
                return Err(Error::InvalidInput(
                    "affinity entries must be finite and >= 0".into(),
                ));
            }
        }
        Ok(Self { data })
    }

    /// Wraps a matrix whose invariants hold by construction.
    pub(crate) fn from_array_unchecked(data: Array2<T>) -> Self {
        debug_assert_eq!(data.nrows(), data.ncols());
        Self { data }
    }

    pub fn size(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[[i, j]]
    }

    pub fn as_array(&self) -> &Array2<T> {
        &self.data
    }

    pub fn into_array(self) -> Array2<T> {
        self.data
    }

    /// Largest absolute difference |a_ij - a_ji|.
    pub fn asymmetry(&self) -> T {
        let m = self.size();
        let mut worst = T::zero();
        for i in 0..m {
            for j in (i + 1)..m {
                let d = (self.data[[i, j]] - self.data[[j, i]]).abs();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        self.asymmetry() <= tol
    }
}
