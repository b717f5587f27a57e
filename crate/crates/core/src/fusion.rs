//! Fusion of the acoustic and lexical adjacency matrices.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::matrix::AffinityMatrix;
use crate::num::Real;

/// Elementwise maximum of P_ud and Q_c (role: A_c).
///
/// With Q_c = 0 the result equals P_ud bit for bit, which is exactly the
/// acoustic-only baseline configuration.
pub fn combine_max<T: Real>(
    p_ud: &AffinityMatrix<T>,
    q: &AffinityMatrix<T>,
) -> Result<AffinityMatrix<T>> {
    if p_ud.size() != q.size() {
        return Err(Error::InvalidInput(format!(
            "adjacency size mismatch: {} vs {}",
            p_ud.size(),
            q.size()
        )));
    }
    let m = p_ud.size();
    let mut out = Array2::zeros((m, m));
    for i in 0..m {
        for j in 0..m {
            out[[i, j]] = p_ud.get(i, j).max(q.get(i, j));
        }
    }
    Ok(AffinityMatrix::from_array_unchecked(out))
}
