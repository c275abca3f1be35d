use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Least squares `min ‖A x − b‖₂` by SVD after normalising the columns of `A`.
pub(crate) fn lstsq(mut a: DMatrix<f64>, b: DVector<f64>) -> Result<DVector<f64>> {
    let mut norms = Vec::with_capacity(a.ncols());
    for mut col in a.column_iter_mut() {
        let n = col.norm();
        let n = if n > 0.0 && n.is_finite() { n } else { 1.0 };
        col /= n;
        norms.push(n);
    }
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite least-squares system".into()));
    }
    let svd = a.svd(true, true);
    let eps = f64::EPSILON * svd.singular_values.max() * (svd.singular_values.len() as f64);
    let mut x = svd
        .solve(&b, eps)
        .map_err(|e| Error::InvalidInput(format!("least squares failed: {e}")))?;
    for (xi, n) in x.iter_mut().zip(norms) {
        *xi /= n;
    }
    Ok(x)
}
