use std::cmp::Ordering;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Full eigendecomposition of a real symmetric matrix.
///
/// Eigenvalues ascend. Each eigenvector is oriented so that its
/// largest-magnitude entry (first one, on exact ties) is positive; exactly
/// equal eigenvalues are ordered lexicographically by their oriented vectors.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Column k is the unit eigenvector for `values[k]`.
    pub vectors: DMatrix<f64>,
}

impl Eigh {
    /// max |V Λ Vᵀ - M|.
    pub fn reconstruction_error(&self, m: &DMatrix<f64>) -> f64 {
        let mut scaled = self.vectors.clone();
        for (k, &v) in self.values.iter().enumerate() {
            scaled.column_mut(k).scale_mut(v);
        }
        (scaled * self.vectors.transpose() - m).amax()
    }
}

pub fn eigh(m: &DMatrix<f64>, tol: f64) -> Result<Eigh> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::Input(format!(
            "eigh needs a square matrix, got {}x{}",
            n,
            m.ncols()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("matrix has non-finite entries".into()));
    }
    let scale = m.amax();
    for j in 0..n {
        for i in 0..j {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::Input(format!("matrix is not symmetric at ({i}, {j})")));
            }
        }
    }
    if n == 0 {
        return Ok(Eigh {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
        });
    }

    let eps = if tol > 0.0 { tol } else { f64::EPSILON };
    let max_iter = 64 * n.max(16);
    let dec = SymmetricEigen::try_new(m.clone(), eps, max_iter)
        .ok_or_else(|| Error::Numeric(format!("eigensolver did not converge in {max_iter} sweeps")))?;

    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| {
            let mut v: Vec<f64> = dec.eigenvectors.column(k).iter().copied().collect();
            orient(&mut v);
            (dec.eigenvalues[k], v)
        })
        .collect();
    pairs.sort_by(|a, b| {
        a.0.total_cmp(&b.0).then_with(|| {
            a.1.iter()
                .zip(&b.1)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        })
    });

    let values = pairs.iter().map(|p| p.0).collect();
    let vectors = DMatrix::from_fn(n, n, |i, k| pairs[k].1[i]);
    Ok(Eigh { values, vectors })
}

/// Flip `v` so its largest-magnitude entry is positive.
pub(crate) fn orient(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}
