//! Eigenbases: computed graph spectra and sampled analytic eigenfunctions,
//! all exposed through [`EigenBasis`].

mod analytic;
mod eigh;
mod sphere;

pub use analytic::{rectangle_basis, torus_basis, torus_frequency_index, TorusMode};
pub use eigh::{eigh, Eigh};
pub use sphere::{
    clenshaw_curtis_weights, sphere_basis, sphere_basis_with, sphere_index, SphereQuadrature,
};


use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graphs::LaplacianMatrix;

/// Eigenvalues with magnitude below this are treated as exactly zero.
pub const ZERO_EIGENVALUE: f64 = 1e-10;

/// Most negative eigenvalue accepted (and clamped) from a computed spectrum.
const NEGATIVE_SLACK: f64 = 1e-9;

/// Sampled eigenfunctions with their eigenvalues and quadrature weights.
///
/// Column k of [`EigenBasis::vectors`] holds φ_k on the grid. Complex bases
/// keep the imaginary parts in a second matrix of the same shape.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    eigenvalues: Vec<f64>,
    vectors: DMatrix<f64>,
    imag: Option<DMatrix<f64>>,
    weights: DVector<f64>,
    label_names: Vec<String>,
    labels: Vec<Vec<i64>>,
    grid_shape: Option<(usize, usize)>,
    description: String,
}

impl EigenBasis {
    /// Builds a basis after validating shapes, weights and the eigenvalue
    /// order. Eigenvalues in (-1e-9, 1e-10) are clamped to exactly 0.
    pub fn new(eigenvalues: Vec<f64>, vectors: DMatrix<f64>, weights: DVector<f64>) -> Result<Self> {
        let (n, m) = vectors.shape();
        if eigenvalues.len() != m {
            return Err(Error::Input(format!(
                "{} eigenvalues for {m} eigenvectors",
                eigenvalues.len()
            )));
        }
        if weights.len() != n {
            return Err(Error::Input(format!("{} weights for a grid of {n}", weights.len())));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::Input("quadrature weights must be positive".into()));
        }
        let mut clamped = eigenvalues;
        for (k, v) in clamped.iter_mut().enumerate() {
            if !v.is_finite() || *v <= -NEGATIVE_SLACK {
                return Err(Error::Input(format!("eigenvalue {k} = {v} is not a Laplacian eigenvalue")));
            }
            if *v < ZERO_EIGENVALUE {
                *v = 0.0;
            }
        }
        if clamped.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Input("eigenvalues must be sorted ascending".into()));
        }
        Ok(Self {
            eigenvalues: clamped,
            vectors,
            imag: None,
            weights,
            label_names: Vec::new(),
            labels: Vec::new(),
            grid_shape: None,
            description: String::new(),
        })
    }

    pub(crate) fn with_imag(mut self, imag: DMatrix<f64>) -> Self {
        debug_assert_eq!(imag.shape(), self.vectors.shape());
        self.imag = Some(imag);
        self
    }

    /// Attaches per-function integer labels, e.g. `["l", "m"]`.
    pub fn with_labels(mut self, names: &[&str], labels: Vec<Vec<i64>>) -> Result<Self> {
        if labels.len() != self.len() || labels.iter().any(|l| l.len() != names.len()) {
            return Err(Error::Input("label table does not match the basis".into()));
        }
        self.label_names = names.iter().map(|s| s.to_string()).collect();
        self.labels = labels;
        Ok(self)
    }

    pub fn with_grid_shape(mut self, rows: usize, cols: usize) -> Self {
        if rows * cols == self.grid_len() {
            self.grid_shape = Some((rows, cols));
        }
        self
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = description.into();
        self
    }

    /// Number of basis functions.
    pub fn len(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of grid samples per function.
    pub fn grid_len(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn imag(&self) -> Option<&DMatrix<f64>> {
        self.imag.as_ref()
    }

    pub fn is_complex(&self) -> bool {
        self.imag.is_some()
    }

    pub fn weights(&self) -> &DVector<f64> {
        &self.weights
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn labels(&self) -> &[Vec<i64>] {
        &self.labels
    }

    pub fn grid_shape(&self) -> Option<(usize, usize)> {
        self.grid_shape
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Real part of φ_k.
    pub fn function(&self, k: usize) -> DVector<f64> {
        self.vectors.column(k).into_owned()
    }

    /// Keeps the listed functions, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<EigenBasis> {
        if let Some(&bad) = indices.iter().find(|&&k| k >= self.len()) {
            return Err(Error::Input(format!("index {bad} out of range for {} functions", self.len())));
        }
        let pick = |m: &DMatrix<f64>| m.select_columns(indices);
        let eigenvalues: Vec<f64> = indices.iter().map(|&k| self.eigenvalues[k]).collect();
        if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Input("selection must keep eigenvalues ascending".into()));
        }
        Ok(EigenBasis {
            eigenvalues,
            vectors: pick(&self.vectors),
            imag: self.imag.as_ref().map(pick),
            weights: self.weights.clone(),
            label_names: self.label_names.clone(),
            labels: if self.labels.is_empty() {
                Vec::new()
            } else {
                indices.iter().map(|&k| self.labels[k].clone()).collect()
            },
            grid_shape: self.grid_shape,
            description: self.description.clone(),
        })
    }

    /// Weighted Gram matrix deviation max |<φ_i, φ_j>_w - δ_ij|, using the
    /// Hermitian product for complex bases.
    pub fn orthonormality_error(&self) -> f64 {
        let wv = weighted(&self.vectors, &self.weights);
        let mut gram = self.vectors.transpose() * &wv;
        if let Some(im) = &self.imag {
            let wi = weighted(im, &self.weights);
            gram += im.transpose() * &wi;
            let cross = im.transpose() * &wv - self.vectors.transpose() * &wi;
            let m = self.len();
            let mut worst = (gram - DMatrix::<f64>::identity(m, m)).amax();
            worst = worst.max(cross.amax());
            return worst;
        }
        let m = self.len();
        (gram - DMatrix::<f64>::identity(m, m)).amax()
    }
}

/// Columns of `m` scaled row-wise by the weights.
pub(crate) fn weighted(m: &DMatrix<f64>, w: &DVector<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for (i, mut row) in out.row_iter_mut().enumerate() {
        row.scale_mut(w[i]);
    }
    out
}

/// Eigenbasis of a graph Laplacian with uniform unit weights.
pub fn laplacian_basis(l: &LaplacianMatrix, tol: f64) -> Result<EigenBasis> {
    let e = eigh(l.entries(), tol)?;
    if let Some(min) = e.values.first() {
        if *min <= -NEGATIVE_SLACK {
            return Err(Error::Numeric(format!("Laplacian has negative eigenvalue {min}")));
        }
    }
    let n = l.size();
    Ok(EigenBasis::new(e.values, e.vectors, DVector::from_element(n, 1.0))?
        .with_description(format!("{} graph Laplacian, {n} vertices", l.kind().name())))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Entry {
    pub index: usize,
    pub eigenvalue: f64,
    pub l1: f64,
}

/// ℓ¹ norm of each ℓ²-normalized eigenvector, in spectral order.
pub fn l1_profile(basis: &EigenBasis) -> Vec<L1Entry> {
    (0..basis.len())
        .map(|k| {
            let col = basis.vectors.column(k);
            let l2 = col.norm();
            let l1 = if l2 > 0.0 { col.iter().map(|x| x.abs()).sum::<f64>() / l2 } else { 0.0 };
            L1Entry {
                index: k,
                eigenvalue: basis.eigenvalues[k],
                l1,
            }
        })
        .collect()
}
