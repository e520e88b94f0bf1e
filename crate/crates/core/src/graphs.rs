//! Kernels, adjacency generators and graph Laplacians.
//!
//! Everything is stored densely. The target sizes are a few thousand
//! vertices at most, where a dense eigensolve is the bottleneck anyway.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Symmetric, nonnegative, finite pairwise weight matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    entries: DMatrix<f64>,
    sigma: Option<f64>,
}

impl KernelMatrix {
    /// Validates symmetry (exact), nonnegativity and finiteness.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let n = entries.nrows();
        if entries.ncols() != n {
            return Err(Error::Input(format!(
                "kernel must be square, got {}x{}",
                n,
                entries.ncols()
            )));
        }
        for j in 0..n {
            for i in 0..n {
                let v = entries[(i, j)];
                if !v.is_finite() {
                    return Err(Error::Input(format!("non-finite kernel entry at ({i}, {j})")));
                }
                if v < 0.0 {
                    return Err(Error::Input(format!("negative kernel entry at ({i}, {j})")));
                }
                if v != entries[(j, i)] {
                    return Err(Error::Input(format!("kernel not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self {
            entries,
            sigma: None,
        })
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<f64> {
        self.entries
    }

    /// Scale used to build a Gaussian kernel, if any.
    pub fn sigma(&self) -> Option<f64> {
        self.sigma
    }

    pub fn degrees(&self) -> DegreeVector {
        let n = self.size();
        let d = DVector::from_iterator(n, (0..n).map(|i| self.entries.row(i).iter().sum()));
        DegreeVector(d)
    }

    /// Number of nonzero off-diagonal entries in the upper triangle.
    pub fn edge_count(&self) -> usize {
        let n = self.size();
        let mut count = 0;
        for j in 0..n {
            for i in 0..j {
                if self.entries[(i, j)] != 0.0 {
                    count += 1;
                }
            }
        }
        count
    }
}

/// Row sums of a kernel, d_i = sum_j K_ij.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeVector(pub DVector<f64>);

impl DegreeVector {
    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplacianKind {
    /// I - D^{-1/2} K D^{-1/2}
    Normalized,
    /// D - K
    Unnormalized,
}

impl LaplacianKind {
    pub fn name(self) -> &'static str {
        match self {
            LaplacianKind::Normalized => "normalized",
            LaplacianKind::Unnormalized => "unnormalized",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix {
    entries: DMatrix<f64>,
    kind: LaplacianKind,
}

impl LaplacianMatrix {
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn kind(&self) -> LaplacianKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }
}

/// K_ij = exp(-|x_i - x_j|^2 / sigma^2). Rows are assembled in parallel;
/// each entry is computed by exactly one task so the result does not depend
/// on scheduling.
pub fn gaussian_kernel(points: &[Vec<f64>], sigma: f64) -> Result<KernelMatrix> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Parameter(format!("sigma must be positive, got {sigma}")));
    }
    if points.is_empty() {
        return Err(Error::Input("point cloud is empty".into()));
    }
    let dim = points[0].len();
    for (i, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(Error::Input(format!(
                "point {i} has {} coordinates, expected {dim}",
                p.len()
            )));
        }
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::Input(format!("point {i} has a non-finite coordinate")));
        }
    }
    let n = points.len();
    let s2 = sigma * sigma;
    let mut rows = vec![0.0; n * n];
    rows.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for (j, out) in row.iter_mut().enumerate() {
            let d2: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            *out = (-d2 / s2).exp();
        }
    });
    // squared distance is computed symmetrically, so the row-major buffer is
    // already exactly symmetric
    let entries = DMatrix::from_row_slice(n, n, &rows);
    Ok(KernelMatrix {
        entries,
        sigma: Some(sigma),
    })
}

/// Adjacency of the cycle graph C_n.
pub fn cycle_adjacency(n: usize) -> Result<KernelMatrix> {
    if n < 3 {
        return Err(Error::Parameter(format!("cycle needs at least 3 vertices, got {n}")));
    }
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        let j = (i + 1) % n;
        k[(i, j)] = 1.0;
        k[(j, i)] = 1.0;
    }
    Ok(KernelMatrix {
        entries: k,
        sigma: None,
    })
}

/// G(n, p) sample. Pairs (i, j), i < j, are visited in row-major order and
/// each draws one uniform from a ChaCha8 stream seeded with `seed`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<KernelMatrix> {
    if n == 0 {
        return Err(Error::Parameter("graph needs at least one vertex".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!("edge probability must lie in [0, 1], got {p}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let u: f64 = rng.gen();
            if u < p {
                k[(i, j)] = 1.0;
                k[(j, i)] = 1.0;
            }
        }
    }
    Ok(KernelMatrix {
        entries: k,
        sigma: None,
    })
}

/// Kernel from weighted edges over `n` vertices. Repeated edges accumulate.
pub fn kernel_from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<KernelMatrix> {
    if n == 0 {
        return Err(Error::Input("edge list defines no vertices".into()));
    }
    let mut k = DMatrix::zeros(n, n);
    for (line, &(i, j, w)) in edges.iter().enumerate() {
        if i >= n || j >= n {
            return Err(Error::Input(format!("edge {line} references a vertex beyond {n}")));
        }
        if !w.is_finite() || w < 0.0 {
            return Err(Error::Input(format!("edge {line} has invalid weight {w}")));
        }
        k[(i, j)] += w;
        if i != j {
            k[(j, i)] += w;
        }
    }
    KernelMatrix::new(k)
}

/// (K2 ⊗ K1)_{(a,i),(b,j)} = K2_ab · K1_ij, with vertex (a, i) stored at
/// a · n1 + i.
pub fn kronecker_kernel(k2: &KernelMatrix, k1: &KernelMatrix) -> KernelMatrix {
    let entries = k2.entries.kronecker(&k1.entries);
    KernelMatrix {
        entries,
        sigma: None,
    }
}

pub fn normalized_laplacian(k: &KernelMatrix) -> Result<LaplacianMatrix> {
    let d = k.degrees();
    if let Some(vertex) = d.as_slice().iter().position(|&x| !(x > 0.0)) {
        return Err(Error::ZeroDegree { vertex });
    }
    let inv_sqrt: Vec<f64> = d.as_slice().iter().map(|x| 1.0 / x.sqrt()).collect();
    let n = k.size();
    let mut l = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            l[(i, j)] = delta - inv_sqrt[i] * k.entries[(i, j)] * inv_sqrt[j];
        }
    }
    Ok(LaplacianMatrix {
        entries: l,
        kind: LaplacianKind::Normalized,
    })
}

pub fn unnormalized_laplacian(k: &KernelMatrix) -> LaplacianMatrix {
    let d = k.degrees();
    let mut l = -k.entries.clone();
    for i in 0..k.size() {
        l[(i, i)] += d.0[i];
    }
    LaplacianMatrix {
        entries: l,
        kind: LaplacianKind::Unnormalized,
    }
}

pub fn laplacian(k: &KernelMatrix, kind: LaplacianKind) -> Result<LaplacianMatrix> {
    match kind {
        LaplacianKind::Normalized => normalized_laplacian(k),
        LaplacianKind::Unnormalized => Ok(unnormalized_laplacian(k)),
    }
}
