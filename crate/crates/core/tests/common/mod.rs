use eigenscape::graphs::{kronecker_kernel, normalized_laplacian, KernelMatrix};
use eigenscape::spectra::eigh;
use nalgebra::{DMatrix, DVector};

/// Largest projector discrepancy between the computed eigenvectors of the
/// normalized Laplacian of K2 ⊗ K1 and the Kronecker products of factor
/// eigenvectors, compared cluster by cluster. Also returns the largest
/// eigenvalue mismatch.
pub fn kron_separability_error(k2: &KernelMatrix, k1: &KernelMatrix) -> (f64, f64) {
    const CLUSTER_GAP: f64 = 1e-6;
    let l = normalized_laplacian(&kronecker_kernel(k2, k1)).unwrap();
    let full = eigh(l.entries(), 1e-14).unwrap();

    // 1 - eig(L) of each factor is the spectrum of D^-1/2 K D^-1/2
    let f2 = eigh(normalized_laplacian(k2).unwrap().entries(), 1e-14).unwrap();
    let f1 = eigh(normalized_laplacian(k1).unwrap().entries(), 1e-14).unwrap();
    let mut predicted: Vec<(f64, DVector<f64>)> = Vec::new();
    for a in 0..f2.values.len() {
        for i in 0..f1.values.len() {
            let value = 1.0 - (1.0 - f2.values[a]) * (1.0 - f1.values[i]);
            let v = f2.vectors.column(a).kronecker(&f1.vectors.column(i));
            predicted.push((value, v));
        }
    }
    predicted.sort_by(|x, y| x.0.total_cmp(&y.0));

    let n = full.values.len();
    let mut value_err: f64 = 0.0;
    for k in 0..n {
        value_err = value_err.max((full.values[k] - predicted[k].0).abs());
    }

    let mut proj_err: f64 = 0.0;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && full.values[end] - full.values[end - 1] < CLUSTER_GAP {
            end += 1;
        }
        let mut pc = DMatrix::zeros(n, n);
        let mut pp = DMatrix::zeros(n, n);
        for k in start..end {
            let c = full.vectors.column(k);
            pc += c * c.transpose();
            let p = &predicted[k].1;
            pp += p * p.transpose();
        }
        proj_err = proj_err.max((pc - pp).amax());
        start = end;
    }
    (proj_err, value_err)
}
