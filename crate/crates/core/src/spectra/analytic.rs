use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::EigenBasis;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TorusMode {
    /// constant, cos(kx), sin(kx), and cos(n/2 x) for even n
    Real,
    /// e^{ikx} with k in (-n/2, n/2], stored as real/imaginary parts
    Complex,
}

/// Trigonometric eigenbasis of the circle sampled at x_j = 2πj/n, weights
/// 2π/n. Frequency k has eigenvalue k².
///
/// Real mode labels are `(k, part)` with part 0 for cosine (and the
/// constant) and 1 for sine. Complex mode labels are the signed frequency.
pub fn torus_basis(n: usize, mode: TorusMode) -> Result<EigenBasis> {
    if n < 3 {
        return Err(Error::Parameter(format!("torus grid needs at least 3 points, got {n}")));
    }
    let x: Vec<f64> = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
    let weights = DVector::from_element(n, 2.0 * PI / n as f64);
    let c0 = 1.0 / (2.0 * PI).sqrt();
    let c1 = 1.0 / PI.sqrt();
    let half = n / 2;

    let mut eigenvalues = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let mut re = DMatrix::zeros(n, n);
    let mut im = DMatrix::zeros(n, n);
    let mut col = 0;
    let mut push = |k: i64, part: i64, re_f: &dyn Fn(f64) -> f64, im_f: &dyn Fn(f64) -> f64| {
        for (j, &xj) in x.iter().enumerate() {
            re[(j, col)] = re_f(xj);
            im[(j, col)] = im_f(xj);
        }
        eigenvalues.push((k * k) as f64);
        labels.push(match mode {
            TorusMode::Real => vec![k, part],
            TorusMode::Complex => vec![k],
        });
        col += 1;
    };

    match mode {
        TorusMode::Real => {
            push(0, 0, &|_| c0, &|_| 0.0);
            for k in 1..n.div_ceil(2) {
                let kf = k as f64;
                push(k as i64, 0, &|x| c1 * (kf * x).cos(), &|_| 0.0);
                push(k as i64, 1, &|x| c1 * (kf * x).sin(), &|_| 0.0);
            }
            if n % 2 == 0 {
                // cos(n/2 x) alternates in sign on the grid
                let kf = half as f64;
                push(half as i64, 0, &|x| c0 * (kf * x).cos(), &|_| 0.0);
            }
        }
        TorusMode::Complex => {
            push(0, 0, &|_| c0, &|_| 0.0);
            for k in 1..n.div_ceil(2) {
                let kf = k as f64;
                push(k as i64, 0, &|x| c0 * (kf * x).cos(), &|x| c0 * (kf * x).sin());
                push(-(k as i64), 0, &|x| c0 * (kf * x).cos(), &|x| -c0 * (kf * x).sin());
            }
            if n % 2 == 0 {
                let kf = half as f64;
                push(half as i64, 0, &|x| c0 * (kf * x).cos(), &|x| c0 * (kf * x).sin());
            }
        }
    }

    let names: &[&str] = match mode {
        TorusMode::Real => &["k", "part"],
        TorusMode::Complex => &["k"],
    };
    let mut basis = EigenBasis::new(eigenvalues, re, weights)?
        .with_labels(names, labels)?
        .with_grid_shape(1, n)
        .with_description(format!(
            "torus, {n} equispaced points, {} trigonometric basis",
            if mode == TorusMode::Real { "real" } else { "complex" }
        ));
    if mode == TorusMode::Complex {
        basis = basis.with_imag(im);
    }
    Ok(basis)
}

/// Column of the complex torus basis holding frequency `freq`. Any integer
/// is accepted and reduced to its alias in (-n/2, n/2], so frequency n - k
/// maps onto -k.
pub fn torus_frequency_index(n: usize, freq: i64) -> usize {
    let n_i = n as i64;
    let mut r = freq.rem_euclid(n_i);
    if 2 * r > n_i {
        r -= n_i;
    }
    match r.signum() {
        0 => 0,
        1 => (2 * r - 1) as usize,
        _ => (-2 * r) as usize,
    }
}

/// Dirichlet eigenfunctions of [0,4]×[0,1]: φ_mn = sin(mπx/4)·sin(nπy) on
/// the interior grid x_i = 4i/(grid_x+1), y_j = j/(grid_y+1), with
/// λ_mn = π²(m²/16 + n²). Samples are stored x-major, weights are the cell
/// area, which makes the sampled basis exactly orthonormal.
pub fn rectangle_basis(mmax: usize, nmax: usize, grid_x: usize, grid_y: usize) -> Result<EigenBasis> {
    if mmax == 0 || nmax == 0 {
        return Err(Error::Parameter("rectangle basis needs mmax, nmax >= 1".into()));
    }
    if mmax > grid_x || nmax > grid_y {
        return Err(Error::Parameter(format!(
            "indices ({mmax}, {nmax}) exceed the {grid_x}x{grid_y} grid"
        )));
    }
    let npts = grid_x * grid_y;
    let sx: Vec<Vec<f64>> = (1..=mmax)
        .map(|m| {
            (1..=grid_x)
                .map(|i| (m as f64 * PI * i as f64 / (grid_x + 1) as f64).sin())
                .collect()
        })
        .collect();
    let sy: Vec<Vec<f64>> = (1..=nmax)
        .map(|n| {
            (1..=grid_y)
                .map(|j| (n as f64 * PI * j as f64 / (grid_y + 1) as f64).sin())
                .collect()
        })
        .collect();

    let mut entries: Vec<(f64, i64, i64)> = Vec::with_capacity(mmax * nmax);
    for m in 1..=mmax {
        for n in 1..=nmax {
            // integer numerator keeps exactly degenerate pairs exactly equal
            let lam = PI * PI * ((m * m + 16 * n * n) as f64) / 16.0;
            entries.push((lam, m as i64, n as i64));
        }
    }
    entries.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut v = DMatrix::zeros(npts, entries.len());
    for (col, &(_, m, n)) in entries.iter().enumerate() {
        let fx = &sx[m as usize - 1];
        let fy = &sy[n as usize - 1];
        for i in 0..grid_x {
            for j in 0..grid_y {
                v[(i * grid_y + j, col)] = fx[i] * fy[j];
            }
        }
    }
    let area = 4.0 / ((grid_x + 1) * (grid_y + 1)) as f64;
    EigenBasis::new(
        entries.iter().map(|e| e.0).collect(),
        v,
        DVector::from_element(npts, area),
    )?
    .with_labels(&["m", "n"], entries.iter().map(|e| vec![e.1, e.2]).collect())
    .map(|b| {
        b.with_grid_shape(grid_x, grid_y).with_description(format!(
            "rectangle [0,4]x[0,1], Dirichlet, {grid_x}x{grid_y} interior grid, m<={mmax}, n<={nmax}"
        ))
    })
}
