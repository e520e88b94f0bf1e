use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::EigenBasis;
use crate::error::{Error, Result};

/// Polar quadrature rule for the equispaced (α, β) grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SphereQuadrature {
    /// Clenshaw–Curtis weights in cos α. The polar nodes α_i = πi/N are
    /// Chebyshev extreme points in x = cos α, so products of harmonics are
    /// integrated exactly up to polynomial degree N.
    #[default]
    ClenshawCurtis,
    /// sin(α)·Δα, second-order accurate.
    SinTrapezoid,
}

/// Column of (l, m) in a sphere basis: l² + l + m.
pub fn sphere_index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

/// Weights w_j with Σ w_j g(cos θ_j) = ∫_{-1}^{1} g(x) dx for polynomials of
/// degree ≤ N on the nodes θ_j = jπ/N, N = `nodes` - 1.
pub fn clenshaw_curtis_weights(nodes: usize) -> Vec<f64> {
    assert!(nodes >= 2, "Clenshaw-Curtis needs at least two nodes");
    let n = nodes - 1;
    let nf = n as f64;
    (0..=n)
        .map(|j| {
            let theta = j as f64 * PI / nf;
            let mut s = 0.0;
            for k in 1..=n / 2 {
                let b = if 2 * k == n { 1.0 } else { 2.0 };
                let kf = k as f64;
                s += b / (4.0 * kf * kf - 1.0) * (2.0 * kf * theta).cos();
            }
            let c = if j == 0 || j == n { 1.0 } else { 2.0 };
            c / nf * (1.0 - s)
        })
        .collect()
}

pub fn sphere_basis(lmax: usize, n_alpha: usize, n_beta: usize) -> Result<EigenBasis> {
    sphere_basis_with(lmax, n_alpha, n_beta, SphereQuadrature::default())
}

/// Real spherical harmonics φ_l^m, 0 ≤ l ≤ lmax, sampled on α_i = πi/(n_alpha-1)
/// (poles included) and β_j = 2πj/n_beta, stored α-major. Eigenvalue l(l+1).
///
/// m > 0 uses cos(mβ), m < 0 uses sin(|m|β); no Condon–Shortley phase.
pub fn sphere_basis_with(
    lmax: usize,
    n_alpha: usize,
    n_beta: usize,
    quadrature: SphereQuadrature,
) -> Result<EigenBasis> {
    let need = 2 * lmax + 2;
    if n_alpha < need || n_beta < need {
        return Err(Error::Parameter(format!(
            "grid {n_alpha}x{n_beta} too coarse for lmax={lmax}; need at least {need} samples per angle"
        )));
    }
    let count = (lmax + 1) * (lmax + 1);
    let npts = n_alpha * n_beta;
    let d_alpha = PI / (n_alpha - 1) as f64;
    let d_beta = 2.0 * PI / n_beta as f64;

    let polar_weights: Vec<f64> = match quadrature {
        SphereQuadrature::ClenshawCurtis => clenshaw_curtis_weights(n_alpha),
        SphereQuadrature::SinTrapezoid => {
            (0..n_alpha).map(|i| (i as f64 * d_alpha).sin() * d_alpha).collect()
        }
    };
    let mut weights = DVector::zeros(npts);
    for i in 0..n_alpha {
        for j in 0..n_beta {
            weights[i * n_beta + j] = polar_weights[i] * d_beta;
        }
    }
    if weights.iter().any(|w| !(*w > 0.0)) {
        // sin-weights vanish at the poles; drop nothing, nudge to the
        // smallest positive weight so the basis type stays valid
        let floor = f64::MIN_POSITIVE;
        weights.iter_mut().for_each(|w| *w = w.max(floor));
    }

    // azimuthal factors: index m + lmax
    let mut azimuth = vec![vec![0.0; n_beta]; 2 * lmax + 1];
    for m in -(lmax as i64)..=(lmax as i64) {
        let row = &mut azimuth[(m + lmax as i64) as usize];
        for (j, out) in row.iter_mut().enumerate() {
            let beta = j as f64 * d_beta;
            *out = match m.signum() {
                0 => 1.0,
                1 => 2f64.sqrt() * (m as f64 * beta).cos(),
                _ => 2f64.sqrt() * ((-m) as f64 * beta).sin(),
            };
        }
    }

    let mut values = DMatrix::zeros(npts, count);
    let mut legendre = vec![0.0; count];
    for i in 0..n_alpha {
        let alpha = i as f64 * d_alpha;
        normalized_legendre(lmax, alpha.cos(), alpha.sin(), &mut legendre);
        for l in 0..=lmax {
            for m in -(lmax.min(l) as i64)..=(l as i64) {
                let p = legendre[sphere_index(l, m.abs())];
                let az = &azimuth[(m + lmax as i64) as usize];
                let col = sphere_index(l, m);
                for j in 0..n_beta {
                    values[(i * n_beta + j, col)] = p * az[j];
                }
            }
        }
    }

    let mut eigenvalues = Vec::with_capacity(count);
    let mut labels = Vec::with_capacity(count);
    for l in 0..=lmax {
        for m in -(l as i64)..=(l as i64) {
            eigenvalues.push((l * (l + 1)) as f64);
            labels.push(vec![l as i64, m]);
        }
    }
    Ok(EigenBasis::new(eigenvalues, values, weights)?
        .with_labels(&["l", "m"], labels)?
        .with_grid_shape(n_alpha, n_beta)
        .with_description(format!(
            "sphere, real harmonics l<={lmax}, {n_alpha}x{n_beta} grid, {} weights",
            match quadrature {
                SphereQuadrature::ClenshawCurtis => "clenshaw-curtis",
                SphereQuadrature::SinTrapezoid => "sin-trapezoid",
            }
        )))
}

/// Fills `out[sphere_index(l, m)]`, m ≥ 0, with N_lm P_l^m(x) where
/// N_lm = sqrt((2l+1)/(4π) (l-m)!/(l+m)!). The normalization is carried
/// through the recurrence so no factorials are ever formed.
fn normalized_legendre(lmax: usize, x: f64, s: f64, out: &mut [f64]) {
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for m in 0..=lmax {
        if m > 0 {
            let mf = m as f64;
            pmm *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s;
        }
        out[sphere_index(m, m as i64)] = pmm;
        if m == lmax {
            break;
        }
        let mut prev = pmm;
        let mut cur = (2.0 * m as f64 + 3.0).sqrt() * x * pmm;
        out[sphere_index(m + 1, m as i64)] = cur;
        let mf = m as f64;
        let a = |l: f64| ((4.0 * l * l - 1.0) / (l * l - mf * mf)).sqrt();
        for l in (m + 2)..=lmax {
            let lf = l as f64;
            let next = a(lf) * (x * cur - prev / a(lf - 1.0));
            out[sphere_index(l, m as i64)] = next;
            prev = cur;
            cur = next;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_harmonic() {
        let b = sphere_basis(2, 7, 8).unwrap();
        let c = 1.0 / (4.0 * PI).sqrt();
        assert!(b.vectors().column(0).iter().all(|v| (v - c).abs() < 1e-15));
        assert_eq!(b.labels()[0], vec![0, 0]);
        assert_eq!(b.eigenvalues()[8], 6.0);
    }

    #[test]
    fn basis_count() {
        assert_eq!(sphere_basis(3, 8, 8).unwrap().len(), 16);
        let total: usize = (0..=14).map(|l| 2 * l + 1).sum();
        assert_eq!(total, 225);
    }

    #[test]
    fn closed_form_low_degrees() {
        let b = sphere_basis(2, 9, 10).unwrap();
        let (na, nb) = b.grid_shape().unwrap();
        for i in 0..na {
            let a = PI * i as f64 / (na - 1) as f64;
            for j in 0..nb {
                let be = 2.0 * PI * j as f64 / nb as f64;
                let row = i * nb + j;
                let y10 = (3.0 / (4.0 * PI)).sqrt() * a.cos();
                let y11 = (3.0 / (4.0 * PI)).sqrt() * a.sin() * be.cos();
                let y20 = (5.0 / (16.0 * PI)).sqrt() * (3.0 * a.cos().powi(2) - 1.0);
                assert!((b.vectors()[(row, sphere_index(1, 0))] - y10).abs() < 1e-14);
                assert!((b.vectors()[(row, sphere_index(1, 1))] - y11).abs() < 1e-14);
                assert!((b.vectors()[(row, sphere_index(2, 0))] - y20).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn clenshaw_curtis_is_exact_on_polynomials() {
        let w = clenshaw_curtis_weights(11);
        for deg in 0..=10u32 {
            let approx: f64 = w
                .iter()
                .enumerate()
                .map(|(j, wj)| wj * (PI * j as f64 / 10.0).cos().powi(deg as i32))
                .sum();
            let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            assert!((approx - exact).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn small_grid_orthonormality() {
        let b = sphere_basis(6, 14, 14).unwrap();
        assert!(b.orthonormality_error() < 1e-12);
    }

    #[test]
    fn sin_weights_are_only_second_order() {
        let b = sphere_basis_with(6, 41, 41, SphereQuadrature::SinTrapezoid).unwrap();
        let err = b.orthonormality_error();
        assert!(err > 1e-5 && err < 1e-1, "{err}");
    }

    #[test]
    fn poles_are_finite() {
        let b = sphere_basis(30, 62, 62).unwrap();
        let nb = 62;
        for row in (0..nb).chain(61 * nb..62 * nb) {
            assert!(b.vectors().row(row).iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn resolution_is_checked() {
        assert!(matches!(sphere_basis(14, 29, 181), Err(Error::Parameter(_))));
        assert!(sphere_basis(14, 30, 30).is_ok());
    }
}
