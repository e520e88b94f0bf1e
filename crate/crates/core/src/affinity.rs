//! Heat-semigroup similarity between eigenfunctions.
//!
//! For eigenfunctions φ_i, φ_j with eigenvalues λ, μ the similarity is
//!
//! ```text
//! α(φ_i, φ_j) = ‖e^{tΔ}(φ_i φ_j)‖ / ‖φ_i φ_j‖,   e^{-tλ} + e^{-tμ} = 1
//! ```
//!
//! The semigroup is applied spectrally: e^{tΔ} damps the φ_k coefficient by
//! e^{-tλ_k}. When one of the eigenvalues is zero the equation is only
//! satisfied in the limit t → ∞, where e^{tΔ} becomes the projector onto
//! the zero eigenspace.
//!
//! [`alpha_local_oracle`] evaluates the same quantity through the local
//! correlation double sum, which is an independent route whenever the heat
//! kernel conserves mass.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::landscape::AffinityMatrix;
use crate::spectra::{weighted, EigenBasis, ZERO_EIGENVALUE};

/// How the diffusion time is chosen for each pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeMode {
    /// Solve e^{-tλ} + e^{-tμ} = 1 per pair.
    Adaptive,
    /// Same t₀ for every pair.
    Fixed(f64),
}

impl TimeMode {
    pub fn describe(&self) -> String {
        match self {
            TimeMode::Adaptive => "adaptive".to_string(),
            TimeMode::Fixed(t0) => format!("fixed:{t0}"),
        }
    }
}

/// Diffusion time; `f64::INFINITY` denotes the zero-eigenspace projector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeScale {
    pub t: f64,
}

impl TimeScale {
    pub const INFINITE: TimeScale = TimeScale { t: f64::INFINITY };

    pub fn new(t: f64) -> Result<Self> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::Parameter(format!("diffusion time must be >= 0, got {t}")));
        }
        Ok(Self { t })
    }

    pub fn is_infinite(&self) -> bool {
        self.t.is_infinite()
    }

    /// Damping factor e^{-tλ} of an eigenvalue.
    #[inline]
    pub fn factor(&self, lambda: f64) -> f64 {
        if self.t.is_infinite() {
            if lambda == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            (-self.t * lambda).exp()
        }
    }
}

fn clamp_eigenvalue(v: f64, name: &str) -> Result<f64> {
    if v.is_nan() || v < 0.0 {
        return Err(Error::Parameter(format!("{name} must be a nonnegative eigenvalue, got {v}")));
    }
    Ok(if v < ZERO_EIGENVALUE { 0.0 } else { v })
}

/// Unique t ≥ 0 with e^{-tλ} + e^{-tμ} = 1.
///
/// Equal eigenvalues use t = ln 2 / λ. Otherwise the strictly decreasing
/// residual is bisected on [0, 64 / min(λ, μ)] until the bracket stops
/// shrinking. A zero eigenvalue gives t = ∞.
pub fn solve_time(lambda: f64, mu: f64) -> Result<TimeScale> {
    let a = clamp_eigenvalue(lambda, "lambda")?;
    let b = clamp_eigenvalue(mu, "mu")?;
    let (lo_eig, hi_eig) = if a <= b { (a, b) } else { (b, a) };
    if lo_eig == 0.0 {
        return Ok(TimeScale::INFINITE);
    }
    if lo_eig == hi_eig {
        return Ok(TimeScale {
            t: std::f64::consts::LN_2 / lo_eig,
        });
    }
    let residual = |t: f64| (-t * lo_eig).exp() + (-t * hi_eig).exp() - 1.0;
    let mut lo = 0.0;
    let mut hi = 64.0 / lo_eig;
    while residual(hi) >= 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Numeric("time bracket diverged".into()));
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // pick the endpoint with the smaller residual
    let t = if residual(lo).abs() <= residual(hi).abs() { lo } else { hi };
    Ok(TimeScale { t })
}

/// Time scale for a pair under a [`TimeMode`].
pub fn time_for(mode: TimeMode, lambda: f64, mu: f64) -> Result<TimeScale> {
    match mode {
        TimeMode::Adaptive => solve_time(lambda, mu),
        TimeMode::Fixed(t0) => {
            if !t0.is_finite() {
                return Err(Error::Parameter(format!("fixed t0 must be finite, got {t0}")));
            }
            TimeScale::new(t0)
        }
    }
}

/// Spectral heat semigroup over a basis: P(t) = Φ diag(e^{-tλ}) Φᵀ W.
#[derive(Debug, Clone, Copy)]
pub struct HeatPropagator<'a> {
    basis: &'a EigenBasis,
}

impl<'a> HeatPropagator<'a> {
    pub fn new(basis: &'a EigenBasis) -> Self {
        Self { basis }
    }

    /// Dense operator matrix; entry (x, y) is p(t, x, y)·w_y. Real bases only.
    pub fn matrix(&self, t: TimeScale) -> DMatrix<f64> {
        let phi = self.basis.vectors();
        let mut damped = phi.clone();
        for (k, &lam) in self.basis.eigenvalues().iter().enumerate() {
            damped.column_mut(k).scale_mut(t.factor(lam));
        }
        let wphi = weighted(phi, self.basis.weights());
        damped * wphi.transpose()
    }

    /// Σ_k e^{-tλ_k} ⟨f, φ_k⟩_w φ_k for real bases.
    pub fn apply(&self, f: &DVector<f64>, t: TimeScale) -> Result<DVector<f64>> {
        self.check_len(f.len())?;
        if self.basis.is_complex() {
            let (re, _) = self.apply_complex(f, &DVector::zeros(f.len()), t)?;
            return Ok(re);
        }
        let phi = self.basis.vectors();
        let wf = f.component_mul(self.basis.weights());
        let mut coeffs = phi.tr_mul(&wf);
        for (k, &lam) in self.basis.eigenvalues().iter().enumerate() {
            coeffs[k] *= t.factor(lam);
        }
        Ok(phi * coeffs)
    }

    /// Complex variant with the Hermitian inner product ⟨f, φ⟩ = Σ w f φ̄.
    pub fn apply_complex(
        &self,
        re: &DVector<f64>,
        im: &DVector<f64>,
        t: TimeScale,
    ) -> Result<(DVector<f64>, DVector<f64>)> {
        self.check_len(re.len())?;
        self.check_len(im.len())?;
        let pr = self.basis.vectors();
        let zero;
        let pi = match self.basis.imag() {
            Some(m) => m,
            None => {
                zero = DMatrix::zeros(pr.nrows(), pr.ncols());
                &zero
            }
        };
        let w = self.basis.weights();
        let wr = re.component_mul(w);
        let wi = im.component_mul(w);
        // (a + ib)(c - id) = (ac + bd) + i(bc - ad)
        let mut cr = pr.tr_mul(&wr) + pi.tr_mul(&wi);
        let mut ci = pr.tr_mul(&wi) - pi.tr_mul(&wr);
        for (k, &lam) in self.basis.eigenvalues().iter().enumerate() {
            let f = t.factor(lam);
            cr[k] *= f;
            ci[k] *= f;
        }
        let out_re = pr * &cr - pi * &ci;
        let out_im = pr * &ci + pi * &cr;
        Ok((out_re, out_im))
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.basis.grid_len() {
            return Err(Error::Input(format!(
                "vector of length {len} does not match grid of {}",
                self.basis.grid_len()
            )));
        }
        Ok(())
    }
}

pub fn heat_apply(basis: &EigenBasis, f: &DVector<f64>, t: TimeScale) -> Result<DVector<f64>> {
    HeatPropagator::new(basis).apply(f, t)
}

/// One similarity value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha {
    /// Clamped to [0, 1].
    pub value: f64,
    /// Value before clamping.
    pub raw: f64,
    /// The pointwise product vanished numerically.
    pub degenerate: bool,
}

impl Alpha {
    fn from_ratio(ratio_sq: f64) -> Self {
        let raw = ratio_sq.max(0.0).sqrt();
        Alpha {
            value: raw.clamp(0.0, 1.0),
            raw,
            degenerate: false,
        }
    }

    const DEGENERATE: Alpha = Alpha {
        value: 0.0,
        raw: 0.0,
        degenerate: true,
    };
}

/// Relative size below which a product φ_i φ_j counts as zero.
const DEGENERATE_PRODUCT: f64 = 1e-14;

fn weighted_norm_sq(v: &DVector<f64>, w: &DVector<f64>) -> f64 {
    v.iter().zip(w.iter()).map(|(x, wx)| wx * x * x).sum()
}

fn check_index(basis: &EigenBasis, i: usize) -> Result<()> {
    if i >= basis.len() {
        return Err(Error::Input(format!(
            "eigenfunction index {i} out of range for {} functions",
            basis.len()
        )));
    }
    Ok(())
}

/// α(φ_i, φ_j) by forming the product, applying the semigroup and
/// synthesizing the result on the grid.
pub fn alpha(basis: &EigenBasis, i: usize, j: usize, mode: TimeMode) -> Result<Alpha> {
    check_index(basis, i)?;
    check_index(basis, j)?;
    let lam = basis.eigenvalues();
    let t = time_for(mode, lam[i], lam[j])?;
    let w = basis.weights();
    let heat = HeatPropagator::new(basis);
    let (ar, br) = (basis.vectors().column(i), basis.vectors().column(j));

    match basis.imag() {
        None => {
            let h = ar.component_mul(&br);
            let h_sq = weighted_norm_sq(&h, w);
            let scale = weighted_norm_sq(&ar.into_owned(), w).sqrt()
                * weighted_norm_sq(&br.into_owned(), w).sqrt();
            if h_sq.sqrt() <= DEGENERATE_PRODUCT * scale {
                return Ok(Alpha::DEGENERATE);
            }
            let out = heat.apply(&h, t)?;
            Ok(Alpha::from_ratio(weighted_norm_sq(&out, w) / h_sq))
        }
        Some(imag) => {
            let (ai, bi) = (imag.column(i), imag.column(j));
            let hr = ar.component_mul(&br) - ai.component_mul(&bi);
            let hi = ar.component_mul(&bi) + ai.component_mul(&br);
            let h_sq = weighted_norm_sq(&hr, w) + weighted_norm_sq(&hi, w);
            let na = weighted_norm_sq(&ar.into_owned(), w) + weighted_norm_sq(&ai.into_owned(), w);
            let nb = weighted_norm_sq(&br.into_owned(), w) + weighted_norm_sq(&bi.into_owned(), w);
            if h_sq.sqrt() <= DEGENERATE_PRODUCT * (na * nb).sqrt() {
                return Ok(Alpha::DEGENERATE);
            }
            let (or, oi) = heat.apply_complex(&hr, &hi, t)?;
            let out_sq = weighted_norm_sq(&or, w) + weighted_norm_sq(&oi, w);
            Ok(Alpha::from_ratio(out_sq / h_sq))
        }
    }
}

/// Largest tolerated deviation of a heat-kernel row sum from 1.
const MASS_TOLERANCE: f64 = 1e-6;

/// α² through the local-correlation double sum
///
/// ```text
/// ‖h‖_w⁻² Σ_x w_x ( Σ_y P(t)_xy (φ_i(y) - φ_i(x)) (φ_j(y) - φ_j(x)) )²
/// ```
///
/// with P(t) the propagator matrix (which already carries w_y). This agrees
/// with `alpha(..)²` only when P(t) conserves mass, so rows summing to
/// anything but 1 are rejected. For two zero eigenvalues the time equation
/// has no solution; the pair is reported with the semigroup convention
/// α = 1 used by [`alpha`].
pub fn alpha_local_oracle(basis: &EigenBasis, i: usize, j: usize) -> Result<f64> {
    check_index(basis, i)?;
    check_index(basis, j)?;
    if basis.is_complex() {
        return Err(Error::Input("local oracle supports real bases only".into()));
    }
    let lam = basis.eigenvalues();
    let t = solve_time(lam[i], lam[j])?;
    let p = HeatPropagator::new(basis).matrix(t);
    let n = basis.grid_len();
    for x in 0..n {
        let s: f64 = p.row(x).iter().sum();
        if (s - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::Applicability(format!(
                "heat kernel row {x} sums to {s}, the local formula needs mass conservation"
            )));
        }
    }
    if lam[i] == 0.0 && lam[j] == 0.0 {
        return Ok(1.0);
    }
    let w = basis.weights();
    let a = basis.vectors().column(i);
    let b = basis.vectors().column(j);
    let h = a.component_mul(&b);
    let h_sq = weighted_norm_sq(&h, w);
    if h_sq == 0.0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for x in 0..n {
        let (ax, bx) = (a[x], b[x]);
        let mut local = 0.0;
        for y in 0..n {
            local += p[(x, y)] * (a[y] - ax) * (b[y] - bx);
        }
        total += w[x] * local * local;
    }
    Ok(total / h_sq)
}

/// Diagonal handling for [`affinity_matrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Diagonal {
    /// A_ii = α(φ_i, φ_i)^p like any other pair.
    #[default]
    Computed,
    /// A_ii = 1.
    One,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffinityOptions {
    pub p: f64,
    pub mode: TimeMode,
    pub diagonal: Diagonal,
}

impl Default for AffinityOptions {
    fn default() -> Self {
        Self {
            p: 1.0,
            mode: TimeMode::Adaptive,
            diagonal: Diagonal::Computed,
        }
    }
}

/// A_ab = α(φ_{subset[a]}, φ_{subset[b]})^p.
///
/// The semigroup runs over the whole `basis`, so a truncated analytic basis
/// should be passed extended far enough to contain all pairwise products,
/// with `subset` naming the functions of interest. Real bases use one GEMM
/// per row: coefficients ⟨φ_i φ_j, φ_k⟩_w for all j ≥ i and all k at once.
/// Rows are independent tasks, so the result does not depend on scheduling.
pub fn affinity_matrix(
    basis: &EigenBasis,
    subset: &[usize],
    opts: AffinityOptions,
) -> Result<AffinityMatrix> {
    if subset.is_empty() {
        return Err(Error::Input("affinity subset is empty".into()));
    }
    if !(opts.p >= 1.0) || !opts.p.is_finite() {
        return Err(Error::Parameter(format!("exponent p must be >= 1, got {}", opts.p)));
    }
    for &i in subset {
        check_index(basis, i)?;
    }
    if let TimeMode::Fixed(t0) = opts.mode {
        time_for(opts.mode, 0.0, 0.0).map_err(|_| {
            Error::Parameter(format!("fixed t0 must be finite and >= 0, got {t0}"))
        })?;
    }

    let m = subset.len();
    let rows: Vec<Vec<Alpha>> = if basis.is_complex() {
        (0..m)
            .into_par_iter()
            .map(|a| {
                (a..m)
                    .map(|b| alpha(basis, subset[a], subset[b], opts.mode))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        let kernel = RealKernel::new(basis, subset);
        (0..m)
            .into_par_iter()
            .map(|a| kernel.row(a, opts.mode))
            .collect::<Result<Vec<_>>>()?
    };

    let mut entries = DMatrix::zeros(m, m);
    let mut min_raw = f64::INFINITY;
    let mut max_raw = f64::NEG_INFINITY;
    let mut degenerate_pairs = 0;
    for (a, row) in rows.iter().enumerate() {
        for (off, al) in row.iter().enumerate() {
            let b = a + off;
            min_raw = min_raw.min(al.raw);
            max_raw = max_raw.max(al.raw);
            if al.degenerate {
                degenerate_pairs += 1;
            }
            let v = if a == b && opts.diagonal == Diagonal::One {
                1.0
            } else {
                al.value.powf(opts.p)
            };
            entries[(a, b)] = v;
            entries[(b, a)] = v;
        }
    }
    Ok(AffinityMatrix::from_parts(
        entries,
        opts.p,
        opts.mode,
        subset.to_vec(),
        min_raw,
        max_raw,
        degenerate_pairs,
    ))
}

/// Shared read-only data for the GEMM route.
struct RealKernel<'a> {
    basis: &'a EigenBasis,
    subset: &'a [usize],
    /// Φ restricted to the subset, grid × m.
    sub: DMatrix<f64>,
    sub_norms: Vec<f64>,
}

impl<'a> RealKernel<'a> {
    fn new(basis: &'a EigenBasis, subset: &'a [usize]) -> Self {
        let sub = basis.vectors().select_columns(subset);
        let w = basis.weights();
        let sub_norms = (0..subset.len())
            .map(|a| weighted_norm_sq(&sub.column(a).into_owned(), w).sqrt())
            .collect();
        Self {
            basis,
            subset,
            sub,
            sub_norms,
        }
    }

    fn row(&self, a: usize, mode: TimeMode) -> Result<Vec<Alpha>> {
        let phi = self.basis.vectors();
        let lam = self.basis.eigenvalues();
        let w = self.basis.weights();
        let (n, k) = phi.shape();
        let m = self.subset.len();
        let cols = m - a;

        // weighted products w ⊙ φ_a ⊙ φ_b for b ≥ a, and their norms
        let fa = self.sub.column(a);
        let mut wh = DMatrix::zeros(n, cols);
        let mut h_sq = vec![0.0; cols];
        for c in 0..cols {
            let fb = self.sub.column(a + c);
            let mut acc = 0.0;
            let out = wh.column_mut(c);
            for (x, o) in out.into_iter().enumerate() {
                let h = fa[x] * fb[x];
                acc += w[x] * h * h;
                *o = w[x] * h;
            }
            h_sq[c] = acc;
        }

        // coeffs = Φᵀ (W H), k × cols
        let mut coeffs = DMatrix::<f64>::zeros(k, cols);
        // SAFETY: all three matrices are contiguous column-major buffers
        // whose shapes match the dimensions and strides passed here; Φᵀ is
        // read through swapped strides.
        unsafe {
            matrixmultiply::dgemm(
                k,
                n,
                cols,
                1.0,
                phi.as_ptr(),
                n as isize,
                1,
                wh.as_ptr(),
                1,
                n as isize,
                0.0,
                coeffs.as_mut_ptr(),
                1,
                k as isize,
            );
        }

        let i = self.subset[a];
        let mut out = Vec::with_capacity(cols);
        for c in 0..cols {
            let j = self.subset[a + c];
            let scale = self.sub_norms[a] * self.sub_norms[a + c];
            if h_sq[c].sqrt() <= DEGENERATE_PRODUCT * scale {
                out.push(Alpha::DEGENERATE);
                continue;
            }
            let t = time_for(mode, lam[i], lam[j])?;
            let col = coeffs.column(c);
            let mut heat_sq = 0.0;
            for (kk, &lk) in lam.iter().enumerate() {
                let f = t.factor(lk);
                if f != 0.0 {
                    heat_sq += f * f * col[kk] * col[kk];
                }
            }
            out.push(Alpha::from_ratio(heat_sq / h_sq[c]));
        }
        Ok(out)
    }
}
