//! Embedding eigenfunctions as points, and the tools used to explore the
//! resulting landscape.

use nalgebra::{DMatrix, DVector};

use crate::affinity::TimeMode;
use crate::error::{Error, Result};
use crate::spectra::{eigh, EigenBasis};

/// Pairwise similarities A ∈ [0,1]^{n×n}, symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityMatrix {
    entries: DMatrix<f64>,
    p: f64,
    mode: TimeMode,
    subset: Vec<usize>,
    min_raw: f64,
    max_raw: f64,
    degenerate_pairs: usize,
}

impl AffinityMatrix {
    pub(crate) fn from_parts(
        entries: DMatrix<f64>,
        p: f64,
        mode: TimeMode,
        subset: Vec<usize>,
        min_raw: f64,
        max_raw: f64,
        degenerate_pairs: usize,
    ) -> Self {
        Self {
            entries,
            p,
            mode,
            subset,
            min_raw,
            max_raw,
            degenerate_pairs,
        }
    }

    /// Wraps externally computed entries; they must be exactly symmetric
    /// and lie in [0, 1].
    pub fn from_entries(entries: DMatrix<f64>, p: f64, mode: TimeMode) -> Result<Self> {
        let n = entries.nrows();
        if entries.ncols() != n || n == 0 {
            return Err(Error::Input("affinity matrix must be square and nonempty".into()));
        }
        for j in 0..n {
            for i in 0..n {
                let v = entries[(i, j)];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::Input(format!("affinity entry ({i}, {j}) = {v} outside [0, 1]")));
                }
                if v != entries[(j, i)] {
                    return Err(Error::Input(format!("affinity matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        let (min_raw, max_raw) = entries
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        Ok(Self {
            entries,
            p,
            mode,
            subset: (0..n).collect(),
            min_raw,
            max_raw,
            degenerate_pairs: 0,
        })
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn mode(&self) -> TimeMode {
        self.mode
    }

    /// Basis indices of the rows.
    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    /// Smallest α before clamping (before the exponent is applied).
    pub fn min_raw(&self) -> f64 {
        self.min_raw
    }

    pub fn max_raw(&self) -> f64 {
        self.max_raw
    }

    pub fn degenerate_pairs(&self) -> usize {
        self.degenerate_pairs
    }

    /// Elementwise power; the result keeps the raw-α diagnostics.
    pub fn powf(&self, q: f64) -> AffinityMatrix {
        AffinityMatrix {
            entries: self.entries.map(|v| v.powf(q)),
            p: self.p * q,
            ..self.clone()
        }
    }

    /// Largest |A - Aᵀ| entry.
    pub fn asymmetry(&self) -> f64 {
        (&self.entries - self.entries.transpose()).amax()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoordinateScaling {
    /// Raw eigenvector entries.
    #[default]
    Raw,
    /// Entries multiplied by their eigenvalue of A.
    EigenvalueScaled,
}

/// Point i of the landscape is row i of `coords`.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    coords: DMatrix<f64>,
    axes: Vec<usize>,
    eigenvalues: Vec<f64>,
    warnings: Vec<String>,
}

impl Embedding {
    /// Embedding from explicit coordinates (used for toy inputs and when
    /// reloading exported runs).
    pub fn from_coords(coords: DMatrix<f64>) -> Self {
        let d = coords.ncols();
        Self {
            coords,
            axes: (1..=d).collect(),
            eigenvalues: vec![f64::NAN; d],
            warnings: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.coords.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.coords.ncols()
    }

    pub fn coords(&self) -> &DMatrix<f64> {
        &self.coords
    }

    pub fn point(&self, i: usize) -> Vec<f64> {
        self.coords.row(i).iter().copied().collect()
    }

    /// 1-based eigenvector ranks, by |eigenvalue| descending.
    pub fn axes(&self) -> &[usize] {
        &self.axes
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.coords
            .row(i)
            .iter()
            .zip(self.coords.row(j).iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Ties in |eigenvalue| closer than this across the selection boundary
/// produce a warning.
const TIE_TOLERANCE: f64 = 1e-9;

/// Maps point i to (v_{a,i} for a in axes), v_a the eigenvector of A with
/// the a-th largest |eigenvalue|. Vectors follow the orientation rule of
/// [`eigh`].
pub fn embed(a: &AffinityMatrix, axes: &[usize], scaling: CoordinateScaling) -> Result<Embedding> {
    let n = a.size();
    if axes.is_empty() {
        return Err(Error::Parameter("at least one embedding axis is required".into()));
    }
    if let Some(&bad) = axes.iter().find(|&&r| r == 0 || r > n) {
        return Err(Error::Parameter(format!("axis rank {bad} outside 1..={n}")));
    }
    let dec = eigh(a.entries(), 1e-14)?;
    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal magnitudes keep ascending-eigenvalue order
    order.sort_by(|&x, &y| dec.values[y].abs().total_cmp(&dec.values[x].abs()));

    let mut warnings = Vec::new();
    for &r in axes {
        for nb in [r.wrapping_sub(1), r + 1] {
            if nb == 0 || nb > n || axes.contains(&nb) {
                continue;
            }
            let gap = (dec.values[order[r - 1]].abs() - dec.values[order[nb - 1]].abs()).abs();
            if gap <= TIE_TOLERANCE {
                warnings.push(format!(
                    "eigenvalue magnitude of rank {r} ties with unselected rank {nb} (gap {gap:.3e})"
                ));
            }
        }
    }

    let eigenvalues: Vec<f64> = axes.iter().map(|&r| dec.values[order[r - 1]]).collect();
    let coords = DMatrix::from_fn(n, axes.len(), |i, c| {
        let v = dec.vectors[(i, order[axes[c] - 1])];
        match scaling {
            CoordinateScaling::Raw => v,
            CoordinateScaling::EigenvalueScaled => v * eigenvalues[c],
        }
    });
    Ok(Embedding {
        coords,
        axes: axes.to_vec(),
        eigenvalues,
        warnings,
    })
}

/// The k nearest points to point i by Euclidean distance, ascending, ties
/// by index.
pub fn nearest_neighbors(e: &Embedding, i: usize, k: usize) -> Result<Vec<(usize, f64)>> {
    let n = e.len();
    if i >= n {
        return Err(Error::Input(format!("point {i} out of range for {n} points")));
    }
    if k >= n {
        return Err(Error::Parameter(format!("k = {k} must be below the point count {n}")));
    }
    let mut all: Vec<(usize, f64)> = (0..n).filter(|&j| j != i).map(|j| (j, e.distance(i, j))).collect();
    all.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    all.truncate(k);
    Ok(all)
}

/// d(i, far) / d(i, near).
pub fn distance_ratio(e: &Embedding, i: usize, near: usize, far: usize) -> Result<f64> {
    let n = e.len();
    if let Some(&bad) = [i, near, far].iter().find(|&&x| x >= n) {
        return Err(Error::Input(format!("point {bad} out of range for {n} points")));
    }
    let d_near = e.distance(i, near);
    if d_near == 0.0 {
        return Err(Error::Degenerate(format!("points {i} and {near} coincide")));
    }
    Ok(e.distance(i, far) / d_near)
}

/// Pointwise product φ_i ⊙ φ_j (real parts).
pub fn hadamard(basis: &EigenBasis, i: usize, j: usize) -> Result<DVector<f64>> {
    let m = basis.len();
    if i >= m || j >= m {
        return Err(Error::Input(format!("index out of range for {m} functions")));
    }
    Ok(basis.vectors().column(i).component_mul(&basis.vectors().column(j)))
}

/// Ratio of between-block to mean within-block variance for a vector made
/// of `blocks` contiguous equal-length blocks.
pub fn block_contrast(v: &[f64], blocks: usize) -> Result<f64> {
    if blocks < 2 || v.len() % blocks != 0 || v.len() / blocks < 2 {
        return Err(Error::Parameter(format!(
            "cannot split {} entries into {blocks} blocks of at least two",
            v.len()
        )));
    }
    let size = v.len() / blocks;
    let means: Vec<f64> = v.chunks(size).map(|c| c.iter().sum::<f64>() / size as f64).collect();
    let grand = means.iter().sum::<f64>() / blocks as f64;
    let between = means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / blocks as f64;
    let within = v
        .chunks(size)
        .zip(&means)
        .map(|(c, m)| c.iter().map(|x| (x - m).powi(2)).sum::<f64>() / size as f64)
        .sum::<f64>()
        / blocks as f64;
    if within == 0.0 {
        return Err(Error::Degenerate("blocks are internally constant".into()));
    }
    Ok(between / within)
}

/// Distance of each point from the centroid of all other points.
pub fn leave_one_out_centroid_distances(e: &Embedding) -> Vec<f64> {
    let n = e.len();
    let d = e.dim();
    let total: Vec<f64> = (0..d).map(|c| e.coords.column(c).sum()).collect();
    (0..n)
        .map(|i| {
            (0..d)
                .map(|c| {
                    let others = (total[c] - e.coords[(i, c)]) / (n - 1).max(1) as f64;
                    (e.coords[(i, c)] - others).powi(2)
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// Distance of each point from the centroid of all points.
pub fn centroid_distances(e: &Embedding) -> Vec<f64> {
    let n = e.len() as f64;
    let centroid: Vec<f64> = (0..e.dim()).map(|c| e.coords.column(c).sum() / n).collect();
    (0..e.len())
        .map(|i| {
            centroid
                .iter()
                .enumerate()
                .map(|(c, m)| (e.coords[(i, c)] - m).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// Ranks starting at 1, ties sharing their average rank.
pub fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut s = 0;
    while s < idx.len() {
        let mut e = s + 1;
        while e < idx.len() && v[idx[e]] == v[idx[s]] {
            e += 1;
        }
        let r = (s + e + 1) as f64 / 2.0;
        for &k in &idx[s..e] {
            ranks[k] = r;
        }
        s = e;
    }
    ranks
}

/// Spearman rank correlation (Pearson correlation of average ranks).
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "spearman needs equal lengths");
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}
