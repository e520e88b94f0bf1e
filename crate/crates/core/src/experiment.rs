//! End-to-end experiment presets: basis, affinity, landscape and artifacts.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::affinity::{affinity_matrix, AffinityOptions};
use crate::config::{ExperimentConfig, Preset, Scale};
use crate::error::{Error, Result};
use crate::graphs::{
    erdos_renyi, gaussian_kernel, kernel_from_edges, kronecker_kernel, laplacian, KernelMatrix,
    LaplacianKind,
};
use crate::io::{
    basis_to_csv, embedding_to_csv, fmt_f64, l1_profile_to_csv, matrix_to_csv, parse_edge_list,
    parse_point_cloud, read_text, write_text,
};
use crate::landscape::{embed, AffinityMatrix, Embedding};
use crate::spectra::{
    l1_profile, laplacian_basis, rectangle_basis, sphere_basis, sphere_index, torus_basis,
    EigenBasis, L1Entry, TorusMode,
};
use crate::svg::{scatter, Scatter};

const EIGH_TOL: f64 = 1e-14;

/// Everything a preset computes, before anything is written.
#[derive(Debug, Clone)]
pub struct Run {
    pub config: ExperimentConfig,
    /// Basis the semigroup runs over (extended for the sphere).
    pub basis: EigenBasis,
    /// Functions being compared, as indices into `basis`.
    pub subset: Vec<usize>,
    pub affinity: AffinityMatrix,
    pub embedding: Embedding,
    pub l1: Option<Vec<L1Entry>>,
    pub metadata: Vec<(String, String)>,
    pub timings: Vec<(&'static str, Duration)>,
}

/// Returned by [`run_preset`]; nothing in here is written to disk.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub preset: Preset,
    pub functions: usize,
    pub grid_len: usize,
    pub degenerate_pairs: usize,
    pub min_raw_alpha: f64,
    pub max_raw_alpha: f64,
    pub warnings: Vec<String>,
    pub timings: Vec<(&'static str, Duration)>,
    pub runtime: Duration,
    pub files: Vec<PathBuf>,
}

struct Prepared {
    basis: EigenBasis,
    subset: Vec<usize>,
    meta: Vec<(String, String)>,
    with_l1: bool,
}

fn kv(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

fn seed_of(cfg: &ExperimentConfig) -> Result<u64> {
    cfg.seed
        .ok_or_else(|| Error::Input(format!("preset {} requires a seed", cfg.preset)))
}

/// Builds the basis for `cfg` and runs the affinity and embedding stages.
pub fn compute(cfg: &ExperimentConfig) -> Result<Run> {
    cfg.validate()?;
    let mut timings = Vec::new();
    let clock = Instant::now();
    let prep = prepare(cfg)?;
    timings.push(("basis", clock.elapsed()));

    let clock = Instant::now();
    let opts = AffinityOptions {
        p: cfg.exponent(),
        mode: cfg.time_mode(),
        diagonal: cfg.diag,
    };
    let affinity = affinity_matrix(&prep.basis, &prep.subset, opts)?;
    timings.push(("affinity", clock.elapsed()));

    let clock = Instant::now();
    let embedding = embed(&affinity, &cfg.axes, cfg.coords)?;
    timings.push(("embedding", clock.elapsed()));

    let l1 = prep.with_l1.then(|| l1_profile(&prep.basis));
    let mut metadata = vec![
        kv("preset", cfg.preset),
        kv("scale", cfg.scale.name()),
        kv("mode", cfg.time_mode().describe()),
        kv("p", format!("{:?}", cfg.exponent())),
        kv("diag", if cfg.diag == crate::affinity::Diagonal::One { "one" } else { "computed" }),
        kv(
            "coords",
            match cfg.coords {
                crate::landscape::CoordinateScaling::Raw => "raw",
                crate::landscape::CoordinateScaling::EigenvalueScaled => "scaled",
            },
        ),
        kv(
            "axes",
            cfg.axes.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(","),
        ),
        kv("seed", cfg.seed.map_or("none".to_string(), |s| s.to_string())),
        kv("basis", prep.basis.description()),
        kv("basis_size", prep.basis.len()),
        kv("functions", prep.subset.len()),
        kv("grid_len", prep.basis.grid_len()),
    ];
    if let Some((r, c)) = prep.basis.grid_shape() {
        metadata.push(kv("grid_shape", format!("{r}x{c}")));
    }
    metadata.extend(prep.meta);
    metadata.push(kv("degenerate_pairs", affinity.degenerate_pairs()));
    metadata.push(kv("min_raw_alpha", fmt_f64(affinity.min_raw())));
    metadata.push(kv("max_raw_alpha", fmt_f64(affinity.max_raw())));
    let eig: Vec<String> = embedding.eigenvalues().iter().map(|v| fmt_f64(*v)).collect();
    metadata.push(kv("embedding_eigenvalues", eig.join(",")));
    for (k, w) in embedding.warnings().iter().enumerate() {
        metadata.push(kv(&format!("warning{k}"), w));
    }

    Ok(Run {
        config: cfg.clone(),
        basis: prep.basis,
        subset: prep.subset,
        affinity,
        embedding,
        l1,
        metadata,
        timings,
    })
}

fn prepare(cfg: &ExperimentConfig) -> Result<Prepared> {
    let small = cfg.scale == Scale::Small;
    match cfg.preset {
        Preset::Torus => {
            let n = cfg.n.unwrap_or(100);
            let basis = torus_basis(n, TorusMode::Real)?;
            Ok(Prepared {
                subset: (0..basis.len()).collect(),
                basis,
                meta: vec![kv("n", n)],
                with_l1: false,
            })
        }
        Preset::Sphere => {
            let lmax = cfg.lmax.unwrap_or(if small { 9 } else { 14 });
            let side = if small { 91 } else { 181 };
            let na = cfg.grid_x.unwrap_or(side);
            let nb = cfg.grid_y.unwrap_or(side);
            // products of degrees l1, l2 live in degrees <= l1 + l2
            let basis = sphere_basis(2 * lmax, na, nb)?;
            let count = sphere_index(lmax, lmax as i64) + 1;
            Ok(Prepared {
                subset: (0..count).collect(),
                basis,
                meta: vec![kv("lmax", lmax), kv("extended_lmax", 2 * lmax)],
                with_l1: false,
            })
        }
        Preset::Rectangle => {
            let gx = cfg.grid_x.unwrap_or(40);
            let gy = cfg.grid_y.unwrap_or(10);
            let basis = rectangle_basis(gx, gy, gx, gy)?;
            Ok(Prepared {
                subset: (0..basis.len()).collect(),
                basis,
                meta: vec![kv("mmax", gx), kv("nmax", gy)],
                with_l1: false,
            })
        }
        Preset::GaussProduct => {
            let seed = seed_of(cfg)?;
            let n = cfg.n.unwrap_or(100);
            let grid = cfg.grid.unwrap_or(10);
            let ys = interval_grid(grid)?;
            let sigma = cfg.sigma.unwrap_or(2.0 * spacing(grid));
            let normal = Normal::new(0.0, 0.1).expect("valid normal");
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cloud: Vec<[f64; 2]> = (0..n)
                .map(|_| [normal.sample(&mut rng), normal.sample(&mut rng)])
                .collect();
            let points: Vec<Vec<f64>> = ys
                .iter()
                .flat_map(|&y| cloud.iter().map(move |c| vec![c[0], c[1], y]))
                .collect();
            let k = gaussian_kernel(&points, sigma)?;
            let kind = cfg.laplacian.unwrap_or(LaplacianKind::Normalized);
            let mut p = graph_basis(&k, kind)?;
            p.basis = p.basis.with_grid_shape(grid, n);
            p.meta.extend([
                kv("cloud_points", n),
                kv("cloud_variance", "0.01"),
                kv("grid_points", grid),
                kv("sigma", format!("{sigma:?}")),
            ]);
            Ok(p)
        }
        Preset::ErNormalized | Preset::ErUnnormalized => {
            let seed = seed_of(cfg)?;
            let n = cfg.n.unwrap_or(if small { 300 } else { 1000 });
            let prob = cfg.edge_prob.unwrap_or(0.2);
            let kind = if cfg.preset == Preset::ErNormalized {
                LaplacianKind::Normalized
            } else {
                LaplacianKind::Unnormalized
            };
            let k = erdos_renyi(n, prob, seed)?;
            let edges = k.edge_count();
            let mut p = graph_basis(&k, kind)?;
            p.meta.extend([kv("n", n), kv("edge_prob", format!("{prob:?}")), kv("edges", edges)]);
            Ok(p)
        }
        Preset::KronProduct => {
            let seed = seed_of(cfg)?;
            let n = cfg.n.unwrap_or(100);
            let prob = cfg.edge_prob.unwrap_or(0.2);
            let grid = cfg.grid.unwrap_or(10);
            let ys = interval_grid(grid)?;
            let sigma = cfg.sigma.unwrap_or(0.5 * spacing(grid));
            let k1 = erdos_renyi(n, prob, seed)?;
            let pts: Vec<Vec<f64>> = ys.iter().map(|&y| vec![y]).collect();
            let k2 = gaussian_kernel(&pts, sigma)?;
            let k = kronecker_kernel(&k2, &k1);
            let kind = cfg.laplacian.unwrap_or(LaplacianKind::Normalized);
            let mut p = graph_basis(&k, kind)?;
            p.basis = p.basis.with_grid_shape(grid, n);
            p.meta.extend([
                kv("n", n),
                kv("edge_prob", format!("{prob:?}")),
                kv("edges", k1.edge_count()),
                kv("grid_points", grid),
                kv("sigma", format!("{sigma:?}")),
            ]);
            Ok(p)
        }
        Preset::CustomPointCloud => {
            let path = cfg.input.as_deref().expect("validated");
            let points = parse_point_cloud(&read_text(path)?, cfg.delimiter)?;
            let sigma = cfg
                .sigma
                .ok_or_else(|| Error::Input("custom-pointcloud requires sigma".into()))?;
            let k = gaussian_kernel(&points, sigma)?;
            let mut p = graph_basis(&k, cfg.laplacian.unwrap_or(LaplacianKind::Normalized))?;
            p.meta.extend([kv("input", path.display()), kv("sigma", format!("{sigma:?}"))]);
            Ok(p)
        }
        Preset::CustomEdgeList => {
            let path = cfg.input.as_deref().expect("validated");
            let list = parse_edge_list(&read_text(path)?)?;
            let n = cfg.n.unwrap_or(list.vertices).max(list.vertices);
            let k = kernel_from_edges(n, &list.edges)?;
            let mut p = graph_basis(&k, cfg.laplacian.unwrap_or(LaplacianKind::Normalized))?;
            p.meta.extend([kv("input", path.display()), kv("edges", k.edge_count())]);
            Ok(p)
        }
    }
}

fn graph_basis(k: &KernelMatrix, kind: LaplacianKind) -> Result<Prepared> {
    let basis = laplacian_basis(&laplacian(k, kind)?, EIGH_TOL)?;
    Ok(Prepared {
        subset: (0..basis.len()).collect(),
        basis,
        meta: vec![kv("laplacian", kind.name())],
        with_l1: true,
    })
}

fn interval_grid(points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::Parameter(format!("interval grid needs at least 2 points, got {points}")));
    }
    Ok((0..points).map(|i| i as f64 / (points - 1) as f64).collect())
}

fn spacing(points: usize) -> f64 {
    1.0 / (points.max(2) - 1) as f64
}

/// Scatter of the first two embedding coordinates, colored and grouped by
/// the preset's natural labels.
pub fn landscape_svg(run: &Run) -> String {
    let e = &run.embedding;
    let n = e.len();
    let x: Vec<f64> = (0..n).map(|i| e.coords()[(i, 0)]).collect();
    let y: Vec<f64> = if e.dim() > 1 {
        (0..n).map(|i| e.coords()[(i, 1)]).collect()
    } else {
        vec![0.0; n]
    };
    let labels: Vec<&Vec<i64>> = run.subset.iter().filter_map(|&k| run.basis.labels().get(k)).collect();
    let labelled = labels.len() == run.subset.len();
    let (color, groups, order): (Vec<f64>, Option<Vec<i64>>, Vec<f64>) = match run.config.preset {
        Preset::Sphere if labelled => (
            labels
                .iter()
                .map(|l| if l[0] == 0 { 0.0 } else { l[1] as f64 / l[0] as f64 })
                .collect(),
            Some(labels.iter().map(|l| l[0]).collect()),
            labels.iter().map(|l| l[1] as f64).collect(),
        ),
        Preset::Rectangle if labelled => (
            labels.iter().map(|l| l[0] as f64).collect(),
            Some(labels.iter().map(|l| l[1]).collect()),
            labels.iter().map(|l| l[0] as f64).collect(),
        ),
        Preset::Torus if labelled => (labels.iter().map(|l| l[0] as f64).collect(), None, Vec::new()),
        _ => (run.subset.iter().map(|&k| k as f64).collect(), None, Vec::new()),
    };
    let title = format!(
        "{} landscape, p = {}, axes {:?}",
        run.config.preset,
        run.config.exponent(),
        e.axes()
    );
    scatter(&Scatter {
        x: &x,
        y: &y,
        color: &color,
        groups: groups.as_deref().map(|g| (g, order.as_slice())),
        title: &title,
    })
}

/// Writes all artifacts of `run` into `dir`, creating it if needed.
pub fn write_run(run: &Run, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    let mut put = |name: &str, text: String| -> Result<()> {
        let path = dir.join(name);
        write_text(&path, &text)?;
        files.push(path);
        Ok(())
    };
    put("basis.csv", basis_to_csv(&run.basis, &run.subset))?;
    put("affinity.csv", matrix_to_csv(run.affinity.entries()))?;
    put("embedding.csv", embedding_to_csv(&run.embedding, &run.basis, &run.subset))?;
    put("landscape.svg", landscape_svg(run))?;
    if let Some(l1) = &run.l1 {
        put("l1_profile.csv", l1_profile_to_csv(l1))?;
    }
    let mut meta = String::new();
    for (k, v) in &run.metadata {
        meta.push_str(&format!("{k}={v}\n"));
    }
    put("metadata.txt", meta)?;
    put("config.txt", run.config.to_kv())?;
    Ok(files)
}

/// Computes the preset and writes its artifacts to `config.out`.
pub fn run_preset(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let start = Instant::now();
    let run = compute(cfg)?;
    let files = write_run(&run, &cfg.out)?;
    Ok(RunSummary {
        preset: cfg.preset,
        functions: run.subset.len(),
        grid_len: run.basis.grid_len(),
        degenerate_pairs: run.affinity.degenerate_pairs(),
        min_raw_alpha: run.affinity.min_raw(),
        max_raw_alpha: run.affinity.max_raw(),
        warnings: run.embedding.warnings().to_vec(),
        timings: run.timings,
        runtime: start.elapsed(),
        files,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(preset: Preset) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(preset);
        c.scale = Scale::Small;
        c.seed = Some(5);
        c
    }

    #[test]
    fn torus_defaults() {
        let mut c = small(Preset::Torus);
        c.n = Some(24);
        let run = compute(&c).unwrap();
        assert_eq!(run.subset.len(), 24);
        assert_eq!(run.affinity.p(), 4.0);
        assert_eq!(run.embedding.dim(), 3);
        assert!(run.l1.is_none());
    }

    #[test]
    fn sphere_uses_extended_basis() {
        let mut c = small(Preset::Sphere);
        c.lmax = Some(2);
        c.grid_x = Some(12);
        c.grid_y = Some(12);
        let run = compute(&c).unwrap();
        assert_eq!(run.subset.len(), 9);
        assert_eq!(run.basis.len(), 25);
        assert!(run.metadata.contains(&kv("extended_lmax", 4)));
    }

    #[test]
    fn kron_shape_and_sigma() {
        let mut c = small(Preset::KronProduct);
        c.n = Some(12);
        c.grid = Some(4);
        c.edge_prob = Some(0.6);
        let run = compute(&c).unwrap();
        assert_eq!(run.basis.grid_len(), 48);
        assert_eq!(run.basis.grid_shape(), Some((4, 12)));
        assert!(run.metadata.contains(&kv("sigma", format!("{:?}", 0.5 / 3.0))));
    }

    #[test]
    fn gauss_product_is_seeded() {
        let mut c = small(Preset::GaussProduct);
        c.n = Some(10);
        c.grid = Some(3);
        let a = compute(&c).unwrap();
        let b = compute(&c).unwrap();
        assert_eq!(a.affinity.entries(), b.affinity.entries());
        c.seed = Some(6);
        let d = compute(&c).unwrap();
        assert_ne!(a.basis.eigenvalues(), d.basis.eigenvalues());
    }

    #[test]
    fn missing_seed_is_usage_error() {
        let c = ExperimentConfig::new(Preset::ErNormalized);
        let err = compute(&c).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn too_many_axes_is_parameter_error() {
        let mut c = small(Preset::Torus);
        c.n = Some(4);
        c.axes = vec![1, 2, 5];
        assert!(matches!(compute(&c), Err(Error::Parameter(_))));
    }
}
