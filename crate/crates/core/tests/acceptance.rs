//! Acceptance suite. Runs every criterion, prints one line each, and exits
//! nonzero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use eigenscape::affinity::{alpha, alpha_local_oracle, solve_time, TimeMode};
use eigenscape::config::{ExperimentConfig, Preset, Scale};
use eigenscape::experiment::{compute, run_preset, write_run, Run};
use eigenscape::graphs::{cycle_adjacency, erdos_renyi, gaussian_kernel, unnormalized_laplacian};
use eigenscape::landscape::{
    block_contrast, centroid_distances, distance_ratio, hadamard, leave_one_out_centroid_distances,
    nearest_neighbors, spearman,
};
use eigenscape::spectra::{laplacian_basis, sphere_basis, torus_basis, torus_frequency_index, TorusMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Pinned seed for every random preset.
const SEED: u64 = 7;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Preset runs shared between criteria, computed on first use.
#[derive(Default)]
struct Runs {
    done: BTreeMap<&'static str, (Run, Duration)>,
    scratch: Option<tempfile::TempDir>,
}

impl Runs {
    fn scratch(&mut self) -> &Path {
        self.scratch.get_or_insert_with(|| tempfile::tempdir().unwrap()).path()
    }

    fn config(&mut self, name: &'static str) -> ExperimentConfig {
        let preset: Preset = name.parse().unwrap();
        let mut c = ExperimentConfig::new(preset);
        c.scale = Scale::Small;
        if preset.is_random() {
            c.seed = Some(SEED);
        }
        match preset {
            Preset::CustomPointCloud => {
                let mut rng = ChaCha8Rng::seed_from_u64(SEED);
                let text: String = (0..80)
                    .map(|_| format!("{},{}\n", rng.gen::<f64>(), rng.gen::<f64>()))
                    .collect();
                let path = self.scratch().join("cloud.csv");
                std::fs::write(&path, text).unwrap();
                c.input = Some(path);
                c.sigma = Some(0.3);
            }
            Preset::CustomEdgeList => {
                let mut text: String = (0..60).map(|i| format!("{i} {}\n", (i + 1) % 60)).collect();
                text.extend((0..60).step_by(7).map(|i| format!("{i} {} 0.5\n", (i + 23) % 60)));
                let path = self.scratch().join("edges.txt");
                std::fs::write(&path, text).unwrap();
                c.input = Some(path);
            }
            _ => {}
        }
        c
    }

    fn get(&mut self, name: &'static str) -> &(Run, Duration) {
        if !self.done.contains_key(name) {
            let cfg = self.config(name);
            let start = Instant::now();
            let run = compute(&cfg).unwrap_or_else(|e| panic!("preset {name}: {e}"));
            self.done.insert(name, (run, start.elapsed()));
        }
        &self.done[name]
    }
}

const PRESETS: [&str; 9] = [
    "torus",
    "sphere",
    "rectangle",
    "gauss-product",
    "er-normalized",
    "er-unnormalized",
    "kron-product",
    "custom-pointcloud",
    "custom-edgelist",
];

fn criterion_1() -> Outcome {
    let b = laplacian_basis(&unnormalized_laplacian(&cycle_adjacency(64).unwrap()), 1e-14).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (i, j) = (rng.gen_range(0..64), rng.gen_range(0..64));
        let a = alpha(&b, i, j, TimeMode::Adaptive).unwrap().raw;
        let o = alpha_local_oracle(&b, i, j).unwrap();
        worst = worst.max((a * a - o).abs());
    }
    outcome(worst <= 1e-8, format!("max |alpha^2 - oracle| = {worst:.2e} over 50 pairs on C_64"))
}

fn criterion_2(runs: &mut Runs) -> Outcome {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut asym: f64 = 0.0;
    for name in PRESETS {
        let (run, _) = runs.get(name);
        lo = lo.min(run.affinity.min_raw());
        hi = hi.max(run.affinity.max_raw());
        asym = asym.max(run.affinity.asymmetry());
    }
    outcome(
        lo >= -1e-9 && hi <= 1.0 + 1e-9 && asym == 0.0,
        format!("raw alpha in [{lo:.3e}, {hi:.17}], |A - A^T|_max = {asym:e} over {} presets", PRESETS.len()),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        // (0, 100]
        let l = 100.0 - rng.gen_range(0.0..100.0);
        let m = 100.0 - rng.gen_range(0.0..100.0);
        let t = solve_time(l, m).unwrap().t;
        worst = worst.max(((-t * l).exp() + (-t * m).exp() - 1.0).abs());
    }
    let mut closed: f64 = 0.0;
    for l in [0.01, 1.0, 3.5, 100.0] {
        closed = closed.max((solve_time(l, l).unwrap().t - std::f64::consts::LN_2 / l).abs());
    }
    let golden = ((1.0 + 5f64.sqrt()) / 2.0).ln();
    closed = closed.max((solve_time(1.0, 2.0).unwrap().t - golden).abs());
    outcome(
        worst <= 1e-12 && closed <= 1e-12,
        format!("max residual {worst:.2e} over 1000 pairs, closed-form error {closed:.2e}"),
    )
}

fn criterion_4() -> Outcome {
    let n = 100;
    let b = torus_basis(n, TorusMode::Complex).unwrap();
    let mut worst: f64 = 0.0;
    for k in 1..=10i64 {
        let i = torus_frequency_index(n, k);
        let j = torus_frequency_index(n, n as i64 - k);
        worst = worst.max((alpha(&b, i, j, TimeMode::Adaptive).unwrap().value - 1.0).abs());
    }
    outcome(worst <= 1e-9, format!("max |alpha(k, n-k) - 1| = {worst:.2e} for k = 1..10"))
}

fn criterion_5(runs: &mut Runs) -> Outcome {
    let (run, _) = runs.get("torus");
    let freq: Vec<f64> = run.subset.iter().map(|&k| run.basis.labels()[k][0] as f64).collect();
    let first: Vec<f64> = (0..run.embedding.len()).map(|i| run.embedding.coords()[(i, 0)]).collect();
    // the curve has no preferred direction
    let rho = spearman(&freq, &first).abs();
    outcome(
        rho >= 0.9,
        format!("|Spearman(|k|, first coordinate)| = {rho:.4} at p = {}", run.affinity.p()),
    )
}

fn criterion_6(runs: &mut Runs) -> Outcome {
    let ortho = sphere_basis(14, 181, 181).unwrap().orthonormality_error();
    let (run, _) = runs.get("sphere");
    let ell: Vec<f64> = run.subset.iter().map(|&k| run.basis.labels()[k][0] as f64).collect();
    let rho = spearman(&ell, &centroid_distances(&run.embedding));
    let best = (0..run.embedding.dim())
        .map(|c| {
            let col: Vec<f64> = (0..run.embedding.len()).map(|i| run.embedding.coords()[(i, c)]).collect();
            spearman(&ell, &col).abs()
        })
        .fold(0.0f64, f64::max);
    outcome(
        ortho <= 1e-5 && rho >= 0.8,
        format!(
            "orthogonality error {ortho:.2e}; Spearman(l, centroid distance) = {rho:.4} \
             (best single coordinate |rho| = {best:.4})"
        ),
    )
}

fn criterion_7(runs: &mut Runs) -> Outcome {
    let (run, _) = runs.get("rectangle");
    let e = &run.embedding;
    let n_of = |row: usize| run.basis.labels()[run.subset[row]][1];
    let same = (0..e.len())
        .filter(|&i| {
            let (j, _) = nearest_neighbors(e, i, 1).unwrap()[0];
            n_of(i) == n_of(j)
        })
        .count();
    let frac = same as f64 / e.len() as f64;
    outcome(
        e.len() == 400 && frac >= 0.9,
        format!("{same}/{} points have a same-n nearest neighbor ({:.1}%)", e.len(), 100.0 * frac),
    )
}

fn criterion_8(runs: &mut Runs) -> Outcome {
    let (run, _) = runs.get("er-normalized");
    let d = leave_one_out_centroid_distances(&run.embedding);
    let rest = &d[1..];
    let mean = rest.iter().sum::<f64>() / rest.len() as f64;
    let sd = (rest.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / rest.len() as f64).sqrt();
    let next = rest.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let outlier = d[0] > next && d[0] > mean + 3.0 * sd;
    let rank: Vec<f64> = (1..d.len()).map(|i| i as f64).collect();
    let first: Vec<f64> = (1..d.len()).map(|i| run.embedding.coords()[(i, 0)]).collect();
    let rho = spearman(&rank, &first).abs();
    outcome(
        outlier && rho >= 0.9,
        format!(
            "n = {}: phi_0 distance {:.4} vs next {next:.4} (mean + 3sd = {:.4}); |Spearman| = {rho:.5}",
            d.len(),
            d[0],
            mean + 3.0 * sd
        ),
    )
}

fn criterion_9(runs: &mut Runs) -> Outcome {
    let k1 = erdos_renyi(12, 0.5, SEED).unwrap();
    let pts: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64 / 7.0]).collect();
    let k2 = gaussian_kernel(&pts, 0.5 / 7.0).unwrap();
    let (proj, vals) = common::kron_separability_error(&k2, &k1);

    let (run, _) = runs.get("kron-product");
    let e = &run.embedding;
    let nn = nearest_neighbors(e, 10, 3).unwrap();
    let ratio = distance_ratio(e, 10, 11, 9).unwrap();
    let h = hadamard(&run.basis, 10, 11).unwrap();
    let contrast = block_contrast(h.as_slice(), run.basis.grid_shape().unwrap().0).unwrap();
    outcome(
        proj <= 1e-7 && vals <= 1e-7 && nn[0].0 == 11 && ratio >= 10.0,
        format!(
            "12x8 separability: projector error {proj:.2e}, eigenvalue error {vals:.2e}; \
             NN of phi_10 = {:?}; ratio(10, 11, 9) = {ratio:.1}; phi_10*phi_11 block contrast = {contrast:.3e}",
            nn.iter().map(|p| p.0).collect::<Vec<_>>()
        ),
    )
}

fn criterion_10(runs: &mut Runs) -> Outcome {
    let (run, _) = runs.get("er-unnormalized");
    let dir = tempfile::tempdir().unwrap();
    let files = write_run(run, dir.path()).unwrap();
    let exported = files.iter().any(|f| f.ends_with("l1_profile.csv"));
    let l1: Vec<f64> = run.l1.as_ref().unwrap().iter().map(|e| e.l1).collect();
    let mean = l1.iter().sum::<f64>() / l1.len() as f64;
    let sd = (l1.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / l1.len() as f64).sqrt();
    let min = l1.iter().copied().fold(f64::INFINITY, f64::min);
    let flagged = l1.iter().filter(|&&x| x < mean - 3.0 * sd).count();
    outcome(
        exported && min < mean - 3.0 * sd,
        format!("min l1 {min:.4} < mean - 3sd = {:.4}; {flagged} eigenvectors flagged", mean - 3.0 * sd),
    )
}

fn criterion_11(runs: &mut Runs) -> Outcome {
    let mut checked = 0;
    let mut mismatched = Vec::new();
    for name in ["er-normalized", "torus", "custom-pointcloud"] {
        let mut cfg = runs.config(name);
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        cfg.out = a.path().to_path_buf();
        let fa = run_preset(&cfg).unwrap().files;
        cfg.out = b.path().to_path_buf();
        run_preset(&cfg).unwrap();
        for f in fa {
            let name_only = f.file_name().unwrap();
            if name_only == "config.txt" {
                continue;
            }
            checked += 1;
            if std::fs::read(&f).unwrap() != std::fs::read(b.path().join(name_only)).unwrap() {
                mismatched.push(format!("{name}/{}", name_only.to_string_lossy()));
            }
        }
    }
    outcome(
        mismatched.is_empty(),
        format!("{checked} artifacts compared across reruns, mismatches: {mismatched:?}"),
    )
}

fn main() {
    let mut runs = Runs::default();
    type Check = Box<dyn Fn(&mut Runs) -> Outcome>;
    let criteria: Vec<(u32, Duration, Check)> = vec![
        (1, Duration::from_secs(5), Box::new(|_| criterion_1())),
        (2, Duration::MAX, Box::new(criterion_2)),
        (3, Duration::from_secs(1), Box::new(|_| criterion_3())),
        (4, Duration::from_secs(5), Box::new(|_| criterion_4())),
        (5, Duration::from_secs(30), Box::new(criterion_5)),
        (6, Duration::from_secs(180), Box::new(criterion_6)),
        (7, Duration::from_secs(120), Box::new(criterion_7)),
        (8, Duration::from_secs(120), Box::new(criterion_8)),
        (9, Duration::from_secs(300), Box::new(criterion_9)),
        (10, Duration::MAX, Box::new(criterion_10)),
        (11, Duration::MAX, Box::new(criterion_11)),
    ];
    // preset runs used by a criterion count towards its budget
    let owner: BTreeMap<u32, &str> = [
        (5, "torus"),
        (6, "sphere"),
        (7, "rectangle"),
        (8, "er-normalized"),
        (9, "kron-product"),
    ]
    .into_iter()
    .collect();

    let mut failed = 0;
    for (id, budget, check) in &criteria {
        let start = Instant::now();
        let preloaded = owner.get(id).is_some_and(|n| runs.done.contains_key(n));
        let out = check(&mut runs);
        let mut elapsed = start.elapsed();
        if preloaded {
            elapsed += runs.done[owner[id]].1;
        }
        let in_time = elapsed <= *budget;
        let pass = out.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {id:>2}: {} | {} | {:.2}s{}",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            if in_time { String::new() } else { format!(" exceeds budget {:.0}s", budget.as_secs_f64()) }
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
