use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eigenscape::config::ExperimentConfig;
use eigenscape::experiment::run_preset;
use eigenscape::io::{fmt_f64, read_text};
use eigenscape::query::RunDir;
use eigenscape::{Error, Result};

/// Landscapes of Laplacian eigenfunctions under heat-semigroup affinity.
#[derive(Debug, Parser)]
#[command(name = "eigenscape", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment preset and write its artifacts.
    Run(RunArgs),
    /// Explore the landscape of a finished run.
    Query {
        /// Run directory written by `run`.
        dir: PathBuf,
        #[command(subcommand)]
        what: Query,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// key=value file; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// torus, sphere, rectangle, gauss-product, er-normalized,
    /// er-unnormalized, kron-product, custom-pointcloud, custom-edgelist
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Elementwise exponent of the affinity matrix.
    #[arg(long)]
    p: Option<String>,
    /// Use one fixed diffusion time for every pair.
    #[arg(long)]
    t0: Option<String>,
    /// Embedding eigenvector ranks, e.g. 1,2,3.
    #[arg(long)]
    axes: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    lmax: Option<String>,
    /// full or small.
    #[arg(long)]
    scale: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// computed or one.
    #[arg(long)]
    diag: Option<String>,
    /// raw or scaled.
    #[arg(long)]
    coords: Option<String>,
    #[arg(long = "grid-x")]
    grid_x: Option<String>,
    #[arg(long = "grid-y")]
    grid_y: Option<String>,
    /// Interval points of the product presets.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long = "edge-prob")]
    edge_prob: Option<String>,
    /// normalized or unnormalized.
    #[arg(long)]
    laplacian: Option<String>,
    /// Point-cloud CSV or edge list for the custom presets.
    #[arg(long)]
    input: Option<String>,
    /// Point-cloud column delimiter; `tab` and `space` are accepted.
    #[arg(long)]
    delimiter: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Query {
    /// Nearest neighbors of an eigenfunction in the landscape.
    Nn {
        index: usize,
        #[arg(short, long, default_value_t = 5)]
        k: usize,
    },
    /// d(index, far) / d(index, near).
    Ratio { index: usize, near: usize, far: usize },
    /// Pointwise product of two eigenfunctions, exported as CSV and SVG.
    Hadamard { i: usize, j: usize },
}

impl RunArgs {
    fn overrides(&self) -> Vec<(&'static str, &str)> {
        [
            ("preset", &self.preset),
            ("seed", &self.seed),
            ("p", &self.p),
            ("t0", &self.t0),
            ("axes", &self.axes),
            ("sigma", &self.sigma),
            ("n", &self.n),
            ("lmax", &self.lmax),
            ("scale", &self.scale),
            ("out", &self.out),
            ("diag", &self.diag),
            ("coords", &self.coords),
            ("grid_x", &self.grid_x),
            ("grid_y", &self.grid_y),
            ("grid", &self.grid),
            ("edge_prob", &self.edge_prob),
            ("laplacian", &self.laplacian),
            ("input", &self.input),
            ("delimiter", &self.delimiter),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }

    fn config(&self) -> Result<ExperimentConfig> {
        let overrides = self.overrides();
        let mut cfg = match &self.config {
            Some(path) => {
                let mut text = read_text(path)?;
                // the preset flag must be known before other keys are applied
                if let Some((_, p)) = overrides.iter().find(|(k, _)| *k == "preset") {
                    text.push_str(&format!("\npreset={p}\n"));
                }
                ExperimentConfig::from_kv(&text)?
            }
            None => {
                let preset = self
                    .preset
                    .as_deref()
                    .ok_or_else(|| Error::Input("--preset or --config is required".into()))?;
                ExperimentConfig::new(preset.parse()?)
            }
        };
        for (k, v) in overrides {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }
}

fn run(args: &RunArgs) -> Result<()> {
    let cfg = args.config()?;
    let s = run_preset(&cfg)?;
    println!("preset            {}", s.preset);
    println!("functions         {}", s.functions);
    println!("grid points       {}", s.grid_len);
    println!("degenerate pairs  {}", s.degenerate_pairs);
    println!("raw alpha range   [{}, {}]", fmt_f64(s.min_raw_alpha), fmt_f64(s.max_raw_alpha));
    for (stage, d) in &s.timings {
        println!("time {stage:<12} {:.3}s", d.as_secs_f64());
    }
    println!("time total        {:.3}s", s.runtime.as_secs_f64());
    for w in &s.warnings {
        println!("warning: {w}");
    }
    for f in &s.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn query(dir: &PathBuf, what: &Query) -> Result<()> {
    let run = RunDir::load(dir)?;
    match *what {
        Query::Nn { index, k } => {
            println!("rank,index,distance");
            for (r, (j, d)) in run.nn(index, k)?.into_iter().enumerate() {
                println!("{},{j},{}", r + 1, fmt_f64(d));
            }
        }
        Query::Ratio { index, near, far } => {
            println!("{}", fmt_f64(run.ratio(index, near, far)?));
        }
        Query::Hadamard { i, j } => {
            let h = run.hadamard(i, j)?;
            println!("grid shape        {}x{}", h.shape.0, h.shape.1);
            if let Some(c) = h.block_contrast {
                println!("block contrast    {}", fmt_f64(c));
            }
            println!("wrote {}", h.csv.display());
            println!("wrote {}", h.svg.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::Query { dir, what } => query(dir, what),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
