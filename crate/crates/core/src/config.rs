//! Experiment configuration and its flat `key=value` text form.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::affinity::{Diagonal, TimeMode};
use crate::error::{Error, Result};
use crate::graphs::LaplacianKind;
use crate::io::parse_key_values;
use crate::landscape::CoordinateScaling;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Torus,
    Sphere,
    Rectangle,
    GaussProduct,
    ErNormalized,
    ErUnnormalized,
    KronProduct,
    CustomPointCloud,
    CustomEdgeList,
}

impl Preset {
    pub const ALL: [Preset; 9] = [
        Preset::Torus,
        Preset::Sphere,
        Preset::Rectangle,
        Preset::GaussProduct,
        Preset::ErNormalized,
        Preset::ErUnnormalized,
        Preset::KronProduct,
        Preset::CustomPointCloud,
        Preset::CustomEdgeList,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Torus => "torus",
            Preset::Sphere => "sphere",
            Preset::Rectangle => "rectangle",
            Preset::GaussProduct => "gauss-product",
            Preset::ErNormalized => "er-normalized",
            Preset::ErUnnormalized => "er-unnormalized",
            Preset::KronProduct => "kron-product",
            Preset::CustomPointCloud => "custom-pointcloud",
            Preset::CustomEdgeList => "custom-edgelist",
        }
    }

    /// Presets that draw random numbers and therefore need a seed.
    pub fn is_random(self) -> bool {
        matches!(
            self,
            Preset::GaussProduct | Preset::ErNormalized | Preset::ErUnnormalized | Preset::KronProduct
        )
    }

    /// Default elementwise exponent for the affinity matrix.
    pub fn default_p(self) -> f64 {
        match self {
            Preset::Torus | Preset::Rectangle => 4.0,
            Preset::Sphere => 2.0,
            _ => 1.0,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Preset::ALL.iter().map(|p| p.name()).collect();
                Error::Input(format!("unknown preset '{s}' (expected one of {})", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scale {
    #[default]
    Full,
    Small,
}

impl Scale {
    pub fn name(self) -> &'static str {
        match self {
            Scale::Full => "full",
            Scale::Small => "small",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub seed: Option<u64>,
    /// Exponent; `None` means the preset default.
    pub p: Option<f64>,
    /// Fixed diffusion time; `None` means adaptive.
    pub t0: Option<f64>,
    pub axes: Vec<usize>,
    pub out: PathBuf,
    pub scale: Scale,
    /// Grid size, vertex count or cloud size depending on the preset.
    pub n: Option<usize>,
    pub lmax: Option<usize>,
    pub sigma: Option<f64>,
    pub grid_x: Option<usize>,
    pub grid_y: Option<usize>,
    /// Points of the interval factor in the product presets.
    pub grid: Option<usize>,
    pub edge_prob: Option<f64>,
    pub diag: Diagonal,
    pub coords: CoordinateScaling,
    pub laplacian: Option<LaplacianKind>,
    pub input: Option<PathBuf>,
    pub delimiter: char,
}

impl ExperimentConfig {
    pub fn new(preset: Preset) -> Self {
        Self {
            preset,
            seed: None,
            p: None,
            t0: None,
            axes: vec![1, 2, 3],
            out: PathBuf::from("out"),
            scale: Scale::Full,
            n: None,
            lmax: None,
            sigma: None,
            grid_x: None,
            grid_y: None,
            grid: None,
            edge_prob: None,
            diag: Diagonal::Computed,
            coords: CoordinateScaling::Raw,
            laplacian: None,
            input: None,
            delimiter: ',',
        }
    }

    pub fn exponent(&self) -> f64 {
        self.p.unwrap_or_else(|| self.preset.default_p())
    }

    pub fn time_mode(&self) -> TimeMode {
        match self.t0 {
            Some(t0) => TimeMode::Fixed(t0),
            None => TimeMode::Adaptive,
        }
    }

    /// Sets one field from its text form. Used for config files and for
    /// command-line overrides alike.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "preset" => self.preset = v.parse()?,
            "seed" => self.seed = Some(num(key, v)?),
            "p" => {
                let p: f64 = num(key, v)?;
                if !(p >= 1.0 && p.is_finite()) {
                    return Err(Error::Parameter(format!("p must be a finite value >= 1, got {v}")));
                }
                self.p = Some(p);
            }
            "t0" => {
                let t: f64 = num(key, v)?;
                if !(t >= 0.0 && t.is_finite()) {
                    return Err(Error::Parameter(format!("t0 must be finite and >= 0, got {v}")));
                }
                self.t0 = Some(t);
            }
            "axes" => {
                let axes = v
                    .split(',')
                    .map(|a| num::<usize>(key, a.trim()))
                    .collect::<Result<Vec<_>>>()?;
                if axes.is_empty() || axes.contains(&0) {
                    return Err(Error::Parameter(format!("axes are 1-based ranks, got '{v}'")));
                }
                self.axes = axes;
            }
            "out" => self.out = PathBuf::from(v),
            "scale" => {
                self.scale = match v {
                    "full" => Scale::Full,
                    "small" => Scale::Small,
                    _ => return Err(Error::Input(format!("scale must be full or small, got '{v}'"))),
                }
            }
            "n" => self.n = Some(num(key, v)?),
            "lmax" => self.lmax = Some(num(key, v)?),
            "sigma" => {
                let s: f64 = num(key, v)?;
                if !(s > 0.0 && s.is_finite()) {
                    return Err(Error::Parameter(format!("sigma must be positive, got {v}")));
                }
                self.sigma = Some(s);
            }
            "grid_x" => self.grid_x = Some(num(key, v)?),
            "grid_y" => self.grid_y = Some(num(key, v)?),
            "grid" => self.grid = Some(num(key, v)?),
            "edge_prob" => {
                let p: f64 = num(key, v)?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Parameter(format!("edge_prob must lie in [0, 1], got {v}")));
                }
                self.edge_prob = Some(p);
            }
            "diag" => {
                self.diag = match v {
                    "computed" => Diagonal::Computed,
                    "one" => Diagonal::One,
                    _ => return Err(Error::Input(format!("diag must be computed or one, got '{v}'"))),
                }
            }
            "coords" => {
                self.coords = match v {
                    "raw" => CoordinateScaling::Raw,
                    "scaled" => CoordinateScaling::EigenvalueScaled,
                    _ => return Err(Error::Input(format!("coords must be raw or scaled, got '{v}'"))),
                }
            }
            "laplacian" => {
                self.laplacian = Some(match v {
                    "normalized" => LaplacianKind::Normalized,
                    "unnormalized" => LaplacianKind::Unnormalized,
                    _ => {
                        return Err(Error::Input(format!(
                            "laplacian must be normalized or unnormalized, got '{v}'"
                        )))
                    }
                })
            }
            "input" => self.input = Some(PathBuf::from(v)),
            "delimiter" => self.delimiter = parse_delimiter(value)?,
            _ => return Err(Error::Input(format!("unknown configuration key '{key}'"))),
        }
        Ok(())
    }

    /// Parses `key=value` lines; the `preset` key is required.
    pub fn from_kv(text: &str) -> Result<Self> {
        let pairs = parse_key_values(text)?;
        let preset = pairs
            .iter()
            .rev()
            .find(|(k, _)| k == "preset")
            .ok_or_else(|| Error::Input("configuration lacks a preset".into()))?;
        let mut cfg = ExperimentConfig::new(preset.1.parse()?);
        for (k, v) in &pairs {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    /// Inverse of [`from_kv`](Self::from_kv). Unset optional fields are
    /// omitted.
    pub fn to_kv(&self) -> String {
        let mut lines = vec![format!("preset={}", self.preset)];
        let mut push = |k: &str, v: String| lines.push(format!("{k}={v}"));
        if let Some(s) = self.seed {
            push("seed", s.to_string());
        }
        if let Some(p) = self.p {
            push("p", format!("{p:?}"));
        }
        if let Some(t) = self.t0 {
            push("t0", format!("{t:?}"));
        }
        let axes: Vec<String> = self.axes.iter().map(|a| a.to_string()).collect();
        push("axes", axes.join(","));
        push("out", self.out.display().to_string());
        push("scale", self.scale.name().to_string());
        for (k, v) in [
            ("n", self.n),
            ("lmax", self.lmax),
            ("grid_x", self.grid_x),
            ("grid_y", self.grid_y),
            ("grid", self.grid),
        ] {
            if let Some(v) = v {
                push(k, v.to_string());
            }
        }
        if let Some(s) = self.sigma {
            push("sigma", format!("{s:?}"));
        }
        if let Some(e) = self.edge_prob {
            push("edge_prob", format!("{e:?}"));
        }
        push(
            "diag",
            match self.diag {
                Diagonal::Computed => "computed",
                Diagonal::One => "one",
            }
            .into(),
        );
        push(
            "coords",
            match self.coords {
                CoordinateScaling::Raw => "raw",
                CoordinateScaling::EigenvalueScaled => "scaled",
            }
            .into(),
        );
        if let Some(l) = self.laplacian {
            push("laplacian", l.name().into());
        }
        if let Some(i) = &self.input {
            push("input", i.display().to_string());
        }
        push("delimiter", delimiter_name(self.delimiter));
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }

    /// Checks cross-field requirements before a run.
    pub fn validate(&self) -> Result<()> {
        if self.preset.is_random() && self.seed.is_none() {
            return Err(Error::Input(format!("preset {} requires a seed", self.preset)));
        }
        if matches!(self.preset, Preset::CustomPointCloud | Preset::CustomEdgeList) && self.input.is_none() {
            return Err(Error::Input(format!("preset {} requires an input file", self.preset)));
        }
        Ok(())
    }
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Input(format!("invalid value '{v}' for {key}")))
}

fn parse_delimiter(v: &str) -> Result<char> {
    match v {
        "tab" | "\\t" | "\t" => Ok('\t'),
        "space" | " " => Ok(' '),
        _ => {
            let v = v.trim();
            let mut chars = v.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) if c != '\n' && c != '\r' && c != '#' => Ok(c),
                _ => Err(Error::Input(format!("delimiter must be a single character, got '{v}'"))),
            }
        }
    }
}

fn delimiter_name(c: char) -> String {
    match c {
        '\t' => "tab".into(),
        ' ' => "space".into(),
        c => c.to_string(),
    }
}
