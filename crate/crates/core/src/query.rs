//! Exploration of a finished run directory.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::io::{parse_key_values, parse_table, read_text, vector_to_csv, write_text, Table};
use crate::landscape::{block_contrast, distance_ratio, nearest_neighbors, Embedding};
use crate::svg::heat_map;

/// Embedding and metadata of a run, reloaded from its CSV artifacts.
#[derive(Debug, Clone)]
pub struct RunDir {
    pub path: PathBuf,
    /// Eigenfunction index of each embedded point.
    pub indices: Vec<usize>,
    pub embedding: Embedding,
    pub metadata: Vec<(String, String)>,
}

fn is_coordinate(name: &str) -> bool {
    matches!(name, "x" | "y" | "z")
        || name.strip_prefix('c').is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

fn index_column(t: &Table, file: &str) -> Result<Vec<usize>> {
    let col = t
        .column("index")
        .ok_or_else(|| Error::Input(format!("{file} lacks an index column")))?;
    col.into_iter()
        .map(|v| {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::Input(format!("{file}: bad index {v}")))
            }
        })
        .collect()
}

impl RunDir {
    pub fn load(path: &Path) -> Result<Self> {
        let table = parse_table(&read_text(&path.join("embedding.csv"))?)?;
        let indices = index_column(&table, "embedding.csv")?;
        let coord_cols: Vec<usize> = (0..table.columns.len())
            .filter(|&c| is_coordinate(&table.columns[c]))
            .collect();
        if coord_cols.is_empty() {
            return Err(Error::Input("embedding.csv has no coordinate columns".into()));
        }
        let coords = DMatrix::from_fn(table.rows.len(), coord_cols.len(), |r, c| table.rows[r][coord_cols[c]]);
        let metadata = parse_key_values(&read_text(&path.join("metadata.txt"))?)?;
        Ok(Self {
            path: path.to_path_buf(),
            indices,
            embedding: Embedding::from_coords(coords),
            metadata,
        })
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn row_of(&self, index: usize) -> Result<usize> {
        self.indices
            .iter()
            .position(|&i| i == index)
            .ok_or_else(|| Error::Input(format!("eigenfunction {index} is not part of this run")))
    }

    /// k nearest eigenfunctions of `index` as (index, distance).
    pub fn nn(&self, index: usize, k: usize) -> Result<Vec<(usize, f64)>> {
        let r = self.row_of(index)?;
        Ok(nearest_neighbors(&self.embedding, r, k)?
            .into_iter()
            .map(|(j, d)| (self.indices[j], d))
            .collect())
    }

    pub fn ratio(&self, index: usize, near: usize, far: usize) -> Result<f64> {
        distance_ratio(&self.embedding, self.row_of(index)?, self.row_of(near)?, self.row_of(far)?)
    }

    /// Grid shape recorded in the metadata, if any.
    pub fn grid_shape(&self) -> Option<(usize, usize)> {
        let (r, c) = self.meta("grid_shape")?.split_once('x')?;
        Some((r.parse().ok()?, c.parse().ok()?))
    }

    /// Pointwise product of two exported eigenvectors, written as
    /// `hadamard_i_j.csv` and `hadamard_i_j.svg` in the run directory.
    pub fn hadamard(&self, i: usize, j: usize) -> Result<HadamardExport> {
        let basis = parse_table(&read_text(&self.path.join("basis.csv"))?)?;
        let idx = index_column(&basis, "basis.csv")?;
        let first = basis
            .column_index("s0")
            .ok_or_else(|| Error::Input("basis.csv has no sample columns".into()))?;
        let row = |k: usize| -> Result<&[f64]> {
            let r = idx
                .iter()
                .position(|&x| x == k)
                .ok_or_else(|| Error::Input(format!("eigenfunction {k} is not in basis.csv")))?;
            Ok(&basis.rows[r][first..])
        };
        let values: Vec<f64> = row(i)?.iter().zip(row(j)?).map(|(a, b)| a * b).collect();
        let (rows, cols) = match self.grid_shape() {
            Some((r, c)) if r * c == values.len() => (r, c),
            _ => (1, values.len()),
        };
        let block_contrast = if rows >= 2 && cols >= 2 {
            block_contrast(&values, rows).ok()
        } else {
            None
        };
        let csv = self.path.join(format!("hadamard_{i}_{j}.csv"));
        let svg = self.path.join(format!("hadamard_{i}_{j}.svg"));
        write_text(&csv, &vector_to_csv(&values))?;
        write_text(&svg, &heat_map(&values, rows, cols, &format!("phi_{i} * phi_{j}")))?;
        Ok(HadamardExport {
            values,
            shape: (rows, cols),
            block_contrast,
            csv,
            svg,
        })
    }
}

#[derive(Debug, Clone)]
pub struct HadamardExport {
    pub values: Vec<f64>,
    pub shape: (usize, usize),
    /// Between-row over within-row variance when the grid has rows.
    pub block_contrast: Option<f64>,
    pub csv: PathBuf,
    pub svg: PathBuf,
}
