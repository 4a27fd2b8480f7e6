//! Dataset and result files.
//!
//! Datasets are CSV with a header row, target first: `y,x_1,...,x_K`. Floats
//! are written in Rust's shortest round-trip form, so save/load is
//! bit-exact. A JSON manifest sidecar (same stem, `.manifest.json`) records
//! the generator, seed, and ground truth when present.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::model::FitResult;

/// Parameters a synthetic dataset was drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Toy { pairs: usize, noise_variance: f64 },
    Uniform { k: usize, multiplier: usize, noise_variance: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub n: usize,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_beta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_irrelevant: Option<Vec<usize>>,
    pub library_version: String,
    pub git_revision: String,
}

impl DatasetManifest {
    pub fn for_dataset(data: &Dataset, seed: Option<u64>, generator: Option<GeneratorSpec>) -> Self {
        Self {
            n: data.n(),
            k: data.k(),
            seed,
            generator,
            true_beta: data.true_beta().map(|b| b.iter().copied().collect()),
            true_irrelevant: data.true_irrelevant().map(|s| s.iter().copied().collect()),
            library_version: crate::version().to_string(),
            git_revision: crate::git_revision().to_string(),
        }
    }
}

/// Path of the manifest sidecar for a dataset file.
pub fn manifest_path(dataset_path: &Path) -> PathBuf {
    dataset_path.with_extension("manifest.json")
}

/// Write the dataset CSV and its manifest sidecar.
pub fn save_dataset(data: &Dataset, path: &Path, seed: Option<u64>, generator: Option<GeneratorSpec>) -> Result<()> {
    save_dataset_csv(data, path)?;
    let manifest = DatasetManifest::for_dataset(data, seed, generator);
    let file = File::create(manifest_path(path))?;
    serde_json::to_writer_pretty(BufWriter::new(file), &manifest)?;
    Ok(())
}

pub fn save_dataset_csv(data: &Dataset, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "y")?;
    for j in 1..=data.k() {
        write!(w, ",x_{j}")?;
    }
    writeln!(w)?;
    for row in 0..data.n() {
        write!(w, "{}", data.y()[row])?;
        for col in 0..data.k() {
            write!(w, ",{}", data.x()[(row, col)])?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Load a dataset CSV, attaching ground truth from the manifest sidecar when
/// one exists.
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let parse_err = |message: String| Error::Parse { path: path.display().to_string(), message };
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| parse_err("empty file".into()))??;
    let columns: Vec<&str> = header.trim().split(',').collect();
    if columns.first() != Some(&"y") || columns.len() < 2 {
        return Err(parse_err(format!("expected header starting with 'y,x_1', got '{header}'")));
    }
    let k = columns.len() - 1;

    let mut y = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut values = Vec::with_capacity(k + 1);
        for field in line.trim().split(',') {
            values.push(field.trim().parse::<f64>().map_err(|e| {
                parse_err(format!("line {}: bad float '{field}': {e}", lineno + 2))
            })?);
        }
        if values.len() != k + 1 {
            return Err(parse_err(format!(
                "line {}: expected {} fields, got {}",
                lineno + 2,
                k + 1,
                values.len()
            )));
        }
        y.push(values[0]);
        rows.push(values[1..].to_vec());
    }
    let n = y.len();
    let mut x = DMatrix::zeros(n, k);
    for (r, row) in rows.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            x[(r, c)] = v;
        }
    }
    let mut data = Dataset::new(x, DVector::from_vec(y))?;

    let mpath = manifest_path(path);
    if mpath.exists() {
        let manifest: DatasetManifest = serde_json::from_reader(BufReader::new(File::open(&mpath)?))?;
        if let (Some(beta), Some(irrelevant)) = (manifest.true_beta, manifest.true_irrelevant) {
            data = data.with_truth(
                DVector::from_vec(beta),
                irrelevant.into_iter().collect::<BTreeSet<usize>>(),
            )?;
        }
    }
    Ok(data)
}

/// Per-iteration trajectory of a fit: objective, timing, and the expanded
/// parameter snapshots, one column pair per original feature.
pub fn save_history_csv(result: &FitResult, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "iteration,objective,elapsed_seconds,active_count")?;
    for j in 0..result.k_original {
        write!(w, ",beta_{j}")?;
    }
    for j in 0..result.k_original {
        write!(w, ",pi_{j}")?;
    }
    writeln!(w)?;
    for rec in &result.history {
        write!(
            w,
            "{},{},{},{}",
            rec.iteration, rec.objective, rec.elapsed_seconds, rec.active_count
        )?;
        for v in &rec.beta {
            write!(w, ",{v}")?;
        }
        for v in &rec.pi {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Empty string for absent values, shortest round-trip form otherwise.
pub(crate) fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}
