//! Dataset directories: one `sample_NNNN` subdirectory per light field,
//! holding `lightfield.lf4` and/or the PNG view layout, plus a
//! `dataset.json` manifest.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use celf_core::synth::{choose_disparities, synth_lightfield_with};
use celf_core::LightField;
use serde_json::json;

use crate::formats::{read_lightfield, write_atomic, write_lightfield};
use crate::pngio::{read_lightfield_dir, write_lightfield_dir, BitDepth};

pub const LF_FILE: &str = "lightfield.lf4";
pub const MANIFEST: &str = "dataset.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleFormat {
    Lf4,
    Png,
    Both,
}

#[derive(Debug, Clone)]
pub struct SynthOptions {
    pub count: usize,
    pub width: usize,
    pub height: usize,
    /// Sample `i` gets `1 + i % max_layers` layers.
    pub max_layers: usize,
    pub seed: u64,
    pub format: SampleFormat,
    pub depth: BitDepth,
}

/// Seed of sample `i` in a dataset generated from `seed`.
pub fn sample_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i as u64)
}

pub fn sample_dir_name(i: usize) -> String {
    format!("sample_{i:04}")
}

/// Writes a synthetic dataset; returns the disparities of every sample.
pub fn make_synthetic(out: &Path, opts: &SynthOptions) -> Result<Vec<Vec<i32>>> {
    ensure!(opts.count > 0, "count must be positive");
    ensure!(opts.width > 0 && opts.height > 0, "width and height must be positive");
    ensure!((1..=7).contains(&opts.max_layers), "max layers must be in 1..=7");
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut all = Vec::with_capacity(opts.count);
    let mut samples = Vec::with_capacity(opts.count);
    for i in 0..opts.count {
        let seed = sample_seed(opts.seed, i);
        let disparities = choose_disparities(seed, 1 + i % opts.max_layers)?;
        let lf = synth_lightfield_with(seed, opts.width, opts.height, &disparities)?;
        let dir = out.join(sample_dir_name(i));
        fs::create_dir_all(&dir)?;
        if opts.format != SampleFormat::Png {
            write_lightfield(&dir.join(LF_FILE), &lf)?;
        }
        if opts.format != SampleFormat::Lf4 {
            write_lightfield_dir(&dir, &lf, opts.depth)?;
        }
        samples.push(json!({ "name": sample_dir_name(i), "seed": seed, "disparities": disparities }));
        all.push(disparities);
    }
    let manifest = json!({
        "count": opts.count,
        "width": opts.width,
        "height": opts.height,
        "seed": opts.seed,
        "samples": samples,
    });
    write_atomic(&out.join(MANIFEST), serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    Ok(all)
}

/// Reads a light field from a `.lf4` file, a PNG view directory, or a
/// sample directory containing `lightfield.lf4`.
pub fn load_lightfield(path: &Path) -> Result<LightField> {
    if path.is_dir() {
        let lf4 = path.join(LF_FILE);
        if lf4.is_file() {
            return read_lightfield(&lf4).with_context(|| format!("reading {}", lf4.display()));
        }
        return read_lightfield_dir(path);
    }
    read_lightfield(path).with_context(|| format!("reading {}", path.display()))
}

/// Sample paths of a dataset directory in name order: subdirectories that
/// hold a light field, then loose `.lf4` files.
pub fn sample_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("reading dataset {}", dir.display()))? {
        let path = entry?.path();
        let is_sample = if path.is_dir() {
            path.join(LF_FILE).is_file() || path.join("meta.json").is_file()
        } else {
            path.extension().is_some_and(|e| e == "lf4")
        };
        if is_sample {
            paths.push(path);
        }
    }
    paths.sort();
    if paths.is_empty() {
        bail!("no light fields found in {}", dir.display());
    }
    Ok(paths)
}

pub fn load_dataset(dir: &Path) -> Result<Vec<LightField>> {
    sample_paths(dir)?.iter().map(|p| load_lightfield(p)).collect()
}
