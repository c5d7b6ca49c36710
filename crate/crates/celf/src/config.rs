//! Flat `key = value` configuration files. `#` starts a comment.
//!
//! Recognized keys: `N`, `epochs`, `batch_size`, `mode`, `tau`, `epsilon`,
//! `sigma_w`, `sigma_z`, `seed`, `lr`, plus `s_init`, `s_growth`,
//! `net_width`, `net_depth`, `net_widths` (comma list) and `noiseless`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use celf_core::train::{TrainConfig, TrainMode};

const KEYS: [&str; 16] = [
    "N", "epochs", "batch_size", "mode", "tau", "epsilon", "sigma_w", "sigma_z", "seed", "lr", "s_init",
    "s_growth", "net_width", "net_depth", "net_widths", "noiseless",
];

/// Parsed key/value pairs, in key order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key = value", no + 1))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                bail!("line {}: unknown key `{key}`", no + 1);
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                bail!("line {}: duplicate key `{key}`", no + 1);
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|e| anyhow!("bad value `{v}` for `{key}`: {e}")))
            .transpose()
    }

    /// Overwrites the fields of `cfg` named in this file.
    pub fn apply(&self, cfg: &mut TrainConfig) -> Result<()> {
        macro_rules! take {
            ($key:literal, $field:expr) => {
                if let Some(v) = self.parsed($key)? {
                    $field = v;
                }
            };
        }
        take!("N", cfg.patterns);
        take!("epochs", cfg.epochs);
        take!("batch_size", cfg.batch_size);
        take!("tau", cfg.sensor.tau);
        take!("epsilon", cfg.sensor.epsilon);
        take!("sigma_w", cfg.sensor.sigma_w);
        take!("sigma_z", cfg.sensor.sigma_z);
        take!("lr", cfg.adam.lr);
        take!("s_init", cfg.s_init);
        take!("s_growth", cfg.s_growth);
        take!("net_width", cfg.net_width);
        take!("net_depth", cfg.net_depth);
        take!("noiseless", cfg.sensor.noiseless);
        if let Some(seed) = self.parsed::<u64>("seed")? {
            cfg.seed = seed;
            cfg.sensor.seed = seed;
        }
        if let Some(mode) = self.get("mode") {
            cfg.mode = mode.parse::<TrainMode>().map_err(|_| anyhow!("unknown mode `{mode}`"))?;
        }
        if let Some(widths) = self.get("net_widths") {
            cfg.net_widths = Some(parse_widths(widths)?);
        }
        Ok(())
    }

    /// A file that reproduces `cfg` when applied to the defaults.
    pub fn from_train_config(cfg: &TrainConfig) -> Self {
        let mut f = Self::default();
        f.set("N", cfg.patterns);
        f.set("epochs", cfg.epochs);
        f.set("batch_size", cfg.batch_size);
        f.set("mode", cfg.mode);
        f.set("tau", cfg.sensor.tau);
        f.set("epsilon", cfg.sensor.epsilon);
        f.set("sigma_w", cfg.sensor.sigma_w);
        f.set("sigma_z", cfg.sensor.sigma_z);
        f.set("seed", cfg.seed);
        f.set("lr", cfg.adam.lr);
        f.set("s_init", cfg.s_init);
        f.set("s_growth", cfg.s_growth);
        f.set("net_width", cfg.net_width);
        f.set("net_depth", cfg.net_depth);
        f.set("noiseless", cfg.sensor.noiseless);
        if let Some(w) = &cfg.net_widths {
            f.set("net_widths", w.iter().map(usize::to_string).collect::<Vec<_>>().join(","));
        }
        f
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

pub fn parse_widths(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|w| w.trim().parse::<usize>().with_context(|| format!("bad network width `{w}`")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_applies() {
        let f = ConfigFile::parse("# run\nN = 6\nmode = baseline+RA  # trailing\nseed=9\nnet_widths = 5, 8, 64\n").unwrap();
        let mut cfg = TrainConfig::default();
        f.apply(&mut cfg).unwrap();
        assert_eq!(cfg.patterns, 6);
        assert_eq!(cfg.mode, TrainMode::BaselineRa);
        assert_eq!((cfg.seed, cfg.sensor.seed), (9, 9));
        assert_eq!(cfg.net_widths, Some(vec![5, 8, 64]));
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(ConfigFile::parse("N 4").is_err());
        assert!(ConfigFile::parse("colour = red").is_err());
        assert!(ConfigFile::parse("N = 4\nN = 5").is_err());
        let f = ConfigFile::parse("epochs = many").unwrap();
        assert!(f.apply(&mut TrainConfig::default()).is_err());
    }

    #[test]
    fn render_round_trips() {
        let cfg = TrainConfig {
            net_widths: Some(vec![3, 16, 64]),
            epochs: 7,
            ..TrainConfig::default()
        };
        let text = ConfigFile::from_train_config(&cfg).render();
        let mut back = TrainConfig::default();
        ConfigFile::parse(&text).unwrap().apply(&mut back).unwrap();
        assert_eq!(back, cfg);
    }
}
