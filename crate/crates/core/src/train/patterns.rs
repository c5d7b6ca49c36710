use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ensure_dim, Error, Result};
use crate::lightfield::{AperturePattern, VIEWS};
use crate::nn::sigmoid;

/// Trainable pre-sigmoid aperture codes, one 8x8 grid per pattern.
///
/// A grid flagged `frozen_black` always realizes the all-zero pattern and is
/// never handed to the optimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternLogits {
    logits: Vec<[f64; VIEWS]>,
    frozen_black: Vec<bool>,
}

impl PatternLogits {
    /// Uniform `[-1, 1)` logits; with `black_first` the first grid is frozen black.
    pub fn random(patterns: usize, black_first: bool, seed: u64) -> Result<Self> {
        if patterns < 2 {
            return Err(Error::InvalidArgument("at least two patterns are required"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0a9e_47c0);
        let logits = (0..patterns)
            .map(|_| core::array::from_fn(|_| rng.random_range(-1.0..1.0)))
            .collect();
        let frozen_black = (0..patterns).map(|n| black_first && n == 0).collect();
        Ok(Self {
            logits,
            frozen_black,
        })
    }

    pub fn from_parts(logits: Vec<[f64; VIEWS]>, frozen_black: Vec<bool>) -> Result<Self> {
        ensure_dim("frozen flag count", logits.len(), frozen_black.len())?;
        if logits.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            logits,
            frozen_black,
        })
    }

    pub fn len(&self) -> usize {
        self.logits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.logits.is_empty()
    }

    pub fn logits(&self) -> &[[f64; VIEWS]] {
        &self.logits
    }

    pub fn is_frozen(&self, n: usize) -> bool {
        self.frozen_black[n]
    }

    /// Indices of the grids the optimizer may update.
    pub fn trainable(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.logits.len()).filter(|&n| !self.frozen_black[n])
    }

    /// Mutable access to the non-frozen grids, in index order.
    pub(crate) fn trainable_grids_mut(&mut self) -> impl Iterator<Item = &mut [f64; VIEWS]> {
        self.logits
            .iter_mut()
            .zip(&self.frozen_black)
            .filter(|(_, &frozen)| !frozen)
            .map(|(grid, _)| grid)
    }
}

/// `a = sigmoid(s * logits)` per grid; frozen grids give the black pattern.
pub fn patterns_from_logits(logits: &PatternLogits, s: f64) -> Result<Vec<AperturePattern>> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidArgument("scale s must be positive and finite"));
    }
    logits
        .logits
        .iter()
        .zip(&logits.frozen_black)
        .map(|(grid, &frozen)| {
            if frozen {
                Ok(AperturePattern::black())
            } else {
                AperturePattern::new(grid.map(|l| sigmoid(s * l)))
            }
        })
        .collect()
}

/// Thresholds at 0.5 (ties go to 1).
pub fn binarize_patterns(patterns: &[AperturePattern]) -> Vec<AperturePattern> {
    patterns
        .iter()
        .map(|p| {
            AperturePattern::new(p.values().map(|a| if a >= 0.5 { 1.0 } else { 0.0 }))
                .expect("binary values are valid")
        })
        .collect()
}
