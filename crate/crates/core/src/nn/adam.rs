use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure_dim, Error, Result};

/// Adam hyperparameters; defaults are the usual framework defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Bias-corrected Adam over an ordered list of parameter buffers.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    pub config: AdamConfig,
    step: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl Adam {
    /// One moment buffer per parameter group of the given length.
    pub fn new(config: AdamConfig, sizes: &[usize]) -> Self {
        Self {
            config,
            step: 0,
            m: sizes.iter().map(|&n| vec![0.0; n]).collect(),
            v: sizes.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    /// Number of updates applied so far.
    pub fn steps(&self) -> u64 {
        self.step
    }

    pub fn first_moments(&self) -> &[Vec<f64>] {
        &self.m
    }

    pub fn second_moments(&self) -> &[Vec<f64>] {
        &self.v
    }

    /// Applies one update to every `(params, grads)` group, in the order the
    /// optimizer was built with.
    pub fn step<'a>(
        &mut self,
        groups: impl IntoIterator<Item = (&'a mut [f64], &'a [f64])>,
    ) -> Result<()> {
        let groups: Vec<_> = groups.into_iter().collect();
        ensure_dim("parameter group count", self.m.len(), groups.len())?;
        for ((params, grads), m) in groups.iter().zip(&self.m) {
            ensure_dim("parameter group length", m.len(), params.len())?;
            ensure_dim("gradient length", params.len(), grads.len())?;
        }
        if groups.iter().any(|(_, g)| g.iter().any(|g| !g.is_finite())) {
            return Err(Error::NonFinite);
        }

        self.step += 1;
        let AdamConfig {
            lr,
            beta1,
            beta2,
            eps,
        } = self.config;
        let t = self.step as f64;
        let bias1 = 1.0 - libm::pow(beta1, t);
        let bias2 = 1.0 - libm::pow(beta2, t);
        let step_size = lr / bias1;
        let bias2_sqrt = libm::sqrt(bias2);
        for ((params, grads), (m, v)) in groups.into_iter().zip(self.m.iter_mut().zip(&mut self.v)) {
            for (((p, &g), m), v) in params.iter_mut().zip(grads).zip(m.iter_mut()).zip(v.iter_mut()) {
                *m = beta1 * *m + (1.0 - beta1) * g;
                *v = beta2 * *v + (1.0 - beta2) * g * g;
                let denom = libm::sqrt(*v) / bias2_sqrt + eps;
                *p -= step_size * *m / denom;
            }
        }
        Ok(())
    }
}
