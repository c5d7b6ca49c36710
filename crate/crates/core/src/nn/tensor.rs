use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure_dim, Error, Result};

/// Dense row-major tensor of up to four axes (`batch, channel, height, width`)
/// with an optional gradient buffer of the same shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
    grad: Option<Vec<f64>>,
}

impl Tensor {
    pub fn new(shape: &[usize], data: Vec<f64>) -> Result<Self> {
        if shape.is_empty() || shape.len() > 4 {
            return Err(Error::InvalidArgument("tensors have one to four axes"));
        }
        ensure_dim("tensor buffer length", shape.iter().product(), data.len())?;
        Ok(Self {
            shape: shape.to_vec(),
            data,
            grad: None,
        })
    }

    pub fn zeros(shape: &[usize]) -> Self {
        let n = shape.iter().product();
        Self {
            shape: shape.to_vec(),
            data: vec![0.0; n],
            grad: None,
        }
    }

    /// Attaches a zeroed gradient buffer.
    pub fn requires_grad(mut self) -> Self {
        self.grad = Some(vec![0.0; self.data.len()]);
        self
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn grad(&self) -> Option<&[f64]> {
        self.grad.as_deref()
    }

    pub fn grad_mut(&mut self) -> Option<&mut [f64]> {
        self.grad.as_deref_mut()
    }

    /// Values and gradient borrowed together, for optimizer steps.
    pub fn data_and_grad(&mut self) -> Option<(&mut [f64], &[f64])> {
        let grad = self.grad.as_deref()?;
        Some((&mut self.data, grad))
    }

    pub fn zero_grad(&mut self) {
        if let Some(g) = &mut self.grad {
            g.iter_mut().for_each(|g| *g = 0.0);
        }
    }

    pub fn accumulate_grad(&mut self, delta: &[f64]) -> Result<()> {
        let g = self
            .grad
            .as_mut()
            .ok_or(Error::InvalidArgument("tensor has no gradient buffer"))?;
        ensure_dim("gradient length", g.len(), delta.len())?;
        g.iter_mut().zip(delta).for_each(|(g, d)| *g += d);
        Ok(())
    }

    pub fn reshape(mut self, shape: &[usize]) -> Result<Self> {
        ensure_dim("reshape element count", self.data.len(), shape.iter().product())?;
        self.shape = shape.to_vec();
        Ok(self)
    }
}

/// Interprets a 3- or 4-axis tensor as `(batch, channels, height, width)`.
pub(crate) fn nchw(t: &Tensor) -> Result<(usize, usize, usize, usize)> {
    match *t.shape() {
        [c, h, w] => Ok((1, c, h, w)),
        [b, c, h, w] => Ok((b, c, h, w)),
        _ => Err(Error::InvalidArgument("expected a (C,H,W) or (B,C,H,W) tensor")),
    }
}
