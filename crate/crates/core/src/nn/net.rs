use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::conv::{conv2d_backward, conv2d_forward, KERNEL};
use super::tensor::Tensor;
use crate::error::{ensure_dim, Error, Result};
use crate::lightfield::VIEWS;

/// Largest supported number of convolution layers.
pub const MAX_CONV_LAYERS: usize = 23;
const INPUT_GAIN: f64 = 0.125;
const OUTPUT_GAIN: f64 = 0.1;

fn scale_weights(conv: &mut Conv2d, gain: f64) {
    conv.weight.data_mut().iter_mut().for_each(|w| *w *= gain);
}

/// A 3x3 same-padded convolution with trainable weights and bias.
#[derive(Debug, Clone, PartialEq)]
pub struct Conv2d {
    pub weight: Tensor,
    pub bias: Tensor,
}

impl Conv2d {
    /// He-uniform (fan-in) weights, zero bias.
    pub fn he_uniform(c_in: usize, c_out: usize, rng: &mut impl Rng) -> Self {
        let fan_in = (c_in * KERNEL * KERNEL) as f64;
        let bound = libm::sqrt(6.0 / fan_in);
        let weights = (0..c_out * c_in * KERNEL * KERNEL)
            .map(|_| rng.random_range(-bound..bound))
            .collect();
        Self::from_parts(c_in, c_out, weights, vec![0.0; c_out]).expect("sizes are consistent")
    }

    pub fn from_parts(c_in: usize, c_out: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        Ok(Self {
            weight: Tensor::new(&[c_out, c_in, KERNEL, KERNEL], weights)?.requires_grad(),
            bias: Tensor::new(&[c_out], bias)?.requires_grad(),
        })
    }

    pub fn in_channels(&self) -> usize {
        self.weight.shape()[1]
    }

    pub fn out_channels(&self) -> usize {
        self.weight.shape()[0]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Layer {
    Conv(Conv2d),
    Relu,
    Sigmoid,
}

/// Reconstruction network: convolutions separated by ReLU, sigmoid output.
///
/// Maps stacked event images `(N-1, H, W)` to the 64 views `(64, H, W)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconNet {
    layers: Vec<Layer>,
    /// `activations[i]` is the input of `layers[i]`; the last entry is the output.
    activations: Vec<Tensor>,
}

impl ReconNet {
    /// Builds a network whose convolution widths are `widths`
    /// (`widths[0]` input channels, last entry must be 64).
    ///
    /// Weights are He-uniform, with the first layer scaled by 1/8 and the
    /// last by 1/10; biases are zero.
    pub fn new(widths: &[usize], seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::validate_widths(widths)?;
        let mut convs: Vec<Conv2d> = widths
            .windows(2)
            .map(|w| Conv2d::he_uniform(w[0], w[1], &mut rng))
            .collect();
        // Event counts span roughly +-15, and a saturated sigmoid stalls early training.
        scale_weights(&mut convs[0], INPUT_GAIN);
        scale_weights(convs.last_mut().expect("at least one layer"), OUTPUT_GAIN);
        Self::from_convs(convs)
    }

    /// The default desk-scale layout: eight convolutions,
    /// `[N-1, 32, 32, 32, 32, 32, 32, 64, 64]`.
    pub fn desk_scale(patterns: usize, seed: u64) -> Result<Self> {
        Self::new(&default_widths(patterns, 32, 8)?, seed)
    }

    fn validate_widths(widths: &[usize]) -> Result<()> {
        if widths.len() < 2 || widths.len() > MAX_CONV_LAYERS + 1 {
            return Err(Error::InvalidArgument("network needs 1..=23 convolution layers"));
        }
        if widths.contains(&0) {
            return Err(Error::InvalidArgument("channel widths must be positive"));
        }
        ensure_dim("output channels", VIEWS, *widths.last().unwrap())
    }

    /// Assembles convolutions with ReLU between them and a final sigmoid.
    pub fn from_convs(convs: Vec<Conv2d>) -> Result<Self> {
        let mut widths = Vec::with_capacity(convs.len() + 1);
        if let Some(first) = convs.first() {
            widths.push(first.in_channels());
        }
        for (i, c) in convs.iter().enumerate() {
            if i > 0 {
                ensure_dim("chained channels", widths[i], c.in_channels())?;
            }
            widths.push(c.out_channels());
        }
        Self::validate_widths(&widths)?;
        let count = convs.len();
        let mut layers = Vec::with_capacity(2 * count);
        for (i, conv) in convs.into_iter().enumerate() {
            layers.push(Layer::Conv(conv));
            layers.push(if i + 1 == count {
                Layer::Sigmoid
            } else {
                Layer::Relu
            });
        }
        Ok(Self {
            layers,
            activations: Vec::new(),
        })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn convs(&self) -> impl Iterator<Item = &Conv2d> {
        self.layers.iter().filter_map(|l| match l {
            Layer::Conv(c) => Some(c),
            _ => None,
        })
    }

    pub fn convs_mut(&mut self) -> impl Iterator<Item = &mut Conv2d> {
        self.layers.iter_mut().filter_map(|l| match l {
            Layer::Conv(c) => Some(c),
            _ => None,
        })
    }

    pub fn input_channels(&self) -> usize {
        self.convs().next().map_or(0, Conv2d::in_channels)
    }

    pub fn widths(&self) -> Vec<usize> {
        let mut w = vec![self.input_channels()];
        w.extend(self.convs().map(Conv2d::out_channels));
        w
    }

    pub fn parameter_count(&self) -> usize {
        self.convs().map(|c| c.weight.numel() + c.bias.numel()).sum()
    }

    /// Flat parameter buffer lengths, in the order of [`ReconNet::params_and_grads`].
    pub fn param_sizes(&self) -> Vec<usize> {
        self.convs()
            .flat_map(|c| [c.weight.numel(), c.bias.numel()])
            .collect()
    }

    pub fn params_and_grads(&mut self) -> Vec<(&mut [f64], &[f64])> {
        let mut out = Vec::new();
        for conv in self.convs_mut() {
            out.extend(conv.weight.data_and_grad());
            out.extend(conv.bias.data_and_grad());
        }
        out
    }

    pub fn zero_grad(&mut self) {
        for conv in self.convs_mut() {
            conv.weight.zero_grad();
            conv.bias.zero_grad();
        }
    }

    /// Sets the last convolution's weights and bias to zero, making the
    /// output exactly 0.5 everywhere.
    pub fn zero_output_layer(&mut self) {
        if let Some(conv) = self.convs_mut().last() {
            conv.weight.data_mut().iter_mut().for_each(|w| *w = 0.0);
            conv.bias.data_mut().iter_mut().for_each(|b| *b = 0.0);
        }
    }

    /// Forward pass, caching activations for [`ReconNet::backward`].
    pub fn forward(&mut self, input: &Tensor) -> Result<Tensor> {
        let channels = match *input.shape() {
            [c, _, _] | [_, c, _, _] => c,
            _ => return Err(Error::InvalidArgument("expected a (C,H,W) or (B,C,H,W) tensor")),
        };
        ensure_dim("input channels", self.input_channels(), channels)?;
        self.activations.clear();
        let mut x = input.clone();
        for layer in &self.layers {
            let y = match layer {
                Layer::Conv(c) => conv2d_forward(&x, &c.weight, &c.bias)?,
                Layer::Relu => map(&x, |v| v.max(0.0)),
                Layer::Sigmoid => map(&x, sigmoid),
            };
            self.activations.push(x);
            x = y;
        }
        self.activations.push(x.clone());
        Ok(x)
    }

    /// Forward pass that leaves no cache behind.
    pub fn infer(&mut self, input: &Tensor) -> Result<Tensor> {
        let out = self.forward(input);
        self.activations.clear();
        out
    }

    /// Reverse-mode pass. Parameter gradients are accumulated into each
    /// layer's gradient buffers; the gradient w.r.t. the input is returned.
    /// Consumes the cached activations.
    pub fn backward(&mut self, grad_output: &Tensor) -> Result<Tensor> {
        if self.activations.len() != self.layers.len() + 1 {
            return Err(Error::BackwardBeforeForward);
        }
        ensure_dim(
            "upstream gradient length",
            self.activations.last().unwrap().numel(),
            grad_output.numel(),
        )?;
        let activations = core::mem::take(&mut self.activations);
        let mut grad = grad_output.clone();
        for (i, layer) in self.layers.iter_mut().enumerate().rev() {
            let input = &activations[i];
            grad = match layer {
                Layer::Conv(c) => {
                    let g = conv2d_backward(input, &c.weight, &grad)?;
                    c.weight.accumulate_grad(g.weight.data())?;
                    c.bias.accumulate_grad(g.bias.data())?;
                    g.input
                }
                Layer::Relu => zip_map(&grad, input, |g, x| if x > 0.0 { g } else { 0.0 }),
                Layer::Sigmoid => {
                    let out = &activations[i + 1];
                    zip_map(&grad, out, |g, y| g * y * (1.0 - y))
                }
            };
        }
        Ok(grad)
    }
}

/// `[patterns - 1, width x (depth - 2), 64, 64]`, i.e. `depth` convolutions.
pub fn default_widths(patterns: usize, width: usize, depth: usize) -> Result<Vec<usize>> {
    if patterns < 2 {
        return Err(Error::InvalidArgument("at least two patterns are required"));
    }
    if !(2..=MAX_CONV_LAYERS).contains(&depth) {
        return Err(Error::InvalidArgument("depth must be in 2..=23"));
    }
    let mut widths = vec![patterns - 1];
    widths.extend(core::iter::repeat_n(width, depth - 2));
    widths.extend([VIEWS, VIEWS]);
    Ok(widths)
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

fn map(x: &Tensor, f: impl Fn(f64) -> f64) -> Tensor {
    Tensor::new(x.shape(), x.data().iter().map(|&v| f(v)).collect()).expect("same shape")
}

fn zip_map(a: &Tensor, b: &Tensor, f: impl Fn(f64, f64) -> f64) -> Tensor {
    Tensor::new(
        b.shape(),
        a.data().iter().zip(b.data()).map(|(&a, &b)| f(a, b)).collect(),
    )
    .expect("same shape")
}

/// Runs the network on stacked event images `(N-1, H, W)`; output is `(64, H, W)` in `[0, 1]`.
pub fn recnet_forward(net: &mut ReconNet, events: &Tensor) -> Result<Tensor> {
    net.infer(events)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_layout() {
        let net = ReconNet::desk_scale(4, 0).unwrap();
        assert_eq!(net.widths(), vec![3, 32, 32, 32, 32, 32, 32, 64, 64]);
        assert_eq!(net.convs().count(), 8);
        assert!(matches!(net.layers().last(), Some(Layer::Sigmoid)));
        assert_eq!(
            net.layers().iter().filter(|l| matches!(l, Layer::Relu)).count(),
            7
        );
    }

    #[test]
    fn width_validation() {
        assert!(ReconNet::new(&[3, 8, 63], 0).is_err());
        assert!(ReconNet::new(&[3], 0).is_err());
        assert!(ReconNet::new(&[3, 0, 64], 0).is_err());
        assert!(default_widths(4, 8, 24).is_err());
        assert_eq!(default_widths(4, 8, 23).unwrap().len(), 24);
    }

    #[test]
    fn he_uniform_bounds() {
        let net = ReconNet::new(&[3, 16, 64], 7).unwrap();
        let first = net.convs().next().unwrap();
        let bound = libm::sqrt(6.0 / 27.0);
        assert!(first.weight.data().iter().all(|w| w.abs() <= bound));
        assert!(first.bias.data().iter().all(|&b| b == 0.0));
    }

    #[test]
    fn output_shape_and_range() {
        let mut net = ReconNet::new(&[3, 8, 64], 1).unwrap();
        let x = Tensor::new(&[3, 5, 6], (0..90).map(|i| (i % 7) as f64 - 3.0).collect()).unwrap();
        let y = recnet_forward(&mut net, &x).unwrap();
        assert_eq!(y.shape(), &[64, 5, 6]);
        assert!(y.data().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn zero_final_layer_gives_half() {
        let mut net = ReconNet::new(&[2, 8, 64], 1).unwrap();
        net.zero_output_layer();
        let x = Tensor::new(&[2, 3, 3], (0..18).map(f64::from).collect()).unwrap();
        let y = recnet_forward(&mut net, &x).unwrap();
        assert!(y.data().iter().all(|&v| v == 0.5));
    }

    #[test]
    fn channel_mismatch() {
        let mut net = ReconNet::new(&[3, 64], 1).unwrap();
        assert!(net.forward(&Tensor::zeros(&[2, 4, 4])).is_err());
    }

    #[test]
    fn backward_requires_forward() {
        let mut net = ReconNet::new(&[1, 64], 1).unwrap();
        let g = Tensor::zeros(&[64, 2, 2]);
        assert_eq!(net.backward(&g), Err(Error::BackwardBeforeForward));
        net.forward(&Tensor::zeros(&[1, 2, 2])).unwrap();
        assert!(net.backward(&g).is_ok());
        assert_eq!(net.backward(&g), Err(Error::BackwardBeforeForward));
    }

    #[test]
    fn zero_upstream_gives_zero_grads() {
        let mut net = ReconNet::new(&[2, 4, 64], 3).unwrap();
        let x = Tensor::new(&[2, 3, 3], (0..18).map(|i| f64::from(i) * 0.1).collect()).unwrap();
        net.forward(&x).unwrap();
        let gin = net.backward(&Tensor::zeros(&[64, 3, 3])).unwrap();
        assert!(gin.data().iter().all(|&g| g == 0.0));
        for (_, g) in net.params_and_grads() {
            assert!(g.iter().all(|&g| g == 0.0));
        }
    }

    #[test]
    fn relu_blocks_negative_preactivation() {
        // one 1->1 conv with a negative bias, then ReLU, then 1->64 conv
        let c1 = Conv2d::from_parts(1, 1, vec![0.0; 9], vec![-1.0]).unwrap();
        let c2 = Conv2d::from_parts(1, 64, vec![1.0; 64 * 9], vec![0.0; 64]).unwrap();
        let mut net = ReconNet::from_convs(vec![c1, c2]).unwrap();
        net.forward(&Tensor::new(&[1, 2, 2], vec![1.0; 4]).unwrap()).unwrap();
        net.backward(&Tensor::new(&[64, 2, 2], vec![1.0; 256]).unwrap()).unwrap();
        let first = net.convs().next().unwrap();
        assert!(first.weight.grad().unwrap().iter().all(|&g| g == 0.0));
        assert_eq!(first.bias.grad().unwrap(), &[0.0]);
    }

    #[test]
    fn forward_is_deterministic() {
        let mut net = ReconNet::new(&[3, 8, 64], 5).unwrap();
        let x = Tensor::new(&[3, 4, 4], (0..48).map(|i| f64::from(i % 5)).collect()).unwrap();
        let a = net.infer(&x).unwrap();
        let b = net.infer(&x).unwrap();
        assert_eq!(a.data(), b.data());
    }
}
