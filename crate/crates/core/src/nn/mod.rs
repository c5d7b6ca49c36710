//! Dense tensors, a same-padded convolutional reconstruction network with
//! explicit reverse-mode passes, mean-squared-error loss and Adam.

mod adam;
mod conv;
mod loss;
mod net;
mod tensor;

pub use adam::{Adam, AdamConfig};
pub use conv::{conv2d_backward, conv2d_forward, ConvGrads, KERNEL};
pub use loss::mse_loss;
pub use net::{default_widths, recnet_forward, sigmoid, Conv2d, Layer, ReconNet, MAX_CONV_LAYERS};
pub use tensor::Tensor;
