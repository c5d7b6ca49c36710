//! 3x3, stride-1, zero-padded ("same") 2-D cross-correlation.
//!
//! Each kernel tap is applied as a shifted row-wise multiply-add, so every
//! inner loop runs over a contiguous image row.

use alloc::vec;

use super::tensor::{nchw, Tensor};
use crate::error::{ensure_dim, Error, Result};

pub const KERNEL: usize = 3;
const TAPS: usize = KERNEL * KERNEL;

/// Valid output columns `[x0, x1)` and input column offset for tap column `kx`.
#[inline]
fn span(width: usize, k: usize) -> (usize, usize) {
    // input column = x + k - 1
    let x0 = usize::from(k == 0);
    let x1 = if k == KERNEL - 1 { width - 1 } else { width };
    (x0, x1.max(x0))
}

fn check(x: &Tensor, weight: &Tensor, bias: &Tensor) -> Result<(usize, usize, usize, usize, usize)> {
    let (b, c_in, h, w) = nchw(x)?;
    let &[c_out, wc_in, kh, kw] = weight.shape() else {
        return Err(Error::InvalidArgument("conv weight must be (C_out, C_in, 3, 3)"));
    };
    if kh != KERNEL || kw != KERNEL {
        return Err(Error::InvalidArgument("only 3x3 kernels are supported"));
    }
    ensure_dim("conv input channels", wc_in, c_in)?;
    ensure_dim("conv bias length", c_out, bias.numel())?;
    Ok((b, c_in, c_out, h, w))
}

/// Same-padded cross-correlation plus bias. Accepts `(C,H,W)` or `(B,C,H,W)`
/// and preserves the rank of the input.
pub fn conv2d_forward(x: &Tensor, weight: &Tensor, bias: &Tensor) -> Result<Tensor> {
    let (batch, c_in, c_out, h, w) = check(x, weight, bias)?;
    let plane = h * w;
    let mut out = vec![0.0; batch * c_out * plane];
    let (xs, ws) = (x.data(), weight.data());
    for n in 0..batch {
        let input = &xs[n * c_in * plane..(n + 1) * c_in * plane];
        for co in 0..c_out {
            let dst = &mut out[(n * c_out + co) * plane..(n * c_out + co + 1) * plane];
            dst.iter_mut().for_each(|v| *v = bias.data()[co]);
            for ci in 0..c_in {
                let src = &input[ci * plane..(ci + 1) * plane];
                let taps = &ws[(co * c_in + ci) * TAPS..(co * c_in + ci + 1) * TAPS];
                for ky in 0..KERNEL {
                    let (y0, y1) = span(h, ky);
                    for kx in 0..KERNEL {
                        let tap = taps[ky * KERNEL + kx];
                        if tap == 0.0 {
                            continue;
                        }
                        let (x0, x1) = span(w, kx);
                        for y in y0..y1 {
                            let sy = y + ky - 1;
                            let d = &mut dst[y * w + x0..y * w + x1];
                            let s = &src[sy * w + x0 + kx - 1..sy * w + x1 + kx - 1];
                            for (d, s) in d.iter_mut().zip(s) {
                                *d += tap * s;
                            }
                        }
                    }
                }
            }
        }
    }
    let shape = if x.shape().len() == 3 {
        alloc::vec![c_out, h, w]
    } else {
        alloc::vec![batch, c_out, h, w]
    };
    Tensor::new(&shape, out)
}

/// Gradients of a same-padded convolution.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvGrads {
    pub input: Tensor,
    pub weight: Tensor,
    pub bias: Tensor,
}

/// Reverse-mode pass for [`conv2d_forward`] given the upstream gradient.
pub fn conv2d_backward(x: &Tensor, weight: &Tensor, grad_out: &Tensor) -> Result<ConvGrads> {
    let c_out = weight.shape()[0];
    let (batch, c_in, c_out_check, h, w) = check(x, weight, &Tensor::zeros(&[c_out]))?;
    debug_assert_eq!(c_out, c_out_check);
    let (gb, gc, gh, gw) = nchw(grad_out)?;
    ensure_dim("grad batch", batch, gb)?;
    ensure_dim("grad channels", c_out, gc)?;
    ensure_dim("grad height", h, gh)?;
    ensure_dim("grad width", w, gw)?;

    let plane = h * w;
    let mut gx = vec![0.0; batch * c_in * plane];
    let mut gw_buf = vec![0.0; weight.numel()];
    let mut gbias = vec![0.0; c_out];
    let (xs, ws, gs) = (x.data(), weight.data(), grad_out.data());
    for n in 0..batch {
        let input = &xs[n * c_in * plane..(n + 1) * c_in * plane];
        let gin = &mut gx[n * c_in * plane..(n + 1) * c_in * plane];
        for co in 0..c_out {
            let g = &gs[(n * c_out + co) * plane..(n * c_out + co + 1) * plane];
            gbias[co] += g.iter().sum::<f64>();
            for ci in 0..c_in {
                let src = &input[ci * plane..(ci + 1) * plane];
                let dsrc = &mut gin[ci * plane..(ci + 1) * plane];
                let base = (co * c_in + ci) * TAPS;
                for ky in 0..KERNEL {
                    let (y0, y1) = span(h, ky);
                    for kx in 0..KERNEL {
                        let (x0, x1) = span(w, kx);
                        let tap = ws[base + ky * KERNEL + kx];
                        let mut acc = 0.0;
                        for y in y0..y1 {
                            let sy = y + ky - 1;
                            let go = &g[y * w + x0..y * w + x1];
                            let lo = sy * w + x0 + kx - 1;
                            let hi = sy * w + x1 + kx - 1;
                            let s = &src[lo..hi];
                            let ds = &mut dsrc[lo..hi];
                            for ((ds, s), go) in ds.iter_mut().zip(s).zip(go) {
                                acc += go * s;
                                *ds += tap * go;
                            }
                        }
                        gw_buf[base + ky * KERNEL + kx] += acc;
                    }
                }
            }
        }
    }
    Ok(ConvGrads {
        input: Tensor::new(x.shape(), gx)?,
        weight: Tensor::new(weight.shape(), gw_buf)?,
        bias: Tensor::new(&[c_out], gbias)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_kernel() {
        let x = Tensor::new(&[1, 3, 4], (0..12).map(|v| v as f64).collect()).unwrap();
        let mut k = Tensor::zeros(&[1, 1, 3, 3]);
        k.data_mut()[4] = 1.0;
        let y = conv2d_forward(&x, &k, &Tensor::zeros(&[1])).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn box_kernel_interior_and_corner() {
        let x = Tensor::new(&[1, 3, 3], vec![1.0; 9]).unwrap();
        let k = Tensor::new(&[1, 1, 3, 3], vec![1.0; 9]).unwrap();
        let y = conv2d_forward(&x, &k, &Tensor::zeros(&[1])).unwrap();
        assert_eq!(y.data()[4], 9.0);
        assert_eq!(y.data()[0], 4.0);
        assert_eq!(y.data()[1], 6.0);
    }

    #[test]
    fn bias_is_added() {
        let x = Tensor::zeros(&[2, 2, 2]);
        let k = Tensor::zeros(&[3, 2, 3, 3]);
        let b = Tensor::new(&[3], vec![1.0, -2.0, 0.5]).unwrap();
        let y = conv2d_forward(&x, &k, &b).unwrap();
        assert_eq!(y.shape(), &[3, 2, 2]);
        assert!(y.data()[..4].iter().all(|&v| v == 1.0));
        assert!(y.data()[8..].iter().all(|&v| v == 0.5));
    }

    #[test]
    fn shape_errors() {
        let x = Tensor::zeros(&[2, 4, 4]);
        assert!(conv2d_forward(&x, &Tensor::zeros(&[1, 3, 3, 3]), &Tensor::zeros(&[1])).is_err());
        assert!(conv2d_forward(&x, &Tensor::zeros(&[1, 2, 5, 5]), &Tensor::zeros(&[1])).is_err());
        assert!(conv2d_forward(&x, &Tensor::zeros(&[1, 2, 3, 3]), &Tensor::zeros(&[2])).is_err());
        assert!(conv2d_forward(&Tensor::zeros(&[4]), &Tensor::zeros(&[1, 1, 3, 3]), &Tensor::zeros(&[1])).is_err());
    }

    #[test]
    fn one_pixel_image() {
        let x = Tensor::new(&[1, 1, 1], vec![2.0]).unwrap();
        let k = Tensor::new(&[1, 1, 3, 3], (1..=9).map(f64::from).collect()).unwrap();
        let y = conv2d_forward(&x, &k, &Tensor::zeros(&[1])).unwrap();
        assert_eq!(y.data(), &[10.0]);
    }
}
