use alloc::vec::Vec;

use super::tensor::Tensor;
use crate::error::{ensure_dim, Result};

/// Mean squared error and its gradient `2 (pred - target) / numel`.
pub fn mse_loss(pred: &Tensor, target: &Tensor) -> Result<(f64, Tensor)> {
    ensure_dim("mse element count", target.numel(), pred.numel())?;
    if pred.shape() != target.shape() {
        return Err(crate::error::Error::InvalidArgument("mse shapes differ"));
    }
    let n = pred.numel() as f64;
    let diff: Vec<f64> = pred
        .data()
        .iter()
        .zip(target.data())
        .map(|(p, t)| p - t)
        .collect();
    let loss = diff.iter().map(|d| d * d).sum::<f64>() / n;
    let grad = diff.into_iter().map(|d| 2.0 * d / n).collect();
    Ok((loss, Tensor::new(pred.shape(), grad)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn equal_inputs_have_zero_loss() {
        let t = Tensor::new(&[2, 3], (0..6).map(f64::from).collect()).unwrap();
        let (loss, grad) = mse_loss(&t, &t).unwrap();
        assert_eq!(loss, 0.0);
        assert!(grad.data().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn uniform_offset() {
        let target = Tensor::new(&[4], vec![0.2, 0.4, 0.6, 0.8]).unwrap();
        let pred = Tensor::new(&[4], vec![0.3, 0.5, 0.7, 0.9]).unwrap();
        let (loss, grad) = mse_loss(&pred, &target).unwrap();
        assert!((loss - 0.01).abs() < 1e-15);
        assert!(grad.data().iter().all(|g| (g - 0.05).abs() < 1e-15));
    }

    #[test]
    fn shape_mismatch() {
        assert!(mse_loss(&Tensor::zeros(&[2, 3]), &Tensor::zeros(&[3, 2])).is_err());
        assert!(mse_loss(&Tensor::zeros(&[6]), &Tensor::zeros(&[5])).is_err());
    }
}
