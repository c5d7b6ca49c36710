//! Event-image algebra: log-gap prediction, virtual event images, intensity
//! recovery from a black pattern, and a permutation-invariance probe.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure_dim, Error, Result};
use crate::lightfield::{AperturePattern, CodedImage, LightField};
use crate::sensor::{simulate_sequence, EventImage, EventModel, SensorConfig, Transition};

/// Predicted log-intensity gap `ln(I'' + eps) - ln(I' + eps)` for a summed event count.
#[inline]
pub fn log_gap(event_sum: i64, cfg: &SensorConfig) -> f64 {
    cfg.tau * event_sum as f64
}

fn check_index(index: usize, frames: usize) -> Result<()> {
    if index == 0 || index > frames {
        Err(Error::IndexOutOfRange { index, len: frames })
    } else {
        Ok(())
    }
}

fn check_images(images: &[EventImage]) -> Result<(usize, usize)> {
    let first = images
        .first()
        .ok_or(Error::InvalidArgument("no event images"))?;
    for img in images {
        ensure_dim("width", first.width(), img.width())?;
        ensure_dim("height", first.height(), img.height())?;
    }
    Ok((first.width(), first.height()))
}

/// Event image a direct transition from frame `from` to frame `to` would
/// produce, synthesized from the recorded consecutive transitions
/// `images[k] = E(k+1, k+2)`. Frame indices are 1-based.
pub fn virtual_event(images: &[EventImage], from: usize, to: usize) -> Result<EventImage> {
    let (width, height) = check_images(images)?;
    let frames = images.len() + 1;
    check_index(from, frames)?;
    check_index(to, frames)?;
    let mut sum = vec![0i32; width * height];
    let (lo, hi, sign) = if from <= to { (from, to, 1) } else { (to, from, -1) };
    // E(n-1, n) lives at images[n - 2]
    for img in &images[lo - 1..hi - 1] {
        for (s, &e) in sum.iter_mut().zip(img.as_slice()) {
            *s += sign * e;
        }
    }
    EventImage::from_vec(width, height, sum, Some(Transition { from, to }))
}

/// Intensities recovered from event images given the index of the black pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct Recovery {
    /// `N` normalized images; entry `black_index - 1` is exactly zero.
    pub images: Vec<CodedImage>,
    /// Pixels whose recovered value fell outside `[0, 1]` and were clamped.
    /// Always zero for noiseless reference-aware acquisitions.
    pub clamped: usize,
}

/// Inverts the event images using the black frame as the log-intensity anchor:
/// `I(n) = eps (exp(tau S) - 1)` with `S` the signed event sum from the black
/// frame to frame `n`.
pub fn recover_intensities(
    images: &[EventImage],
    black_index: usize,
    cfg: &SensorConfig,
) -> Result<Recovery> {
    cfg.validate()?;
    let (width, height) = check_images(images)?;
    let frames = images.len() + 1;
    check_index(black_index, frames)?;
    let mut clamped = 0;
    let mut out = Vec::with_capacity(frames);
    for n in 1..=frames {
        if n == black_index {
            out.push(CodedImage::zeros(width, height, true));
            continue;
        }
        let sum = virtual_event(images, black_index, n)?;
        let data = sum
            .as_slice()
            .iter()
            .map(|&s| {
                let value = cfg.epsilon * libm::expm1(log_gap(s as i64, cfg));
                if !(0.0..=1.0).contains(&value) {
                    clamped += 1;
                }
                value.clamp(0.0, 1.0)
            })
            .collect();
        out.push(CodedImage::from_vec(width, height, data, true)?);
    }
    Ok(Recovery {
        images: out,
        clamped,
    })
}

/// Outcome of [`permute_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationReport {
    /// Largest `|predicted - simulated|` over all pixels and transitions.
    pub max_discrepancy: u32,
    /// Fraction of (pixel, transition) pairs with discrepancy at most one event.
    pub fraction_within_one: f64,
    /// Number of (pixel, transition) pairs compared.
    pub compared: usize,
}

/// Validates a 1-based permutation of `1..=n`.
pub fn validate_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidPermutation);
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p == 0 || p > n || seen[p - 1] {
            return Err(Error::InvalidPermutation);
        }
        seen[p - 1] = true;
    }
    Ok(())
}

/// Measures how well virtual event images predict a re-ordered acquisition.
///
/// `perm[k]` (1-based) is the original pattern shown at position `k + 1` of
/// the permuted sequence. Both orders are simulated without noise; the
/// permuted transitions are then predicted from the original event images.
pub fn permute_check(
    lf: &LightField,
    patterns: &[AperturePattern],
    perm: &[usize],
    cfg: &SensorConfig,
    model: EventModel,
) -> Result<PermutationReport> {
    validate_permutation(perm, patterns.len())?;
    let cfg = SensorConfig {
        noiseless: true,
        ..*cfg
    };
    let original = simulate_sequence(lf, patterns, &cfg, model)?;
    let reordered: Vec<AperturePattern> = perm.iter().map(|&p| patterns[p - 1].clone()).collect();
    let actual = simulate_sequence(lf, &reordered, &cfg, model)?;

    let mut max_discrepancy = 0;
    let mut within = 0usize;
    let mut compared = 0usize;
    for (k, simulated) in actual.iter().enumerate() {
        let predicted = virtual_event(&original, perm[k], perm[k + 1])?;
        for (&p, &s) in predicted.as_slice().iter().zip(simulated.as_slice()) {
            let d = p.abs_diff(s);
            max_discrepancy = max_discrepancy.max(d);
            within += usize::from(d <= 1);
            compared += 1;
        }
    }
    Ok(PermutationReport {
        max_discrepancy,
        fraction_within_one: if compared == 0 {
            1.0
        } else {
            within as f64 / compared as f64
        },
        compared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(values: &[i32]) -> Vec<EventImage> {
        values
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                EventImage::from_vec(1, 1, vec![v], Some(Transition::consecutive(k + 1))).unwrap()
            })
            .collect()
    }

    #[test]
    fn log_gap_scales_by_tau() {
        let cfg = SensorConfig::noiseless();
        assert_eq!(log_gap(0, &cfg), 0.0);
        assert!((log_gap(2, &cfg) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn virtual_event_sums_and_negates() {
        let e = single(&[3, -1, 5]);
        assert!(virtual_event(&e, 2, 2).unwrap().is_zero());
        assert_eq!(virtual_event(&e, 1, 3).unwrap().as_slice(), &[2]);
        assert_eq!(virtual_event(&e, 3, 1).unwrap().as_slice(), &[-2]);
        assert_eq!(virtual_event(&e, 1, 4).unwrap().as_slice(), &[7]);
        assert_eq!(virtual_event(&e, 4, 2).unwrap().as_slice(), &[-4]);
    }

    #[test]
    fn virtual_event_range_errors() {
        let e = single(&[1, 1]);
        assert!(matches!(virtual_event(&e, 0, 1), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(virtual_event(&e, 1, 4), Err(Error::IndexOutOfRange { .. })));
        assert!(virtual_event(&[], 1, 1).is_err());
    }

    #[test]
    fn recovery_spot_value() {
        let cfg = SensorConfig::noiseless();
        let rec = recover_intensities(&single(&[4]), 1, &cfg).unwrap();
        assert_eq!(rec.images[0].as_slice(), &[0.0]);
        let expected = 0.01 * (libm::exp(1.2) - 1.0);
        assert!((rec.images[1].as_slice()[0] - expected).abs() < 1e-15);
        assert!((rec.images[1].as_slice()[0] - 0.023201).abs() < 1e-6);
        assert_eq!(rec.clamped, 0);
    }

    #[test]
    fn recovery_with_black_in_the_middle() {
        let cfg = SensorConfig::noiseless();
        // frames: I1, black, I3 ; E(1,2) = -3 means I1 sits 3 steps above black
        let rec = recover_intensities(&single(&[-3, 2]), 2, &cfg).unwrap();
        let i1 = 0.01 * libm::expm1(0.9);
        let i3 = 0.01 * libm::expm1(0.6);
        assert!((rec.images[0].as_slice()[0] - i1).abs() < 1e-15);
        assert_eq!(rec.images[1].as_slice(), &[0.0]);
        assert!((rec.images[2].as_slice()[0] - i3).abs() < 1e-15);
    }

    #[test]
    fn recovery_flags_negative_values() {
        let cfg = SensorConfig::noiseless();
        let rec = recover_intensities(&single(&[-2]), 1, &cfg).unwrap();
        assert_eq!(rec.images[1].as_slice(), &[0.0]);
        assert_eq!(rec.clamped, 1);
    }

    #[test]
    fn zero_events_recover_black() {
        let cfg = SensorConfig::noiseless();
        let rec = recover_intensities(&single(&[0, 0, 0]), 3, &cfg).unwrap();
        assert!(rec.images.iter().all(|i| i.as_slice() == [0.0]));
        assert!(recover_intensities(&single(&[0]), 3, &cfg).is_err());
        assert!(recover_intensities(&single(&[0]), 0, &cfg).is_err());
    }

    #[test]
    fn permutation_validation() {
        assert!(validate_permutation(&[2, 1, 3], 3).is_ok());
        assert!(validate_permutation(&[1, 1, 3], 3).is_err());
        assert!(validate_permutation(&[0, 1, 2], 3).is_err());
        assert!(validate_permutation(&[1, 2], 3).is_err());
    }
}
