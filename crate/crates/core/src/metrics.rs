//! Reconstruction quality (PSNR, SSIM) and acquisition cost (event counts,
//! data rate).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure_dim, Error, Result};
use crate::lightfield::{LightField, VIEWS, VIEW_SIDE};
use crate::sensor::EventImage;

/// Bits per event in coordinate-list (COO) encoding.
pub const COO_BITS_PER_EVENT: u32 = 29;

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

/// Mean squared error over two equally sized buffers.
pub fn mse(reference: &[f64], estimate: &[f64]) -> Result<f64> {
    ensure_dim("element count", reference.len(), estimate.len())?;
    if reference.is_empty() {
        return Err(Error::InvalidArgument("empty input"));
    }
    let sum: f64 = reference
        .iter()
        .zip(estimate)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sum / reference.len() as f64)
}

/// PSNR in dB for unit dynamic range; `f64::INFINITY` when the inputs are equal.
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        -10.0 * libm::log10(mse)
    }
}

/// PSNR over the whole 4-D tensor (one MSE across all views).
pub fn psnr(reference: &LightField, estimate: &LightField) -> Result<f64> {
    ensure_dim("width", reference.width(), estimate.width())?;
    ensure_dim("height", reference.height(), estimate.height())?;
    Ok(psnr_from_mse(mse(reference.as_slice(), estimate.as_slice())?))
}

/// PSNR of each view, indexed `v * 8 + u`.
pub fn psnr_per_view(reference: &LightField, estimate: &LightField) -> Result<Vec<f64>> {
    ensure_dim("width", reference.width(), estimate.width())?;
    ensure_dim("height", reference.height(), estimate.height())?;
    let mut out = Vec::with_capacity(VIEWS);
    for v in 0..VIEW_SIDE {
        for u in 0..VIEW_SIDE {
            out.push(psnr_from_mse(mse(&reference.view(u, v), &estimate.view(u, v))?));
        }
    }
    Ok(out)
}

/// Borrowed row-major grayscale image.
#[derive(Debug, Clone, Copy)]
pub struct ImageView<'a> {
    pub width: usize,
    pub height: usize,
    pub data: &'a [f64],
}

impl<'a> ImageView<'a> {
    pub fn new(width: usize, height: usize, data: &'a [f64]) -> Result<Self> {
        ensure_dim("image buffer length", width * height, data.len())?;
        Ok(Self {
            width,
            height,
            data,
        })
    }
}

/// Normalized 1-D Gaussian taps for the SSIM window.
pub fn gaussian_taps() -> [f64; SSIM_WINDOW] {
    let mut taps = [0.0; SSIM_WINDOW];
    let c = (SSIM_WINDOW / 2) as f64;
    for (i, t) in taps.iter_mut().enumerate() {
        let d = i as f64 - c;
        *t = libm::exp(-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA));
    }
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

/// Separable "valid" filtering: output is `(w - 10) x (h - 10)`.
fn filter_valid(src: &[f64], width: usize, height: usize, taps: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let ow = width + 1 - SSIM_WINDOW;
    let oh = height + 1 - SSIM_WINDOW;
    let mut rows = vec![0.0; ow * height];
    for y in 0..height {
        let line = &src[y * width..(y + 1) * width];
        for x in 0..ow {
            rows[y * ow + x] = taps.iter().zip(&line[x..x + SSIM_WINDOW]).map(|(t, v)| t * v).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = taps
                .iter()
                .enumerate()
                .map(|(k, t)| t * rows[(y + k) * ow + x])
                .sum();
        }
    }
    out
}

/// Mean SSIM with an 11x11 Gaussian window (sigma 1.5), `k1 = 0.01`,
/// `k2 = 0.03`, dynamic range 1, over all fully-contained windows.
pub fn ssim(reference: ImageView<'_>, estimate: ImageView<'_>) -> Result<f64> {
    ensure_dim("width", reference.width, estimate.width)?;
    ensure_dim("height", reference.height, estimate.height)?;
    let (w, h) = (reference.width, reference.height);
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::InvalidArgument("image smaller than the SSIM window"));
    }
    let taps = gaussian_taps();
    let a = reference.data;
    let b = estimate.data;
    let prod = |f: &dyn Fn(f64, f64) -> f64| -> Vec<f64> {
        a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
    };
    let mu_a = filter_valid(a, w, h, &taps);
    let mu_b = filter_valid(b, w, h, &taps);
    let aa = filter_valid(&prod(&|x, _| x * x), w, h, &taps);
    let bb = filter_valid(&prod(&|_, y| y * y), w, h, &taps);
    let ab = filter_valid(&prod(&|x, y| x * y), w, h, &taps);

    let c1 = SSIM_K1 * SSIM_K1;
    let c2 = SSIM_K2 * SSIM_K2;
    let n = mu_a.len();
    let mut total = 0.0;
    for i in 0..n {
        let (ma, mb) = (mu_a[i], mu_b[i]);
        let va = aa[i] - ma * ma;
        let vb = bb[i] - mb * mb;
        let cov = ab[i] - ma * mb;
        total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2))
            / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    Ok(total / n as f64)
}

/// Mean SSIM over the 64 views.
pub fn ssim_lightfield(reference: &LightField, estimate: &LightField) -> Result<f64> {
    ensure_dim("width", reference.width(), estimate.width())?;
    ensure_dim("height", reference.height(), estimate.height())?;
    let (w, h) = (reference.width(), reference.height());
    let mut total = 0.0;
    for v in 0..VIEW_SIDE {
        for u in 0..VIEW_SIDE {
            let ra = reference.view(u, v);
            let eb = estimate.view(u, v);
            total += ssim(ImageView::new(w, h, &ra)?, ImageView::new(w, h, &eb)?)?;
        }
    }
    Ok(total / VIEWS as f64)
}

/// Event-count summary: mean `|E|` per pixel for each transition, and their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct EventStats {
    pub per_transition: Vec<f64>,
    pub total: f64,
}

pub fn event_stats(images: &[EventImage]) -> Result<EventStats> {
    let first = images.first().ok_or(Error::InvalidArgument("no event images"))?;
    let pixels = (first.width() * first.height()) as f64;
    let mut per_transition = Vec::with_capacity(images.len());
    for img in images {
        ensure_dim("width", first.width(), img.width())?;
        ensure_dim("height", first.height(), img.height())?;
        per_transition.push(img.event_count() as f64 / pixels);
    }
    let total = per_transition.iter().sum();
    Ok(EventStats {
        per_transition,
        total,
    })
}

/// Data-rate accounting for an event-based acquisition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataRate {
    pub events_per_sensor_pixel: f64,
    /// Events per light-field sample (sensor figure divided by 64 views).
    pub events_per_lf_pixel: f64,
    pub bits_per_sensor_pixel: f64,
    pub bits_per_lf_pixel: f64,
}

pub fn data_rate(events_per_pixel: f64, bits_per_event: u32) -> Result<DataRate> {
    if !events_per_pixel.is_finite() {
        return Err(Error::NonFinite);
    }
    if events_per_pixel <= 0.0 || bits_per_event == 0 {
        return Err(Error::InvalidArgument("data-rate inputs must be positive"));
    }
    let bits = events_per_pixel * bits_per_event as f64;
    Ok(DataRate {
        events_per_sensor_pixel: events_per_pixel,
        events_per_lf_pixel: events_per_pixel / VIEWS as f64,
        bits_per_sensor_pixel: bits,
        bits_per_lf_pixel: bits / VIEWS as f64,
    })
}
