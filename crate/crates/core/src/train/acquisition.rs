//! Differentiable acquisition: aperture patterns to event images, with the
//! reverse pass back to the pattern values.
//!
//! Forward values are bit-identical to [`crate::sensor::simulate_acquisition`]
//! when the straight-through quantizer is used. Noise is treated as a
//! constant of each sample, so no gradient flows into `w` or `z`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure_dim, Error, Result};
use crate::lightfield::{code_image_normalized, AperturePattern, LightField, VIEWS};
use crate::sensor::{EventImage, EventModel, NoiseField, Quantizer, SensorConfig, Transition};

/// Cached forward state of one acquisition.
#[derive(Debug, Clone)]
pub struct AcquisitionPass {
    width: usize,
    height: usize,
    model: EventModel,
    quantizer: Quantizer,
    /// Normalized intensities per frame.
    intensities: Vec<Vec<f64>>,
    /// `tau + z` per transition.
    thresholds: Vec<Vec<f64>>,
    /// Quantized (or identity) event values per transition.
    events: Vec<Vec<f64>>,
}

impl AcquisitionPass {
    /// Runs image formation and event generation for one light field.
    pub fn forward(
        lf: &LightField,
        patterns: &[AperturePattern],
        cfg: &SensorConfig,
        model: EventModel,
        quantizer: Quantizer,
        draw: u64,
    ) -> Result<Self> {
        if patterns.len() < 2 {
            return Err(Error::InvalidArgument("at least two patterns are required"));
        }
        cfg.validate()?;
        let pixels = lf.width() * lf.height();
        let intensities: Vec<Vec<f64>> = patterns
            .iter()
            .map(|a| code_image_normalized(lf, a).as_slice().to_vec())
            .collect();
        let logs: Vec<Vec<f64>> = intensities
            .iter()
            .map(|img| img.iter().map(|&i| libm::log(i + cfg.epsilon)).collect())
            .collect();

        let transitions = patterns.len() - 1;
        let mut thresholds = Vec::with_capacity(transitions);
        let mut events = Vec::with_capacity(transitions);
        let mut reference = logs[0].clone();
        for k in 1..=transitions {
            let noise = NoiseField::sample(cfg, draw, k, pixels);
            let base: &[f64] = match model {
                EventModel::Baseline => &logs[k - 1],
                EventModel::ReferenceAware => &reference,
            };
            let mut e = Vec::with_capacity(pixels);
            let mut th = Vec::with_capacity(pixels);
            for p in 0..pixels {
                let t = cfg.tau + noise.z[p];
                e.push(quantizer.forward((logs[k][p] - base[p] + noise.w[p]) / t));
                th.push(t);
            }
            if model == EventModel::ReferenceAware {
                for (r, &ev) in reference.iter_mut().zip(&e) {
                    *r += cfg.tau * ev;
                }
            }
            thresholds.push(th);
            events.push(e);
        }
        Ok(Self {
            width: lf.width(),
            height: lf.height(),
            model,
            quantizer,
            intensities,
            thresholds,
            events,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Event values per transition, `(N-1) x H x W` row-major.
    pub fn stacked_events(&self) -> Vec<f64> {
        self.events.iter().flatten().copied().collect()
    }

    pub fn event_images(&self) -> Vec<EventImage> {
        self.events
            .iter()
            .enumerate()
            .map(|(k, e)| {
                EventImage::from_vec(
                    self.width,
                    self.height,
                    e.iter().map(|&v| v as i32).collect(),
                    Some(Transition::consecutive(k + 1)),
                )
                .expect("sizes are consistent")
            })
            .collect()
    }

    /// Total `sum |E|` per pixel across transitions.
    pub fn events_per_pixel(&self) -> f64 {
        let pixels = (self.width * self.height) as f64;
        self.events.iter().flatten().map(|e| e.abs()).sum::<f64>() / pixels
    }

    /// Gradient w.r.t. each pattern's 64 transmittances given the gradient
    /// w.r.t. the stacked events.
    pub fn backward(
        &self,
        lf: &LightField,
        grad_events: &[f64],
        cfg: &SensorConfig,
    ) -> Result<Vec<[f64; VIEWS]>> {
        let pixels = self.width * self.height;
        ensure_dim("event gradient length", self.events.len() * pixels, grad_events.len())?;
        ensure_dim("width", self.width, lf.width())?;
        ensure_dim("height", self.height, lf.height())?;
        let frames = self.intensities.len();
        let mut grad_log = vec![vec![0.0; pixels]; frames];

        match self.model {
            EventModel::Baseline => {
                for k in 1..frames {
                    let ge = &grad_events[(k - 1) * pixels..k * pixels];
                    for p in 0..pixels {
                        let c = self.quantizer.backward(ge[p]) / self.thresholds[k - 1][p];
                        grad_log[k][p] += c;
                        grad_log[k - 1][p] -= c;
                    }
                }
            }
            EventModel::ReferenceAware => {
                // ref_k = ref_{k-1} + tau Q((l_k - ref_{k-1} + w) / t), ref_0 = l_0
                let mut grad_ref = vec![0.0; pixels];
                for k in (1..frames).rev() {
                    let ge = &grad_events[(k - 1) * pixels..k * pixels];
                    for p in 0..pixels {
                        let upstream = ge[p] + cfg.tau * grad_ref[p];
                        let c = self.quantizer.backward(upstream) / self.thresholds[k - 1][p];
                        grad_log[k][p] += c;
                        grad_ref[p] -= c;
                    }
                }
                for (g, r) in grad_log[0].iter_mut().zip(&grad_ref) {
                    *g += r;
                }
            }
        }

        let mut grads = vec![[0.0; VIEWS]; frames];
        for (n, grad) in grads.iter_mut().enumerate() {
            for p in 0..pixels {
                // dl/dI = 1 / (I/64 + eps) / 64
                let gi = grad_log[n][p] / (self.intensities[n][p] + cfg.epsilon) / VIEWS as f64;
                if gi == 0.0 {
                    continue;
                }
                let views = lf.pixel(p % self.width, p / self.width);
                for (g, l) in grad.iter_mut().zip(views) {
                    *g += gi * l;
                }
            }
        }
        Ok(grads)
    }
}
