//! Event-camera sensor model.
//!
//! Two generators turn consecutive normalized coded images into signed event
//! counts. The baseline generator compares each frame with the previous one;
//! the reference-aware generator compares it with a per-pixel log reference
//! that advances by `tau` per emitted event. Both quantize with
//! `Q(x) = sign(x) floor(|x|)`.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{ensure_dim, Error, Result};
use crate::lightfield::{code_image_normalized, AperturePattern, CodedImage, LightField};

/// Smallest admissible `tau + z`; smaller threshold-noise draws are resampled.
pub const MIN_THRESHOLD: f64 = 1e-6;
const MAX_RESAMPLES: usize = 64;
const WORDS_PER_PIXEL: u128 = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorConfig {
    /// Contrast threshold in log-intensity units.
    pub tau: f64,
    /// Dark-current bias added before taking logs.
    pub epsilon: f64,
    /// Std of the additive log-intensity noise `w`.
    pub sigma_w: f64,
    /// Std of the threshold noise `z`.
    pub sigma_z: f64,
    pub seed: u64,
    /// Forces `w = z = 0`.
    pub noiseless: bool,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self {
            tau: 0.30,
            epsilon: 0.01,
            sigma_w: 0.175,
            sigma_z: 0.04,
            seed: 0,
            noiseless: false,
        }
    }
}

impl SensorConfig {
    pub fn noiseless() -> Self {
        Self {
            noiseless: true,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.tau, self.epsilon, self.sigma_w, self.sigma_z]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::NonFinite);
        }
        if self.tau <= 0.0 || self.epsilon <= 0.0 {
            return Err(Error::InvalidArgument("tau and epsilon must be positive"));
        }
        if self.sigma_w < 0.0 || self.sigma_z < 0.0 {
            return Err(Error::InvalidArgument("noise scales must be nonnegative"));
        }
        Ok(())
    }

    fn is_noisy(&self) -> bool {
        !self.noiseless && (self.sigma_w > 0.0 || self.sigma_z > 0.0)
    }
}

/// Labels the pattern transition `(from, to)`, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
}

impl Transition {
    /// The `k`-th consecutive transition `(k, k + 1)`.
    pub const fn consecutive(k: usize) -> Self {
        Self { from: k, to: k + 1 }
    }
}

/// `Q(x) = sign(x) floor(|x|)`.
pub fn quantize(x: f64) -> Result<i32> {
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(libm::trunc(x).clamp(i32::MIN as f64, i32::MAX as f64) as i32)
}

/// Quantizer used inside differentiable pipelines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Quantizer {
    /// Forward applies `Q`; backward passes the upstream gradient unchanged.
    #[default]
    StraightThrough,
    /// No quantization at all. Only useful for checking gradients of the
    /// surrounding expression against finite differences.
    Identity,
}

impl Quantizer {
    #[inline]
    pub fn forward(self, x: f64) -> f64 {
        match self {
            Quantizer::StraightThrough => libm::trunc(x),
            Quantizer::Identity => x,
        }
    }

    /// Jacobian-vector product; identity for both variants.
    #[inline]
    pub fn backward(self, upstream: f64) -> f64 {
        upstream
    }
}

/// Per-pixel sensor noise for one transition of one acquisition.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseField {
    /// Additive log noise `w`.
    pub w: Vec<f64>,
    /// Threshold noise `z`, already restricted to `tau + z > MIN_THRESHOLD`.
    pub z: Vec<f64>,
}

impl NoiseField {
    pub fn zeros(pixels: usize) -> Self {
        Self {
            w: vec![0.0; pixels],
            z: vec![0.0; pixels],
        }
    }

    /// Samples `(w, z)` from a counter-based stream keyed by
    /// `(cfg.seed, draw, transition, pixel)`, so any pixel's noise is
    /// independent of iteration order.
    ///
    /// `draw` distinguishes acquisitions that share a seed (e.g. training
    /// samples and epochs); plain simulation uses draw 0.
    pub fn sample(cfg: &SensorConfig, draw: u64, transition: usize, pixels: usize) -> Self {
        if !cfg.is_noisy() {
            return Self::zeros(pixels);
        }
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&cfg.seed.to_le_bytes());
        key[8..16].copy_from_slice(&draw.to_le_bytes());
        key[16..24].copy_from_slice(b"celf-evn");
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(transition as u64);

        let mut w = Vec::with_capacity(pixels);
        let mut z = Vec::with_capacity(pixels);
        for p in 0..pixels {
            rng.set_word_pos(p as u128 * WORDS_PER_PIXEL);
            let wn: f64 = StandardNormal.sample(&mut rng);
            w.push(cfg.sigma_w * wn);
            let mut zv = 0.0;
            for attempt in 0..=MAX_RESAMPLES {
                let zn: f64 = StandardNormal.sample(&mut rng);
                zv = cfg.sigma_z * zn;
                if cfg.tau + zv > MIN_THRESHOLD {
                    break;
                }
                if attempt == MAX_RESAMPLES {
                    zv = MIN_THRESHOLD - cfg.tau + MIN_THRESHOLD;
                }
            }
            z.push(zv);
        }
        Self { w, z }
    }
}

/// Signed per-pixel event counts for one pattern transition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventImage {
    width: usize,
    height: usize,
    data: Vec<i32>,
    transition: Option<Transition>,
}

impl EventImage {
    pub fn from_vec(
        width: usize,
        height: usize,
        data: Vec<i32>,
        transition: Option<Transition>,
    ) -> Result<Self> {
        ensure_dim("event-image buffer length", width * height, data.len())?;
        Ok(Self {
            width,
            height,
            data,
            transition,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0; width * height],
            transition: None,
        }
    }

    pub fn with_transition(mut self, transition: Transition) -> Self {
        self.transition = Some(transition);
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn transition(&self) -> Option<Transition> {
        self.transition
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> i32 {
        self.data[y * self.width + x]
    }

    /// Total number of events, `sum |E|`.
    pub fn event_count(&self) -> u64 {
        self.data.iter().map(|e| e.unsigned_abs() as u64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&e| e == 0)
    }

    pub fn negated(&self) -> Self {
        Self {
            data: self.data.iter().map(|e| -e).collect(),
            ..self.clone()
        }
    }
}

/// Per-pixel stored `ln(I_ref + epsilon)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RefState {
    width: usize,
    height: usize,
    log_ref: Vec<f64>,
}

impl RefState {
    /// Black reference, `ln(epsilon)` everywhere.
    pub fn black(width: usize, height: usize, cfg: &SensorConfig) -> Self {
        Self {
            width,
            height,
            log_ref: vec![libm::log(cfg.epsilon); width * height],
        }
    }

    /// Reference equal to a normalized frame, `ln(I + epsilon)`.
    pub fn from_image(img: &CodedImage, cfg: &SensorConfig) -> Result<Self> {
        img.ensure_normalized()?;
        Ok(Self {
            width: img.width(),
            height: img.height(),
            log_ref: img
                .as_slice()
                .iter()
                .map(|&i| libm::log(i + cfg.epsilon))
                .collect(),
        })
    }

    pub fn log_ref(&self) -> &[f64] {
        &self.log_ref
    }
}

/// Event generation model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EventModel {
    /// Consecutive-frame log difference.
    Baseline,
    /// Per-pixel reference tracking.
    #[default]
    ReferenceAware,
}

#[inline]
fn count(log_curr: f64, log_ref: f64, w: f64, z: f64, tau: f64) -> i32 {
    libm::trunc((log_curr - log_ref + w) / (tau + z)) as i32
}

/// Baseline events between two normalized frames, noise keyed by `transition` (draw 0).
pub fn gen_events_baseline(
    prev: &CodedImage,
    curr: &CodedImage,
    cfg: &SensorConfig,
    transition: Transition,
) -> Result<EventImage> {
    gen_events_baseline_draw(prev, curr, cfg, transition, 0)
}

pub fn gen_events_baseline_draw(
    prev: &CodedImage,
    curr: &CodedImage,
    cfg: &SensorConfig,
    transition: Transition,
    draw: u64,
) -> Result<EventImage> {
    cfg.validate()?;
    prev.ensure_normalized()?;
    curr.ensure_normalized()?;
    curr.ensure_same_size(prev.width(), prev.height())?;
    let noise = NoiseField::sample(cfg, draw, transition.from, prev.as_slice().len());
    let data = prev
        .as_slice()
        .iter()
        .zip(curr.as_slice())
        .enumerate()
        .map(|(p, (&a, &b))| {
            let log_prev = libm::log(a + cfg.epsilon);
            let log_curr = libm::log(b + cfg.epsilon);
            count(log_curr, log_prev, noise.w[p], noise.z[p], cfg.tau)
        })
        .collect();
    EventImage::from_vec(prev.width(), prev.height(), data, Some(transition))
}

/// Reference-aware events for one transition; returns the advanced reference.
pub fn gen_events_ra(
    curr: &CodedImage,
    reference: &RefState,
    cfg: &SensorConfig,
    transition: Transition,
) -> Result<(EventImage, RefState)> {
    gen_events_ra_draw(curr, reference, cfg, transition, 0)
}

pub fn gen_events_ra_draw(
    curr: &CodedImage,
    reference: &RefState,
    cfg: &SensorConfig,
    transition: Transition,
    draw: u64,
) -> Result<(EventImage, RefState)> {
    cfg.validate()?;
    curr.ensure_normalized()?;
    curr.ensure_same_size(reference.width, reference.height)?;
    let noise = NoiseField::sample(cfg, draw, transition.from, reference.log_ref.len());
    let mut next = reference.clone();
    let mut data = Vec::with_capacity(reference.log_ref.len());
    for (p, (&i, log_ref)) in curr.as_slice().iter().zip(&mut next.log_ref).enumerate() {
        let e = count(libm::log(i + cfg.epsilon), *log_ref, noise.w[p], noise.z[p], cfg.tau);
        *log_ref += cfg.tau * e as f64;
        data.push(e);
    }
    let events = EventImage::from_vec(reference.width, reference.height, data, Some(transition))?;
    Ok((events, next))
}

/// Everything produced by one simulated acquisition.
#[derive(Debug, Clone, PartialEq)]
pub struct Acquisition {
    /// Normalized coded images, one per pattern.
    pub images: Vec<CodedImage>,
    /// `N - 1` event images for transitions `(1,2) .. (N-1,N)`.
    pub events: Vec<EventImage>,
    /// Final reference state (reference-aware model only).
    pub reference: Option<RefState>,
}

/// Runs the acquisition simulator over a pattern sequence.
///
/// In reference-aware mode the reference starts at the first frame,
/// `ln(I1 + epsilon)`; with a black first pattern that is the black
/// reference `ln(epsilon)`.
pub fn simulate_sequence(
    lf: &LightField,
    patterns: &[AperturePattern],
    cfg: &SensorConfig,
    model: EventModel,
) -> Result<Vec<EventImage>> {
    Ok(simulate_acquisition(lf, patterns, cfg, model, 0)?.events)
}

pub fn simulate_acquisition(
    lf: &LightField,
    patterns: &[AperturePattern],
    cfg: &SensorConfig,
    model: EventModel,
    draw: u64,
) -> Result<Acquisition> {
    if patterns.len() < 2 {
        return Err(Error::InvalidArgument("at least two patterns are required"));
    }
    cfg.validate()?;
    let images: Vec<CodedImage> = patterns
        .iter()
        .map(|a| code_image_normalized(lf, a))
        .collect();
    let mut events = Vec::with_capacity(images.len() - 1);
    let reference = match model {
        EventModel::Baseline => {
            for (k, pair) in images.windows(2).enumerate() {
                let t = Transition::consecutive(k + 1);
                events.push(gen_events_baseline_draw(&pair[0], &pair[1], cfg, t, draw)?);
            }
            None
        }
        EventModel::ReferenceAware => {
            let mut state = RefState::from_image(&images[0], cfg)?;
            for (k, img) in images.iter().enumerate().skip(1) {
                let (e, next) = gen_events_ra_draw(img, &state, cfg, Transition::consecutive(k), draw)?;
                events.push(e);
                state = next;
            }
            Some(state)
        }
    };
    Ok(Acquisition {
        images,
        events,
        reference,
    })
}

/// One raw event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventRecord {
    pub x: u16,
    pub y: u16,
    /// Timestamp in microseconds.
    pub t: u32,
    /// +1 or -1.
    pub polarity: i8,
}

/// Time-ordered raw events, ties broken by `(y, x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventStream {
    width: u16,
    height: u16,
    records: Vec<EventRecord>,
}

impl EventStream {
    pub fn new(width: u16, height: u16, records: Vec<EventRecord>) -> Result<Self> {
        for r in &records {
            if r.x >= width || r.y >= height {
                return Err(Error::InvalidArgument("event outside the sensor"));
            }
            if r.polarity != 1 && r.polarity != -1 {
                return Err(Error::InvalidArgument("polarity must be +1 or -1"));
            }
        }
        let sorted = records
            .windows(2)
            .all(|w| (w[0].t, w[0].y, w[0].x) <= (w[1].t, w[1].y, w[1].x));
        if !sorted {
            return Err(Error::InvalidArgument("events must be sorted by (t, y, x)"));
        }
        Ok(Self {
            width,
            height,
            records,
        })
    }

    pub fn width(&self) -> u16 {
        self.width
    }

    pub fn height(&self) -> u16 {
        self.height
    }

    pub fn records(&self) -> &[EventRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Sums polarities per pixel over `t0 <= t < t1`. The result is unlabeled.
pub fn accumulate_stream(stream: &EventStream, t0: u32, t1: u32) -> Result<EventImage> {
    if t0 >= t1 {
        return Err(Error::InvalidArgument("window must satisfy t0 < t1"));
    }
    let width = stream.width as usize;
    let mut img = EventImage::zeros(width, stream.height as usize);
    for r in stream.records.iter().filter(|r| (t0..t1).contains(&r.t)) {
        img.data[r.y as usize * width + r.x as usize] += r.polarity as i32;
    }
    Ok(img)
}

/// Splits a stream into consecutive windows and labels them `(k, k+1)`.
pub fn split_stream(stream: &EventStream, durations: &[u32]) -> Result<Vec<EventImage>> {
    let mut start = 0u32;
    let mut out = Vec::with_capacity(durations.len());
    for (k, &d) in durations.iter().enumerate() {
        let end = start
            .checked_add(d)
            .ok_or(Error::InvalidArgument("durations overflow the u32 clock"))?;
        out.push(accumulate_stream(stream, start, end)?.with_transition(Transition::consecutive(k + 1)));
        start = end;
    }
    Ok(out)
}

/// Synthesizes a raw stream whose windows accumulate back to `images`.
///
/// Window `k` spans `durations[k]` microseconds, windows are back to back from
/// `t = 0`. A pixel with `|E| = k` gets `k` evenly spaced events whose common
/// phase depends on the pixel position.
pub fn expand_to_stream(images: &[EventImage], durations: &[u32]) -> Result<EventStream> {
    ensure_dim("duration count", images.len(), durations.len())?;
    let first = images
        .first()
        .ok_or(Error::InvalidArgument("no event images"))?;
    let (width, height) = (first.width, first.height);
    if width > u16::MAX as usize || height > u16::MAX as usize {
        return Err(Error::InvalidArgument("sensor too large for 16-bit coordinates"));
    }
    if durations.contains(&0) {
        return Err(Error::InvalidArgument("durations must be positive"));
    }

    let mut records = Vec::new();
    let mut start = 0u64;
    for (img, &duration) in images.iter().zip(durations) {
        ensure_dim("width", width, img.width)?;
        ensure_dim("height", height, img.height)?;
        for y in 0..height {
            for x in 0..width {
                let e = img.data[y * width + x];
                let k = e.unsigned_abs() as u64;
                if k == 0 {
                    continue;
                }
                let phase = pixel_phase(x, y);
                for j in 0..k {
                    let offset = libm::floor((j as f64 + phase) * duration as f64 / k as f64) as u64;
                    records.push(EventRecord {
                        x: x as u16,
                        y: y as u16,
                        t: (start + offset.min(duration as u64 - 1)) as u32,
                        polarity: if e > 0 { 1 } else { -1 },
                    });
                }
            }
        }
        start += duration as u64;
        if start > u32::MAX as u64 + 1 {
            return Err(Error::InvalidArgument("durations overflow the u32 clock"));
        }
    }
    records.sort_by_key(|r| (r.t, r.y, r.x));
    EventStream::new(width as u16, height as u16, records)
}

/// Deterministic phase in `[0, 1)` from a pixel position.
fn pixel_phase(x: usize, y: usize) -> f64 {
    let mut h = (y as u64) << 32 | x as u64;
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^= h >> 31;
    (h >> 11) as f64 / (1u64 << 53) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn img(values: &[f64]) -> CodedImage {
        CodedImage::from_vec(values.len(), 1, values.to_vec(), true).unwrap()
    }

    #[test]
    fn quantize_truncates_toward_zero() {
        assert_eq!(quantize(2.7).unwrap(), 2);
        assert_eq!(quantize(-1.3).unwrap(), -1);
        assert_eq!(quantize(0.999).unwrap(), 0);
        assert_eq!(quantize(2.0).unwrap(), 2);
        assert_eq!(quantize(-3.0).unwrap(), -3);
        assert_eq!(quantize(f64::NAN), Err(Error::NonFinite));
        assert_eq!(quantize(f64::INFINITY), Err(Error::NonFinite));
    }

    #[test]
    fn straight_through_passes_gradient() {
        let q = Quantizer::StraightThrough;
        assert_eq!(q.forward(2.7), 2.0);
        assert_eq!(q.forward(0.4), 0.0);
        assert_eq!(q.backward(0.37), 0.37);
        assert_eq!(q.backward(-5.0), -5.0);
    }

    #[test]
    fn baseline_spot_values() {
        let cfg = SensorConfig::noiseless();
        let t = Transition::consecutive(1);
        let up = gen_events_baseline(&img(&[0.0]), &img(&[0.01]), &cfg, t).unwrap();
        assert_eq!(up.as_slice(), &[2]);
        let down = gen_events_baseline(&img(&[0.01]), &img(&[0.0]), &cfg, t).unwrap();
        assert_eq!(down.as_slice(), &[-2]);
        let flat = gen_events_baseline(&img(&[0.3, 0.7]), &img(&[0.3, 0.7]), &cfg, t).unwrap();
        assert!(flat.is_zero());
    }

    #[test]
    fn baseline_rejects_unnormalized_and_mismatch() {
        let cfg = SensorConfig::noiseless();
        let t = Transition::consecutive(1);
        let raw = CodedImage::zeros(1, 1, false);
        assert!(gen_events_baseline(&raw, &img(&[0.0]), &cfg, t).is_err());
        assert!(gen_events_baseline(&img(&[0.0, 0.0]), &img(&[0.0]), &cfg, t).is_err());
    }

    #[test]
    fn ra_first_transition_from_black() {
        let cfg = SensorConfig::noiseless();
        let black = RefState::black(1, 1, &cfg);
        let (e, next) = gen_events_ra(&img(&[0.03]), &black, &cfg, Transition::consecutive(1)).unwrap();
        assert_eq!(e.as_slice(), &[4]);
        let expected = libm::log(0.01) + 1.2;
        assert!((next.log_ref()[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn ra_sub_threshold_keeps_reference() {
        let cfg = SensorConfig::noiseless();
        let reference = RefState::from_image(&img(&[0.5]), &cfg).unwrap();
        let (e, next) =
            gen_events_ra(&img(&[0.55]), &reference, &cfg, Transition::consecutive(1)).unwrap();
        assert_eq!(e.as_slice(), &[0]);
        assert_eq!(next, reference);
    }

    #[test]
    fn noise_is_keyed_and_reproducible() {
        let cfg = SensorConfig {
            seed: 11,
            ..SensorConfig::default()
        };
        let a = NoiseField::sample(&cfg, 0, 1, 50);
        assert_eq!(a, NoiseField::sample(&cfg, 0, 1, 50));
        assert_ne!(a, NoiseField::sample(&cfg, 0, 2, 50));
        assert_ne!(a, NoiseField::sample(&cfg, 1, 1, 50));
        // a prefix of pixels is unaffected by how many pixels are drawn
        let short = NoiseField::sample(&cfg, 0, 1, 10);
        assert_eq!(&a.w[..10], short.w.as_slice());
        assert!(a.z.iter().all(|z| cfg.tau + z > MIN_THRESHOLD));
        assert!(a.w.iter().any(|&w| w != 0.0));
    }

    #[test]
    fn noise_moments_are_plausible() {
        let cfg = SensorConfig::default();
        let n = NoiseField::sample(&cfg, 3, 1, 20_000);
        let mean = n.w.iter().sum::<f64>() / 20_000.0;
        let var = n.w.iter().map(|w| (w - mean) * (w - mean)).sum::<f64>() / 20_000.0;
        assert!(mean.abs() < 0.01);
        assert!((libm::sqrt(var) - 0.175).abs() < 0.01);
        let zstd = libm::sqrt(n.z.iter().map(|z| z * z).sum::<f64>() / 20_000.0);
        assert!((zstd - 0.04).abs() < 0.003);
    }

    #[test]
    fn huge_threshold_noise_stays_positive() {
        let cfg = SensorConfig {
            sigma_z: 5.0,
            ..SensorConfig::default()
        };
        let n = NoiseField::sample(&cfg, 0, 1, 2000);
        assert!(n.z.iter().all(|z| cfg.tau + z > MIN_THRESHOLD * 0.999));
    }

    #[test]
    fn config_validation() {
        let mut cfg = SensorConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.tau = 0.0;
        assert!(cfg.validate().is_err());
        cfg = SensorConfig {
            sigma_w: -1.0,
            ..SensorConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn single_pixel_expansion() {
        let mut data = vec![0; 4];
        data[2] = 3;
        let e = EventImage::from_vec(2, 2, data, None).unwrap();
        let stream = expand_to_stream(core::slice::from_ref(&e), &[10_000]).unwrap();
        assert_eq!(stream.len(), 3);
        assert!(stream
            .records()
            .iter()
            .all(|r| r.t < 10_000 && (r.x, r.y) == (0, 1) && r.polarity == 1));
        assert_eq!(accumulate_stream(&stream, 0, 10_000).unwrap().as_slice(), e.as_slice());
    }

    #[test]
    fn accumulate_cancels_and_handles_empty() {
        let empty = EventStream::new(3, 2, Vec::new()).unwrap();
        assert!(accumulate_stream(&empty, 0, 5).unwrap().is_zero());
        let records = vec![
            EventRecord { x: 1, y: 1, t: 3, polarity: 1 },
            EventRecord { x: 1, y: 1, t: 4, polarity: -1 },
        ];
        let s = EventStream::new(3, 2, records).unwrap();
        assert!(accumulate_stream(&s, 0, 10).unwrap().is_zero());
        assert!(accumulate_stream(&s, 5, 5).is_err());
    }

    #[test]
    fn stream_validation() {
        let outside = vec![EventRecord { x: 3, y: 0, t: 0, polarity: 1 }];
        assert!(EventStream::new(3, 2, outside).is_err());
        let unsorted = vec![
            EventRecord { x: 0, y: 0, t: 5, polarity: 1 },
            EventRecord { x: 0, y: 0, t: 4, polarity: 1 },
        ];
        assert!(EventStream::new(3, 2, unsorted).is_err());
        let zero = vec![EventRecord { x: 0, y: 0, t: 5, polarity: 0 }];
        assert!(EventStream::new(3, 2, zero).is_err());
    }

    #[test]
    fn expand_rejects_mismatched_lists() {
        let e = EventImage::zeros(2, 2);
        assert!(expand_to_stream(core::slice::from_ref(&e), &[]).is_err());
        assert!(expand_to_stream(&[e], &[0]).is_err());
    }

    #[test]
    fn sequence_needs_two_patterns() {
        let lf = LightField::constant(2, 2, 0.5).unwrap();
        let cfg = SensorConfig::noiseless();
        assert!(simulate_sequence(&lf, &[AperturePattern::open()], &cfg, EventModel::Baseline).is_err());
    }
}
