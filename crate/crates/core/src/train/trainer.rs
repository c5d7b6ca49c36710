use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::acquisition::AcquisitionPass;
use super::patterns::{patterns_from_logits, PatternLogits};
use crate::error::{Error, Result};
use crate::lightfield::{AperturePattern, LightField, VIEWS};
use crate::metrics::{psnr_from_mse, ssim_lightfield};
use crate::nn::{default_widths, mse_loss, Adam, AdamConfig, ReconNet, Tensor};
use crate::sensor::{EventImage, EventModel, Quantizer, SensorConfig};

/// Held-out sample `i` is simulated with noise draw `EVAL_DRAW_BASE + i`,
/// far away from the draws used in training.
pub const EVAL_DRAW_BASE: u64 = 1 << 62;

/// Acquisition variant: optional black-first sequence, optional reference-aware events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TrainMode {
    Baseline,
    BaselineBf,
    BaselineRa,
    #[default]
    BaselineBfRa,
}

impl TrainMode {
    pub const ALL: [TrainMode; 4] = [
        TrainMode::Baseline,
        TrainMode::BaselineBf,
        TrainMode::BaselineRa,
        TrainMode::BaselineBfRa,
    ];

    pub fn black_first(self) -> bool {
        matches!(self, TrainMode::BaselineBf | TrainMode::BaselineBfRa)
    }

    /// Reference-aware modes start the reference at the first frame, which
    /// is the black reference when the sequence is black-first.
    pub fn event_model(self) -> EventModel {
        match self {
            TrainMode::Baseline | TrainMode::BaselineBf => EventModel::Baseline,
            TrainMode::BaselineRa | TrainMode::BaselineBfRa => EventModel::ReferenceAware,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TrainMode::Baseline => "baseline",
            TrainMode::BaselineBf => "baseline+BF",
            TrainMode::BaselineRa => "baseline+RA",
            TrainMode::BaselineBfRa => "baseline+BF+RA",
        }
    }
}

impl fmt::Display for TrainMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TrainMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TrainMode::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or(Error::InvalidArgument("unknown training mode"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Number of aperture patterns `N`.
    pub patterns: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub s_init: f64,
    /// Multiplier applied to `s` after every epoch.
    pub s_growth: f64,
    pub mode: TrainMode,
    pub sensor: SensorConfig,
    pub seed: u64,
    pub adam: AdamConfig,
    /// Hidden channel width of the reconstruction network.
    pub net_width: usize,
    /// Number of convolution layers.
    pub net_depth: usize,
    /// Explicit channel widths `[N-1, .., 64]`; overrides width and depth.
    pub net_widths: Option<Vec<usize>>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            patterns: 4,
            epochs: 600,
            batch_size: 16,
            s_init: 1.0,
            s_growth: 1.02,
            mode: TrainMode::default(),
            sensor: SensorConfig::default(),
            seed: 0,
            adam: AdamConfig::default(),
            net_width: 32,
            net_depth: 8,
            net_widths: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.patterns < 2 {
            return Err(Error::InvalidArgument("N must be at least 2"));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument("batch size must be positive"));
        }
        if !(self.s_init > 0.0) || !self.s_init.is_finite() {
            return Err(Error::InvalidArgument("s_init must be positive"));
        }
        if !(self.s_growth >= 1.0) || !self.s_growth.is_finite() {
            return Err(Error::InvalidArgument("s_growth must be at least 1"));
        }
        if !(self.adam.lr > 0.0) {
            return Err(Error::InvalidArgument("learning rate must be positive"));
        }
        if self.net_width == 0 {
            return Err(Error::InvalidArgument("network width must be positive"));
        }
        self.sensor.validate()?;
        let widths = self.net_widths()?;
        crate::error::ensure_dim("network input channels", self.patterns - 1, widths[0])
    }

    pub fn net_widths(&self) -> Result<Vec<usize>> {
        match &self.net_widths {
            Some(w) if w.is_empty() => Err(Error::InvalidArgument("empty network widths")),
            Some(w) => Ok(w.clone()),
            None => default_widths(self.patterns, self.net_width, self.net_depth),
        }
    }

    /// Scale used during epoch `epoch` (0-based).
    pub fn scale_at(&self, epoch: usize) -> f64 {
        self.s_init * libm::pow(self.s_growth, epoch as f64)
    }
}

/// One row of the training history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean training loss over the epoch's samples.
    pub loss: f64,
    /// Mean loss on the held-out tail, when there is one.
    pub val_loss: Option<f64>,
    /// Sigmoid scale used during the epoch.
    pub s: f64,
    /// Mean total events per pixel over the epoch's samples.
    pub events_per_pixel: f64,
    /// Smallest mean transmittance among the realized patterns.
    pub min_transmittance: f64,
}

/// Jointly optimized aperture codes and reconstruction network.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub logits: PatternLogits,
    pub net: ReconNet,
    /// Current sigmoid scale.
    pub s: f64,
    pub mode: TrainMode,
}

impl Model {
    pub fn new(cfg: &TrainConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            logits: PatternLogits::random(cfg.patterns, cfg.mode.black_first(), cfg.seed)?,
            net: ReconNet::new(&cfg.net_widths()?, cfg.seed)?,
            s: cfg.s_init,
            mode: cfg.mode,
        })
    }

    pub fn patterns(&self) -> Result<Vec<AperturePattern>> {
        patterns_from_logits(&self.logits, self.s)
    }
}

/// A model with fixed, realized patterns, ready for inference.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstructor {
    pub patterns: Vec<AperturePattern>,
    pub net: ReconNet,
    pub model: EventModel,
}

impl Reconstructor {
    pub fn new(patterns: Vec<AperturePattern>, net: ReconNet, model: EventModel) -> Result<Self> {
        if patterns.len() < 2 {
            return Err(Error::InvalidArgument("at least two patterns are required"));
        }
        crate::error::ensure_dim("network input channels", patterns.len() - 1, net.input_channels())?;
        Ok(Self {
            patterns,
            net,
            model,
        })
    }

    pub fn from_model(model: &Model) -> Result<Self> {
        Self::new(model.patterns()?, model.net.clone(), model.mode.event_model())
    }

    /// Network output for already-captured event images.
    pub fn reconstruct_events(&mut self, events: &[EventImage]) -> Result<LightField> {
        let first = events.first().ok_or(Error::InvalidArgument("no event images"))?;
        let (w, h) = (first.width(), first.height());
        let mut stacked = Vec::with_capacity(events.len() * w * h);
        for e in events {
            crate::error::ensure_dim("width", w, e.width())?;
            crate::error::ensure_dim("height", h, e.height())?;
            stacked.extend(e.as_slice().iter().map(|&v| v as f64));
        }
        let out = self.net.infer(&Tensor::new(&[events.len(), h, w], stacked)?)?;
        LightField::from_view_stack(w, h, out.data())
    }

    /// Simulates the acquisition of `lf` and reconstructs it.
    pub fn reconstruct(
        &mut self,
        lf: &LightField,
        sensor: &SensorConfig,
        draw: u64,
    ) -> Result<(LightField, Vec<EventImage>)> {
        let pass = AcquisitionPass::forward(
            lf,
            &self.patterns,
            sensor,
            self.model,
            Quantizer::StraightThrough,
            draw,
        )?;
        let events = pass.event_images();
        let rec = self.reconstruct_events(&events)?;
        Ok((rec, events))
    }

    /// Scores reconstructions of every sample. Noise draws are keyed by
    /// sample index, so results are reproducible.
    pub fn evaluate(&mut self, dataset: &[LightField], sensor: &SensorConfig, with_ssim: bool) -> Result<Evaluation> {
        if dataset.is_empty() {
            return Err(Error::Dataset("empty evaluation set"));
        }
        let mut sq = 0.0;
        let mut count = 0usize;
        let mut psnr_sum = 0.0;
        let mut ssim_sum = 0.0;
        let mut events = 0.0;
        for (i, lf) in dataset.iter().enumerate() {
            let (rec, ev) = self.reconstruct(lf, sensor, EVAL_DRAW_BASE + i as u64)?;
            let sample_sq: f64 = lf
                .as_slice()
                .iter()
                .zip(rec.as_slice())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            sq += sample_sq;
            count += lf.as_slice().len();
            psnr_sum += psnr_from_mse(sample_sq / lf.as_slice().len() as f64);
            if with_ssim {
                ssim_sum += ssim_lightfield(lf, &rec)?;
            }
            events += crate::metrics::event_stats(&ev)?.total;
        }
        let n = dataset.len() as f64;
        let mse = sq / count as f64;
        Ok(Evaluation {
            mse,
            psnr: psnr_from_mse(mse),
            mean_sample_psnr: psnr_sum / n,
            ssim: with_ssim.then_some(ssim_sum / n),
            events_per_pixel: events / n,
        })
    }
}

/// Aggregate scores over an evaluation set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    /// MSE pooled over every sample of every light field.
    pub mse: f64,
    /// PSNR of the pooled MSE.
    pub psnr: f64,
    /// Mean of per-light-field PSNRs.
    pub mean_sample_psnr: f64,
    pub ssim: Option<f64>,
    pub events_per_pixel: f64,
}

/// MSE of the best constant predictor (the global mean) on a dataset.
pub fn constant_predictor_mse(dataset: &[LightField]) -> Result<f64> {
    let n: usize = dataset.iter().map(|lf| lf.as_slice().len()).sum();
    if n == 0 {
        return Err(Error::Dataset("empty dataset"));
    }
    let mean = dataset.iter().flat_map(|lf| lf.as_slice()).sum::<f64>() / n as f64;
    Ok(dataset
        .iter()
        .flat_map(|lf| lf.as_slice())
        .map(|v| (v - mean) * (v - mean))
        .sum::<f64>()
        / n as f64)
}

/// Number of trailing samples held out for validation (10%, rounded down).
pub fn validation_len(total: usize) -> usize {
    total / 10
}

/// Minibatch Adam over the pattern logits and the network weights.
#[derive(Debug, Clone)]
pub struct Trainer {
    cfg: TrainConfig,
    model: Model,
    adam: Adam,
    epoch: usize,
    history: Vec<EpochRecord>,
}

impl Trainer {
    pub fn new(cfg: TrainConfig) -> Result<Self> {
        let model = Model::new(&cfg)?;
        Self::with_model(cfg, model)
    }

    pub fn with_model(cfg: TrainConfig, model: Model) -> Result<Self> {
        cfg.validate()?;
        let mut sizes: Vec<usize> = model.logits.trainable().map(|_| VIEWS).collect();
        sizes.extend(model.net.param_sizes());
        let adam = Adam::new(cfg.adam, &sizes);
        Ok(Self {
            cfg,
            model,
            adam,
            epoch: 0,
            history: Vec::new(),
        })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn into_model(self) -> Model {
        self.model
    }

    pub fn history(&self) -> &[EpochRecord] {
        &self.history
    }

    pub fn config(&self) -> &TrainConfig {
        &self.cfg
    }

    /// Runs one epoch over `train_set`, scoring `val_set` afterwards.
    pub fn run_epoch(&mut self, train_set: &[LightField], val_set: &[LightField]) -> Result<EpochRecord> {
        check_dataset(train_set)?;
        let s = self.model.s;
        let epoch = self.epoch;
        let mut order: Vec<usize> = (0..train_set.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed ^ (epoch as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        order.shuffle(&mut rng);

        let mut loss_sum = 0.0;
        let mut events_sum = 0.0;
        for batch in order.chunks(self.cfg.batch_size) {
            let (loss, events) = self.step(train_set, batch, epoch)?;
            loss_sum += loss;
            events_sum += events;
        }

        let val_loss = if val_set.is_empty() {
            None
        } else {
            Some(self.validation_loss(val_set)?)
        };
        let patterns = self.model.patterns()?;
        let min_transmittance = patterns
            .iter()
            .map(|p| p.transmittance() / VIEWS as f64)
            .fold(f64::INFINITY, f64::min);
        let record = EpochRecord {
            epoch,
            loss: loss_sum / train_set.len() as f64,
            val_loss,
            s,
            events_per_pixel: events_sum / train_set.len() as f64,
            min_transmittance,
        };
        self.history.push(record);
        self.epoch += 1;
        self.model.s *= self.cfg.s_growth;
        Ok(record)
    }

    /// One optimizer step over the listed samples; returns summed loss and events/pixel.
    fn step(&mut self, dataset: &[LightField], batch: &[usize], epoch: usize) -> Result<(f64, f64)> {
        let s = self.model.s;
        let patterns = self.model.patterns()?;
        let model = self.cfg.mode.event_model();
        let scale = 1.0 / batch.len() as f64;
        self.model.net.zero_grad();
        let mut grad_patterns = vec![[0.0; VIEWS]; patterns.len()];
        let mut loss_sum = 0.0;
        let mut events_sum = 0.0;

        for &i in batch {
            let lf = &dataset[i];
            let draw = (epoch * dataset.len() + i) as u64;
            let pass = AcquisitionPass::forward(
                lf,
                &patterns,
                &self.cfg.sensor,
                model,
                Quantizer::StraightThrough,
                draw,
            )?;
            let (w, h) = (lf.width(), lf.height());
            let input = Tensor::new(&[patterns.len() - 1, h, w], pass.stacked_events())?;
            let output = self.model.net.forward(&input)?;
            let target = Tensor::new(&[VIEWS, h, w], lf.to_view_stack())?;
            let (loss, mut grad) = mse_loss(&output, &target)?;
            grad.data_mut().iter_mut().for_each(|g| *g *= scale);
            let grad_input = self.model.net.backward(&grad)?;
            let gp = pass.backward(lf, grad_input.data(), &self.cfg.sensor)?;
            for (acc, g) in grad_patterns.iter_mut().zip(&gp) {
                acc.iter_mut().zip(g).for_each(|(a, g)| *a += g);
            }
            loss_sum += loss;
            events_sum += pass.events_per_pixel();
        }
        if !loss_sum.is_finite() {
            return Err(Error::NonFinite);
        }

        // chain through a = sigmoid(s * logit)
        let trainable: Vec<usize> = self.model.logits.trainable().collect();
        let logit_grads: Vec<[f64; VIEWS]> = trainable
            .iter()
            .map(|&n| {
                let a = patterns[n].values();
                core::array::from_fn(|k| s * a[k] * (1.0 - a[k]) * grad_patterns[n][k])
            })
            .collect();

        let Model { logits, net, .. } = &mut self.model;
        let groups = logits
            .trainable_grids_mut()
            .zip(logit_grads.iter())
            .map(|(p, g)| (&mut p[..], &g[..]))
            .chain(net.params_and_grads());
        self.adam.step(groups)?;
        Ok((loss_sum, events_sum))
    }

    fn validation_loss(&mut self, val_set: &[LightField]) -> Result<f64> {
        let mut rec = Reconstructor::from_model(&self.model)?;
        let mut total = 0.0;
        for (i, lf) in val_set.iter().enumerate() {
            let (out, _) = rec.reconstruct(lf, &self.cfg.sensor, EVAL_DRAW_BASE + i as u64)?;
            total += crate::metrics::mse(lf.as_slice(), out.as_slice())?;
        }
        Ok(total / val_set.len() as f64)
    }
}

fn check_dataset(dataset: &[LightField]) -> Result<()> {
    let first = dataset.first().ok_or(Error::Dataset("empty dataset"))?;
    if dataset
        .iter()
        .any(|lf| lf.width() != first.width() || lf.height() != first.height())
    {
        return Err(Error::Dataset("samples differ in size"));
    }
    Ok(())
}

/// Output of [`train`].
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: Model,
    pub history: Vec<EpochRecord>,
}

/// Trains on the first 90% of `dataset`, validating on the rest.
pub fn train(dataset: &[LightField], cfg: &TrainConfig) -> Result<TrainOutcome> {
    train_with(dataset, cfg, |_| {})
}

/// [`train`] with a per-epoch callback.
pub fn train_with(
    dataset: &[LightField],
    cfg: &TrainConfig,
    mut on_epoch: impl FnMut(&EpochRecord),
) -> Result<TrainOutcome> {
    check_dataset(dataset)?;
    let split = dataset.len() - validation_len(dataset.len());
    let (train_set, val_set) = dataset.split_at(split);
    let mut trainer = Trainer::new(cfg.clone())?;
    for _ in 0..cfg.epochs {
        let record = trainer.run_epoch(train_set, val_set)?;
        on_epoch(&record);
    }
    let history = trainer.history.clone();
    Ok(TrainOutcome {
        model: trainer.into_model(),
        history,
    })
}
