//! Joint optimization of aperture codes and the reconstruction network.

mod acquisition;
mod patterns;
mod trainer;

pub use acquisition::AcquisitionPass;
pub use patterns::{binarize_patterns, patterns_from_logits, PatternLogits};
pub use trainer::{
    constant_predictor_mse, train, train_with, validation_len, EpochRecord, Evaluation, Model,
    EVAL_DRAW_BASE,
    Reconstructor, TrainConfig, TrainMode, TrainOutcome, Trainer,
};
