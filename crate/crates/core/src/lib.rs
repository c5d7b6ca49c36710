//! Event-based coded-aperture light-field acquisition.
//!
//! A light field is imaged through a sequence of 8x8 aperture codes; an event
//! sensor reports only the signed, quantized log-intensity changes between
//! successive codes. This crate simulates that acquisition, inverts it
//! analytically when one code is black, and trains the codes jointly with a
//! convolutional reconstruction network.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod algebra;
pub mod error;
pub mod lightfield;
pub mod metrics;
pub mod nn;
pub mod sensor;
pub mod synth;
pub mod train;

pub use error::{Error, Result};
pub use lightfield::{code_image, normalize, AperturePattern, CodedImage, LightField, VIEWS, VIEW_SIDE};
pub use sensor::{EventImage, EventModel, EventStream, SensorConfig};
