//! Synthetic layered light fields.
//!
//! Each scene is a stack of fronto-parallel planes at distinct integer
//! disparities. Planes carry three-octave value-noise textures; every plane
//! except the farthest is cut to an elliptical support, so nearer planes
//! occlude farther ones. View `(u, v)` shows a plane of disparity `d`
//! translated by `(d (u - 4), d (v - 4))`, with edge clamping outside the
//! frame.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lightfield::{LightField, VIEWS, VIEW_SIDE};

/// Disparities are drawn from `-MAX_DISPARITY..=MAX_DISPARITY`.
pub const MAX_DISPARITY: i32 = 3;
const CENTER_VIEW: i32 = (VIEW_SIDE / 2) as i32;
const OCTAVE_CELLS: [f64; 3] = [16.0, 8.0, 4.0];
const OCTAVE_WEIGHTS: [f64; 3] = [1.0, 0.5, 0.25];

/// `layers` distinct disparities chosen deterministically from `seed`, sorted ascending.
pub fn choose_disparities(seed: u64, layers: usize) -> Result<Vec<i32>> {
    let choices = (2 * MAX_DISPARITY + 1) as usize;
    if layers == 0 || layers > choices {
        return Err(Error::InvalidArgument("layer count must be in 1..=7"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xd15a_417e);
    let mut pool: Vec<i32> = (-MAX_DISPARITY..=MAX_DISPARITY).collect();
    // partial Fisher-Yates
    for i in 0..layers {
        let j = rng.random_range(i..pool.len());
        pool.swap(i, j);
    }
    let mut picked = pool[..layers].to_vec();
    picked.sort_unstable();
    Ok(picked)
}

/// Layered scene with disparities picked from the seed.
pub fn synth_lightfield(seed: u64, width: usize, height: usize, layers: usize) -> Result<LightField> {
    let disparities = choose_disparities(seed, layers)?;
    synth_lightfield_with(seed, width, height, &disparities)
}

/// Layered scene with explicit, distinct disparities (any order).
///
/// Larger disparity means nearer to the camera.
pub fn synth_lightfield_with(
    seed: u64,
    width: usize,
    height: usize,
    disparities: &[i32],
) -> Result<LightField> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidArgument("synthetic light field must be at least 1x1"));
    }
    if disparities.is_empty() {
        return Err(Error::InvalidArgument("at least one layer is required"));
    }
    let mut order: Vec<i32> = disparities.to_vec();
    order.sort_unstable();
    if order.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("layer disparities must be distinct"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // back to front
    let layers: Vec<Layer> = order
        .iter()
        .enumerate()
        .map(|(i, &d)| Layer::generate(&mut rng, width, height, d, i == 0))
        .collect();

    let clamp = |c: i64, n: usize| c.clamp(0, n as i64 - 1) as usize;
    let mut data = vec![0.0; width * height * VIEWS];
    for y in 0..height {
        for x in 0..width {
            let base = (y * width + x) * VIEWS;
            for v in 0..VIEW_SIDE {
                for u in 0..VIEW_SIDE {
                    let mut value = 0.0;
                    for layer in layers.iter().rev() {
                        let sx = clamp(x as i64 - layer.shift(u), width);
                        let sy = clamp(y as i64 - layer.shift(v), height);
                        let idx = sy * width + sx;
                        if layer.mask[idx] {
                            value = layer.texture[idx];
                            break;
                        }
                    }
                    data[base + v * VIEW_SIDE + u] = value;
                }
            }
        }
    }
    LightField::from_vec(width, height, data)
}

struct Layer {
    disparity: i32,
    texture: Vec<f64>,
    mask: Vec<bool>,
}

impl Layer {
    fn generate(rng: &mut ChaCha8Rng, width: usize, height: usize, disparity: i32, full: bool) -> Self {
        let brightness = rng.random_range(0.25..0.75);
        let contrast = rng.random_range(0.5..0.9);
        let noise = value_noise(rng, width, height);
        let texture = noise
            .into_iter()
            .map(|n| (brightness + contrast * (n - 0.5)).clamp(0.0, 1.0))
            .collect();

        let mask = if full {
            vec![true; width * height]
        } else {
            let cx = rng.random_range(0.25..0.75) * width as f64;
            let cy = rng.random_range(0.25..0.75) * height as f64;
            let rx = rng.random_range(0.25..0.45) * width as f64;
            let ry = rng.random_range(0.25..0.45) * height as f64;
            let mut mask = Vec::with_capacity(width * height);
            for y in 0..height {
                for x in 0..width {
                    let dx = (x as f64 + 0.5 - cx) / rx;
                    let dy = (y as f64 + 0.5 - cy) / ry;
                    mask.push(dx * dx + dy * dy <= 1.0);
                }
            }
            mask
        };
        Self {
            disparity,
            texture,
            mask,
        }
    }

    #[inline]
    fn shift(&self, view: usize) -> i64 {
        (self.disparity * (view as i32 - CENTER_VIEW)) as i64
    }
}

/// Sum of three value-noise octaves, rescaled into `[0, 1]`.
fn value_noise(rng: &mut ChaCha8Rng, width: usize, height: usize) -> Vec<f64> {
    let mut acc = vec![0.0; width * height];
    for (&cell, &weight) in OCTAVE_CELLS.iter().zip(&OCTAVE_WEIGHTS) {
        let gw = (width as f64 / cell) as usize + 2;
        let gh = (height as f64 / cell) as usize + 2;
        let lattice: Vec<f64> = (0..gw * gh).map(|_| rng.random::<f64>()).collect();
        for y in 0..height {
            let fy = y as f64 / cell;
            let iy = fy as usize;
            let ty = smoothstep(fy - iy as f64);
            for x in 0..width {
                let fx = x as f64 / cell;
                let ix = fx as usize;
                let tx = smoothstep(fx - ix as f64);
                let at = |i: usize, j: usize| lattice[j * gw + i];
                let top = at(ix, iy) * (1.0 - tx) + at(ix + 1, iy) * tx;
                let bottom = at(ix, iy + 1) * (1.0 - tx) + at(ix + 1, iy + 1) * tx;
                acc[y * width + x] += weight * (top * (1.0 - ty) + bottom * ty);
            }
        }
    }
    let total: f64 = OCTAVE_WEIGHTS.iter().sum();
    acc.iter_mut().for_each(|a| *a /= total);
    acc
}

#[inline]
fn smoothstep(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}
