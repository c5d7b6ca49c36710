//! Light-field data model and coded-aperture image formation.
//!
//! A light field is stored as 64-bit reals in `(y, x, v, u)` row-major order:
//! the 64 view samples of one pixel are contiguous, indexed `v * 8 + u`.
//! Aperture patterns use the same `v * 8 + u` layout so that forming a coded
//! image is one 64-element dot product per pixel.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure_dim, Error, Result};

/// Side length of the angular (view) grid.
pub const VIEW_SIDE: usize = 8;
/// Number of views, and the normalization divisor of coded images.
pub const VIEWS: usize = VIEW_SIDE * VIEW_SIDE;

#[inline]
pub const fn view_index(u: usize, v: usize) -> usize {
    v * VIEW_SIDE + u
}

/// A monochrome 4-D light field `L(x, y, u, v)` with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LightField {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl LightField {
    /// Wraps a buffer in canonical `(y, x, v, u)` order.
    pub fn from_vec(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument("light field must be at least 1x1"));
        }
        ensure_dim("light-field buffer length", width * height * VIEWS, data.len())?;
        for &value in &data {
            if !value.is_finite() {
                return Err(Error::NonFinite);
            }
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidArgument("light-field values must lie in [0, 1]"));
            }
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::from_vec(width, height, vec![value; width * height * VIEWS])
    }

    /// Builds a light field from a per-sample function `f(x, y, u, v)`.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * VIEWS);
        for y in 0..height {
            for x in 0..width {
                for v in 0..VIEW_SIDE {
                    for u in 0..VIEW_SIDE {
                        data.push(f(x, y, u, v));
                    }
                }
            }
        }
        Self::from_vec(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, u: usize, v: usize) -> f64 {
        self.data[((y * self.width + x) * VIEWS) + view_index(u, v)]
    }

    /// The 64 view samples at pixel `(x, y)`.
    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> &[f64] {
        let start = (y * self.width + x) * VIEWS;
        &self.data[start..start + VIEWS]
    }

    /// Sub-aperture image for view `(u, v)`, row-major `H x W`.
    pub fn view(&self, u: usize, v: usize) -> Vec<f64> {
        let k = view_index(u, v);
        self.data.chunks_exact(VIEWS).map(|px| px[k]).collect()
    }

    /// Channel-major `64 x H x W` layout, channel `v * 8 + u`.
    pub fn to_view_stack(&self) -> Vec<f64> {
        let plane = self.width * self.height;
        let mut out = vec![0.0; plane * VIEWS];
        for (p, px) in self.data.chunks_exact(VIEWS).enumerate() {
            for (k, &value) in px.iter().enumerate() {
                out[k * plane + p] = value;
            }
        }
        out
    }

    /// Inverse of [`LightField::to_view_stack`]; values are clamped into `[0, 1]`.
    pub fn from_view_stack(width: usize, height: usize, stack: &[f64]) -> Result<Self> {
        let plane = width * height;
        ensure_dim("view stack length", plane * VIEWS, stack.len())?;
        let mut data = vec![0.0; plane * VIEWS];
        for p in 0..plane {
            for k in 0..VIEWS {
                data[p * VIEWS + k] = stack[k * plane + p].clamp(0.0, 1.0);
            }
        }
        Self::from_vec(width, height, data)
    }

    /// `alpha * self + beta * other`, requiring a result inside `[0, 1]`.
    pub fn blend(&self, alpha: f64, other: &LightField, beta: f64) -> Result<Self> {
        ensure_dim("width", self.width, other.width)?;
        ensure_dim("height", self.height, other.height)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        Self::from_vec(self.width, self.height, data)
    }
}

/// An 8x8 aperture transmittance code, `a[v * 8 + u]` in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AperturePattern {
    values: [f64; VIEWS],
    binary: bool,
}

impl AperturePattern {
    pub fn new(values: [f64; VIEWS]) -> Result<Self> {
        for &a in &values {
            if !a.is_finite() {
                return Err(Error::NonFinite);
            }
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::InvalidArgument("transmittance must lie in [0, 1]"));
            }
        }
        let binary = values.iter().all(|&a| a == 0.0 || a == 1.0);
        Ok(Self { values, binary })
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        ensure_dim("pattern length", VIEWS, values.len())?;
        let mut buf = [0.0; VIEWS];
        buf.copy_from_slice(values);
        Self::new(buf)
    }

    pub fn black() -> Self {
        Self {
            values: [0.0; VIEWS],
            binary: true,
        }
    }

    pub fn open() -> Self {
        Self {
            values: [1.0; VIEWS],
            binary: true,
        }
    }

    pub fn one_hot(u: usize, v: usize) -> Self {
        let mut values = [0.0; VIEWS];
        values[view_index(u, v)] = 1.0;
        Self {
            values,
            binary: true,
        }
    }

    pub fn values(&self) -> &[f64; VIEWS] {
        &self.values
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.values[view_index(u, v)]
    }

    /// True when every element is exactly 0 or 1.
    pub fn is_binary(&self) -> bool {
        self.binary
    }

    pub fn is_black(&self) -> bool {
        self.values.iter().all(|&a| a == 0.0)
    }

    pub fn transmittance(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// A coded sensor image `I(x, y)`, or its view-normalized form `I / 64`.
#[derive(Debug, Clone, PartialEq)]
pub struct CodedImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
    normalized: bool,
}

impl CodedImage {
    pub fn from_vec(width: usize, height: usize, data: Vec<f64>, normalized: bool) -> Result<Self> {
        ensure_dim("coded-image buffer length", width * height, data.len())?;
        for &value in &data {
            if !value.is_finite() {
                return Err(Error::NonFinite);
            }
            if value < 0.0 || (normalized && value > 1.0) {
                return Err(Error::InvalidArgument("coded-image value out of range"));
            }
        }
        Ok(Self {
            width,
            height,
            data,
            normalized,
        })
    }

    pub fn zeros(width: usize, height: usize, normalized: bool) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height],
            normalized,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub(crate) fn ensure_normalized(&self) -> Result<()> {
        if self.normalized {
            Ok(())
        } else {
            Err(Error::Normalization {
                expected_normalized: true,
            })
        }
    }

    pub(crate) fn ensure_same_size(&self, width: usize, height: usize) -> Result<()> {
        ensure_dim("width", width, self.width)?;
        ensure_dim("height", height, self.height)
    }
}

/// Coded image under `pattern`: `I(x, y) = sum_{u,v} a(u, v) L(x, y, u, v)`.
pub fn code_image(lf: &LightField, pattern: &AperturePattern) -> CodedImage {
    let a = pattern.values();
    let data = lf
        .data
        .chunks_exact(VIEWS)
        .map(|px| px.iter().zip(a).map(|(l, a)| l * a).sum())
        .collect();
    CodedImage {
        width: lf.width,
        height: lf.height,
        data,
        normalized: false,
    }
}

/// Divides by the number of views.
pub fn normalize(img: &CodedImage) -> Result<CodedImage> {
    if img.normalized {
        return Err(Error::Normalization {
            expected_normalized: false,
        });
    }
    let data = img
        .data
        .iter()
        .map(|&i| (i / VIEWS as f64).min(1.0))
        .collect();
    Ok(CodedImage {
        width: img.width,
        height: img.height,
        data,
        normalized: true,
    })
}

/// Shorthand for `normalize(code_image(lf, pattern))`.
pub fn code_image_normalized(lf: &LightField, pattern: &AperturePattern) -> CodedImage {
    let mut img = code_image(lf, pattern);
    for value in &mut img.data {
        *value = (*value / VIEWS as f64).min(1.0);
    }
    img.normalized = true;
    img
}

/// Top-left corner of every patch produced by [`extract_patches`], in order.
pub fn patch_origins(
    width: usize,
    height: usize,
    size: usize,
    stride: usize,
) -> Result<Vec<(usize, usize)>> {
    if size == 0 || stride == 0 {
        return Err(Error::InvalidArgument("patch size and stride must be positive"));
    }
    if size > width || size > height {
        return Err(Error::InvalidArgument("patch size exceeds the light field"));
    }
    let mut origins = Vec::new();
    for y0 in (0..=height - size).step_by(stride) {
        for x0 in (0..=width - size).step_by(stride) {
            origins.push((x0, y0));
        }
    }
    Ok(origins)
}

/// All `size x size` patches at the given stride, row by row.
pub fn extract_patches(lf: &LightField, size: usize, stride: usize) -> Result<Vec<LightField>> {
    let origins = patch_origins(lf.width, lf.height, size, stride)?;
    Ok(origins
        .into_iter()
        .map(|(x0, y0)| {
            let mut data = Vec::with_capacity(size * size * VIEWS);
            for y in y0..y0 + size {
                let row = (y * lf.width + x0) * VIEWS;
                data.extend_from_slice(&lf.data[row..row + size * VIEWS]);
            }
            LightField {
                width: size,
                height: size,
                data,
            }
        })
        .collect())
}

/// Places patches back at their origins. Later patches overwrite earlier ones
/// where they overlap; pixels no patch covers stay zero.
pub fn reassemble_patches(
    patches: &[LightField],
    width: usize,
    height: usize,
    stride: usize,
) -> Result<LightField> {
    let size = patches
        .first()
        .map(LightField::width)
        .ok_or(Error::InvalidArgument("no patches to reassemble"))?;
    let origins = patch_origins(width, height, size, stride)?;
    ensure_dim("patch count", origins.len(), patches.len())?;
    let mut data = vec![0.0; width * height * VIEWS];
    for (patch, (x0, y0)) in patches.iter().zip(origins) {
        ensure_dim("patch size", size, patch.width)?;
        ensure_dim("patch size", size, patch.height)?;
        for y in 0..size {
            let dst = ((y0 + y) * width + x0) * VIEWS;
            let src = y * size * VIEWS;
            data[dst..dst + size * VIEWS].copy_from_slice(&patch.data[src..src + size * VIEWS]);
        }
    }
    LightField::from_vec(width, height, data)
}
