//! Grayscale PNG output and the light-field directory layout:
//! `view_{u}_{v}.png` for the 64 views plus a `meta.json` with the size and
//! bit depth.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use celf_core::{LightField, VIEW_SIDE};
use serde_json::json;

use crate::formats::write_atomic;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    pub fn bits(self) -> u32 {
        match self {
            BitDepth::Eight => 8,
            BitDepth::Sixteen => 16,
        }
    }

    pub fn from_bits(bits: u64) -> Result<Self> {
        match bits {
            8 => Ok(BitDepth::Eight),
            16 => Ok(BitDepth::Sixteen),
            other => bail!("unsupported bit depth {other}"),
        }
    }

    fn max(self) -> f64 {
        match self {
            BitDepth::Eight => 255.0,
            BitDepth::Sixteen => 65535.0,
        }
    }
}

/// Encodes `[0, 1]` values as a grayscale PNG (values are clamped and rounded).
pub fn encode_gray(width: usize, height: usize, values: &[f64], depth: BitDepth) -> Result<Vec<u8>> {
    ensure!(values.len() == width * height, "image buffer has the wrong length");
    let mut out = Vec::new();
    let mut enc = png::Encoder::new(&mut out, u32::try_from(width)?, u32::try_from(height)?);
    enc.set_color(png::ColorType::Grayscale);
    let quantize = |v: f64| (v.clamp(0.0, 1.0) * depth.max()).round();
    let data: Vec<u8> = match depth {
        BitDepth::Eight => {
            enc.set_depth(png::BitDepth::Eight);
            values.iter().map(|&v| quantize(v) as u8).collect()
        }
        BitDepth::Sixteen => {
            enc.set_depth(png::BitDepth::Sixteen);
            values.iter().flat_map(|&v| (quantize(v) as u16).to_be_bytes()).collect()
        }
    };
    let mut writer = enc.write_header()?;
    writer.write_image_data(&data)?;
    writer.finish()?;
    Ok(out)
}

/// Decodes an 8- or 16-bit grayscale PNG into `[0, 1]` values.
pub fn decode_gray(bytes: &[u8]) -> Result<(usize, usize, BitDepth, Vec<f64>)> {
    let decoder = png::Decoder::new(Cursor::new(bytes));
    let mut reader = decoder.read_info()?;
    let mut buf = vec![0; reader.output_buffer_size().context("PNG too large")?];
    let info = reader.next_frame(&mut buf)?;
    ensure!(info.color_type == png::ColorType::Grayscale, "expected a grayscale PNG");
    let (w, h) = (info.width as usize, info.height as usize);
    let data = &buf[..info.buffer_size()];
    let (depth, values) = match info.bit_depth {
        png::BitDepth::Eight => (BitDepth::Eight, data.iter().map(|&b| b as f64 / 255.0).collect()),
        png::BitDepth::Sixteen => (
            BitDepth::Sixteen,
            data.chunks_exact(2)
                .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 / 65535.0)
                .collect(),
        ),
        other => bail!("unsupported PNG bit depth {other:?}"),
    };
    Ok((w, h, depth, values))
}

pub fn write_gray(path: &Path, width: usize, height: usize, values: &[f64], depth: BitDepth) -> Result<()> {
    let bytes = encode_gray(width, height, values, depth)?;
    write_atomic(path, &bytes).with_context(|| format!("writing {}", path.display()))
}

pub fn view_file_name(u: usize, v: usize) -> String {
    format!("view_{u}_{v}.png")
}

pub fn write_lightfield_dir(dir: &Path, lf: &LightField, depth: BitDepth) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for v in 0..VIEW_SIDE {
        for u in 0..VIEW_SIDE {
            write_gray(&dir.join(view_file_name(u, v)), lf.width(), lf.height(), &lf.view(u, v), depth)?;
        }
    }
    let meta = json!({
        "width": lf.width(),
        "height": lf.height(),
        "bit_depth": depth.bits(),
    });
    write_atomic(&dir.join("meta.json"), serde_json::to_string_pretty(&meta)?.as_bytes())?;
    Ok(())
}

pub fn read_lightfield_dir(dir: &Path) -> Result<LightField> {
    let meta_path = dir.join("meta.json");
    let meta: serde_json::Value = serde_json::from_slice(
        &fs::read(&meta_path).with_context(|| format!("reading {}", meta_path.display()))?,
    )
    .with_context(|| format!("parsing {}", meta_path.display()))?;
    let field = |key: &str| {
        meta.get(key)
            .and_then(serde_json::Value::as_u64)
            .with_context(|| format!("meta.json lacks an integer `{key}`"))
    };
    let (width, height) = (field("width")? as usize, field("height")? as usize);
    let depth = BitDepth::from_bits(field("bit_depth")?)?;

    let mut stack = Vec::with_capacity(width * height * VIEW_SIDE * VIEW_SIDE);
    for v in 0..VIEW_SIDE {
        for u in 0..VIEW_SIDE {
            let path = dir.join(view_file_name(u, v));
            let bytes = fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
            let (w, h, d, values) = decode_gray(&bytes).with_context(|| format!("decoding {}", path.display()))?;
            ensure!(w == width && h == height, "{} is {w}x{h}, meta says {width}x{height}", path.display());
            ensure!(d == depth, "{} has a different bit depth than meta.json", path.display());
            stack.extend(values);
        }
    }
    Ok(LightField::from_view_stack(width, height, &stack)?)
}

/// Horizontal epipolar-plane image at row `y`, view row `v`: one line per `u`.
pub fn epi_horizontal(lf: &LightField, y: usize, v: usize) -> (usize, usize, Vec<f64>) {
    let mut out = Vec::with_capacity(lf.width() * VIEW_SIDE);
    for u in 0..VIEW_SIDE {
        out.extend((0..lf.width()).map(|x| lf.get(x, y, u, v)));
    }
    (lf.width(), VIEW_SIDE, out)
}

/// Vertical epipolar-plane image at column `x`, view column `u`: one column per `v`.
pub fn epi_vertical(lf: &LightField, x: usize, u: usize) -> (usize, usize, Vec<f64>) {
    let mut out = Vec::with_capacity(lf.height() * VIEW_SIDE);
    for y in 0..lf.height() {
        out.extend((0..VIEW_SIDE).map(|v| lf.get(x, y, u, v)));
    }
    (VIEW_SIDE, lf.height(), out)
}
