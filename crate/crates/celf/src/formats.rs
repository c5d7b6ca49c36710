//! Little-endian binary containers. Every file opens with an 8-byte magic
//! whose last character is the format version.
//!
//! | magic      | payload                                                        |
//! |------------|----------------------------------------------------------------|
//! | `CELF-LF4` | u32 W, u32 H, W*H*64 f32 in `(y, x, v, u)` order               |
//! | `CELF-EV1` | u16 W, u16 H, u64 count, records of u16 x, u16 y, u32 t, i8 p  |
//! | `CELF-EI1` | u16 W, u16 H, u8 transition, W*H i16                           |
//! | `CELF-NN1` | u32 layers, per layer u32 C_in, u32 C_out, f32 weights, f32 bias |
//! | `CELF-AP1` | u32 N, N*64 f32                                                |
//!
//! Reals are stored as f32, so encoding an in-memory value is exact only
//! when it is already f32-representable; decoding then re-encoding is
//! always byte-identical.

use std::fs;
use std::io::Write;
use std::path::Path;

use celf_core::nn::{Conv2d, ReconNet, KERNEL};
use celf_core::sensor::{EventRecord, Transition};
use celf_core::{AperturePattern, EventImage, EventStream, LightField, VIEWS};

pub const LF_MAGIC: &[u8; 8] = b"CELF-LF4";
pub const EV_MAGIC: &[u8; 8] = b"CELF-EV1";
pub const EI_MAGIC: &[u8; 8] = b"CELF-EI1";
pub const NN_MAGIC: &[u8; 8] = b"CELF-NN1";
pub const AP_MAGIC: &[u8; 8] = b"CELF-AP1";

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("bad magic: expected {expected}, found {found:?}")]
    Magic { expected: &'static str, found: String },
    #[error("file truncated: needed {needed} more bytes at offset {offset}")]
    Truncated { offset: usize, needed: usize },
    #[error("{0} trailing bytes after payload")]
    Trailing(usize),
    #[error("value out of range: {0}")]
    Range(&'static str),
    #[error(transparent)]
    Core(#[from] celf_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, FormatError>;

/// Which container a file holds, by magic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    LightField,
    EventStream,
    EventImage,
    Network,
    Patterns,
}

impl Kind {
    pub fn detect(bytes: &[u8]) -> Option<Kind> {
        let magic = bytes.get(..8)?;
        [
            (LF_MAGIC, Kind::LightField),
            (EV_MAGIC, Kind::EventStream),
            (EI_MAGIC, Kind::EventImage),
            (NN_MAGIC, Kind::Network),
            (AP_MAGIC, Kind::Patterns),
        ]
        .into_iter()
        .find(|(m, _)| magic == &m[..])
        .map(|(_, k)| k)
    }

    pub fn magic(self) -> &'static str {
        let m = match self {
            Kind::LightField => LF_MAGIC,
            Kind::EventStream => EV_MAGIC,
            Kind::EventImage => EI_MAGIC,
            Kind::Network => NN_MAGIC,
            Kind::Patterns => AP_MAGIC,
        };
        std::str::from_utf8(m).expect("ascii magic")
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8], magic: &'static [u8; 8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        let found = r.take(8)?;
        if found != magic {
            return Err(FormatError::Magic {
                expected: std::str::from_utf8(magic).expect("ascii magic"),
                found: String::from_utf8_lossy(found).into_owned(),
            });
        }
        Ok(r)
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let rest = self.bytes.len() - self.pos;
        if n > rest {
            return Err(FormatError::Truncated {
                offset: self.pos,
                needed: n - rest,
            });
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.array::<1>()?[0])
    }

    fn i8(&mut self) -> Result<i8> {
        Ok(i8::from_le_bytes(self.array()?))
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.array()?))
    }

    fn i16(&mut self) -> Result<i16> {
        Ok(i16::from_le_bytes(self.array()?))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }

    fn f32s(&mut self, n: usize) -> Result<Vec<f64>> {
        let raw = self.take(n.checked_mul(4).ok_or(FormatError::Range("length overflow"))?)?;
        Ok(raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("chunk of 4")) as f64)
            .collect())
    }

    /// Fails unless at least `n` more bytes remain; guards allocations.
    fn expect_at_least(&self, n: u128) -> Result<()> {
        let rest = (self.bytes.len() - self.pos) as u128;
        if n > rest {
            return Err(FormatError::Truncated {
                offset: self.pos,
                needed: usize::try_from(n - rest).unwrap_or(usize::MAX),
            });
        }
        Ok(())
    }

    fn finish(self) -> Result<()> {
        match self.bytes.len() - self.pos {
            0 => Ok(()),
            n => Err(FormatError::Trailing(n)),
        }
    }
}

fn put_f32s(out: &mut Vec<u8>, values: &[f64]) {
    for &v in values {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
}

pub fn encode_lightfield(lf: &LightField) -> Result<Vec<u8>> {
    let w = u32::try_from(lf.width()).map_err(|_| FormatError::Range("width"))?;
    let h = u32::try_from(lf.height()).map_err(|_| FormatError::Range("height"))?;
    let mut out = Vec::with_capacity(16 + lf.as_slice().len() * 4);
    out.extend_from_slice(LF_MAGIC);
    out.extend_from_slice(&w.to_le_bytes());
    out.extend_from_slice(&h.to_le_bytes());
    put_f32s(&mut out, lf.as_slice());
    Ok(out)
}

pub fn decode_lightfield(bytes: &[u8]) -> Result<LightField> {
    let mut r = Reader::new(bytes, LF_MAGIC)?;
    let w = r.u32()? as usize;
    let h = r.u32()? as usize;
    let n = (w as u128) * (h as u128) * VIEWS as u128;
    r.expect_at_least(n * 4)?;
    let data = r.f32s(n as usize)?;
    r.finish()?;
    Ok(LightField::from_vec(w, h, data)?)
}

pub fn encode_stream(stream: &EventStream) -> Vec<u8> {
    let mut out = Vec::with_capacity(20 + stream.len() * 9);
    out.extend_from_slice(EV_MAGIC);
    out.extend_from_slice(&stream.width().to_le_bytes());
    out.extend_from_slice(&stream.height().to_le_bytes());
    out.extend_from_slice(&(stream.len() as u64).to_le_bytes());
    for rec in stream.records() {
        out.extend_from_slice(&rec.x.to_le_bytes());
        out.extend_from_slice(&rec.y.to_le_bytes());
        out.extend_from_slice(&rec.t.to_le_bytes());
        out.extend_from_slice(&rec.polarity.to_le_bytes());
    }
    out
}

pub fn decode_stream(bytes: &[u8]) -> Result<EventStream> {
    let mut r = Reader::new(bytes, EV_MAGIC)?;
    let w = r.u16()?;
    let h = r.u16()?;
    let count = r.u64()?;
    r.expect_at_least(count as u128 * 9)?;
    let mut records = Vec::with_capacity(count as usize);
    for _ in 0..count {
        records.push(EventRecord {
            x: r.u16()?,
            y: r.u16()?,
            t: r.u32()?,
            polarity: r.i8()?,
        });
    }
    r.finish()?;
    Ok(EventStream::new(w, h, records)?)
}

/// Transition byte: `k` for `(k, k+1)`, 0 when the image carries no label.
fn transition_byte(t: Option<Transition>) -> Result<u8> {
    match t {
        None => Ok(0),
        Some(t) if t.to == t.from + 1 => u8::try_from(t.from).map_err(|_| FormatError::Range("transition index")),
        Some(_) => Err(FormatError::Range("only consecutive transitions can be stored")),
    }
}

pub fn encode_event_image(img: &EventImage) -> Result<Vec<u8>> {
    let w = u16::try_from(img.width()).map_err(|_| FormatError::Range("width"))?;
    let h = u16::try_from(img.height()).map_err(|_| FormatError::Range("height"))?;
    let mut out = Vec::with_capacity(13 + img.as_slice().len() * 2);
    out.extend_from_slice(EI_MAGIC);
    out.extend_from_slice(&w.to_le_bytes());
    out.extend_from_slice(&h.to_le_bytes());
    out.push(transition_byte(img.transition())?);
    for &e in img.as_slice() {
        let e = i16::try_from(e).map_err(|_| FormatError::Range("event count exceeds i16"))?;
        out.extend_from_slice(&e.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_event_image(bytes: &[u8]) -> Result<EventImage> {
    let mut r = Reader::new(bytes, EI_MAGIC)?;
    let w = r.u16()? as usize;
    let h = r.u16()? as usize;
    let t = r.u8()?;
    r.expect_at_least((w * h) as u128 * 2)?;
    let data = (0..w * h).map(|_| r.i16().map(i32::from)).collect::<Result<Vec<_>>>()?;
    r.finish()?;
    let transition = (t > 0).then(|| Transition::consecutive(t as usize));
    Ok(EventImage::from_vec(w, h, data, transition)?)
}

pub fn encode_network(net: &ReconNet) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(NN_MAGIC);
    out.extend_from_slice(&(net.convs().count() as u32).to_le_bytes());
    for conv in net.convs() {
        out.extend_from_slice(&(conv.in_channels() as u32).to_le_bytes());
        out.extend_from_slice(&(conv.out_channels() as u32).to_le_bytes());
        put_f32s(&mut out, conv.weight.data());
        put_f32s(&mut out, conv.bias.data());
    }
    out
}

pub fn decode_network(bytes: &[u8]) -> Result<ReconNet> {
    let mut r = Reader::new(bytes, NN_MAGIC)?;
    let layers = r.u32()?;
    let mut convs = Vec::new();
    for _ in 0..layers {
        let c_in = r.u32()? as usize;
        let c_out = r.u32()? as usize;
        let n = c_in as u128 * c_out as u128 * (KERNEL * KERNEL) as u128;
        r.expect_at_least((n + c_out as u128) * 4)?;
        let weights = r.f32s(n as usize)?;
        let bias = r.f32s(c_out)?;
        convs.push(Conv2d::from_parts(c_in, c_out, weights, bias)?);
    }
    r.finish()?;
    Ok(ReconNet::from_convs(convs)?)
}

pub fn encode_patterns(patterns: &[AperturePattern]) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + patterns.len() * VIEWS * 4);
    out.extend_from_slice(AP_MAGIC);
    out.extend_from_slice(&(patterns.len() as u32).to_le_bytes());
    for p in patterns {
        put_f32s(&mut out, p.values());
    }
    out
}

pub fn decode_patterns(bytes: &[u8]) -> Result<Vec<AperturePattern>> {
    let mut r = Reader::new(bytes, AP_MAGIC)?;
    let n = r.u32()? as usize;
    r.expect_at_least(n as u128 * VIEWS as u128 * 4)?;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(AperturePattern::from_slice(&r.f32s(VIEWS)?)?);
    }
    r.finish()?;
    Ok(out)
}

/// Writes through a temporary file in the destination directory and
/// renames it into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn read_lightfield(path: &Path) -> Result<LightField> {
    decode_lightfield(&fs::read(path)?)
}

pub fn write_lightfield(path: &Path, lf: &LightField) -> Result<()> {
    Ok(write_atomic(path, &encode_lightfield(lf)?)?)
}

pub fn read_stream(path: &Path) -> Result<EventStream> {
    decode_stream(&fs::read(path)?)
}

pub fn write_stream(path: &Path, stream: &EventStream) -> Result<()> {
    Ok(write_atomic(path, &encode_stream(stream))?)
}

pub fn read_event_image(path: &Path) -> Result<EventImage> {
    decode_event_image(&fs::read(path)?)
}

pub fn write_event_image(path: &Path, img: &EventImage) -> Result<()> {
    Ok(write_atomic(path, &encode_event_image(img)?)?)
}

pub fn read_network(path: &Path) -> Result<ReconNet> {
    decode_network(&fs::read(path)?)
}

pub fn write_network(path: &Path, net: &ReconNet) -> Result<()> {
    Ok(write_atomic(path, &encode_network(net))?)
}

pub fn read_patterns(path: &Path) -> Result<Vec<AperturePattern>> {
    decode_patterns(&fs::read(path)?)
}

pub fn write_patterns(path: &Path, patterns: &[AperturePattern]) -> Result<()> {
    Ok(write_atomic(path, &encode_patterns(patterns))?)
}
