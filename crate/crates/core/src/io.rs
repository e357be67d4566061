//! File formats: 8/16-bit binary PGM, 8/16-bit grayscale PNG, and raw
//! little-endian planes described by a JSON sidecar.
//!
//! A raw sidecar looks like
//!
//! ```json
//! {"width": 640, "height": 512, "bit_depth": 14, "endianness": "little",
//!  "pattern": "90,45;135,0", "planes": 1, "data": "frame.raw"}
//! ```
//!
//! `data` is resolved relative to the sidecar. Samples take one byte when
//! `bit_depth <= 8` and two otherwise. A ground-truth stack uses
//! `"planes": 4`: four planes back to back in the order 0, 45, 90, 135.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pfa::{ChannelStack, MosaicImage, PfaPattern};
use crate::plane::Plane;
use crate::stokes::RgbImage;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        source: image::ImageError,
    },
    #[error("{path}: invalid sidecar: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] crate::Error),
}

pub type IoResult<T> = std::result::Result<T, IoError>;

fn format_err(path: &Path, message: impl Into<String>) -> IoError {
    IoError::Format {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn read_bytes(path: &Path) -> IoResult<Vec<u8>> {
    fs::read(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_bytes(path: &Path, bytes: &[u8]) -> IoResult<()> {
    let io = |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = BufWriter::new(fs::File::create(path).map_err(io)?);
    f.write_all(bytes).map_err(io)?;
    f.flush().map_err(io)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Pgm,
    Png,
    /// Raw payload plus JSON sidecar; the path may name either file.
    RawJson,
}

impl FileFormat {
    pub fn from_path(path: &Path) -> IoResult<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase());
        match ext.as_deref() {
            Some("pgm") => Ok(FileFormat::Pgm),
            Some("png") => Ok(FileFormat::Png),
            Some("json") | Some("raw") => Ok(FileFormat::RawJson),
            _ => Err(format_err(
                path,
                "unknown extension; expected .pgm, .png, .json or .raw",
            )),
        }
    }
}

/// Sidecar describing a raw payload.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDescriptor {
    pub width: usize,
    pub height: usize,
    pub bit_depth: u8,
    #[serde(default = "little")]
    pub endianness: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    #[serde(default = "one")]
    pub planes: usize,
    pub data: String,
}

fn little() -> String {
    "little".into()
}

fn one() -> usize {
    1
}

impl RawDescriptor {
    pub fn bytes_per_sample(&self) -> usize {
        if self.bit_depth <= 8 {
            1
        } else {
            2
        }
    }

    pub fn payload_len(&self) -> usize {
        self.width * self.height * self.planes * self.bytes_per_sample()
    }
}

/// Integer export: round half to even, clamp to `[0, 2^bit_depth - 1]`.
#[inline]
pub fn quantize(v: f64, bit_depth: u8) -> u16 {
    let max = ((1u32 << bit_depth) - 1) as f64;
    if v.is_nan() {
        return 0;
    }
    v.round_ties_even().clamp(0.0, max) as u16
}

/// Sidecar and payload paths for a raw+json path naming either file.
pub fn raw_paths(path: &Path) -> (PathBuf, PathBuf) {
    (path.with_extension("json"), path.with_extension("raw"))
}

fn load_descriptor(path: &Path) -> IoResult<(RawDescriptor, PathBuf)> {
    let (json, _) = raw_paths(path);
    let text = read_bytes(&json)?;
    let desc: RawDescriptor = serde_json::from_slice(&text).map_err(|source| IoError::Json {
        path: json.clone(),
        source,
    })?;
    if desc.endianness != "little" {
        return Err(format_err(
            &json,
            "only little-endian payloads are supported",
        ));
    }
    if !(1..=16).contains(&desc.bit_depth) {
        return Err(format_err(
            &json,
            format!("unsupported bit depth {}", desc.bit_depth),
        ));
    }
    let payload = json.parent().unwrap_or(Path::new(".")).join(&desc.data);
    Ok((desc, payload))
}

/// Reads every plane of a raw+json container.
pub fn read_raw_planes(path: &Path) -> IoResult<(RawDescriptor, Vec<Plane>)> {
    let (desc, payload) = load_descriptor(path)?;
    let bytes = read_bytes(&payload)?;
    if bytes.len() != desc.payload_len() {
        return Err(format_err(
            &payload,
            format!(
                "payload has {} bytes, sidecar implies {}",
                bytes.len(),
                desc.payload_len()
            ),
        ));
    }
    let n = desc.width * desc.height;
    let samples: Vec<f64> = if desc.bytes_per_sample() == 1 {
        bytes.iter().map(|&b| b as f64).collect()
    } else {
        bytes
            .chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]) as f64)
            .collect()
    };
    let planes = samples
        .chunks_exact(n)
        .map(|c| Plane::new(desc.width, desc.height, c.to_vec()))
        .collect::<crate::Result<Vec<_>>>()?;
    Ok((desc, planes))
}

/// Writes planes as a raw+json container next to `path`.
pub fn write_raw_planes(
    path: &Path,
    planes: &[&Plane],
    bit_depth: u8,
    pattern: Option<PfaPattern>,
) -> IoResult<()> {
    let (json, raw) = raw_paths(path);
    let (w, h) = planes[0].dims();
    if planes.iter().any(|p| p.dims() != (w, h)) {
        return Err(format_err(path, "planes differ in size"));
    }
    let desc = RawDescriptor {
        width: w,
        height: h,
        bit_depth,
        endianness: little(),
        pattern: pattern.map(|p| p.to_string()),
        planes: planes.len(),
        data: raw
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| format_err(path, "non-UTF-8 file name"))?
            .to_string(),
    };
    let mut bytes = Vec::with_capacity(desc.payload_len());
    for p in planes {
        for &v in p.data() {
            let q = quantize(v, bit_depth);
            if desc.bytes_per_sample() == 1 {
                bytes.push(q as u8);
            } else {
                bytes.extend_from_slice(&q.to_le_bytes());
            }
        }
    }
    write_bytes(&raw, &bytes)?;
    let text = serde_json::to_string_pretty(&desc).expect("descriptor serializes");
    write_bytes(&json, text.as_bytes())
}

fn bits_for_max(maxval: u32) -> u8 {
    (32 - maxval.leading_zeros()) as u8
}

/// Parses a binary (P5) PGM; returns the plane and the bit depth implied by
/// its maxval.
pub fn read_pgm(path: &Path) -> IoResult<(Plane, u8)> {
    let bytes = read_bytes(path)?;
    let mut pos = 0;
    let token = |pos: &mut usize| -> IoResult<String> {
        loop {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if *pos < bytes.len() && bytes[*pos] == b'#' {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
                continue;
            }
            break;
        }
        let start = *pos;
        while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if start == *pos {
            return Err(format_err(path, "truncated PGM header"));
        }
        Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    };
    if token(&mut pos)? != "P5" {
        return Err(format_err(path, "not a binary PGM (P5)"));
    }
    let num = |pos: &mut usize| -> IoResult<u32> {
        token(pos)?
            .parse()
            .map_err(|_| format_err(path, "malformed PGM header"))
    };
    let width = num(&mut pos)? as usize;
    let height = num(&mut pos)? as usize;
    let maxval = num(&mut pos)?;
    if maxval == 0 || maxval > 65535 {
        return Err(format_err(path, format!("invalid maxval {maxval}")));
    }
    pos += 1; // single whitespace byte before the raster
    let bps = if maxval < 256 { 1 } else { 2 };
    let need = width * height * bps;
    let raster = bytes
        .get(pos..pos + need)
        .ok_or_else(|| format_err(path, "truncated PGM raster"))?;
    let data = if bps == 1 {
        raster.iter().map(|&b| b as f64).collect()
    } else {
        raster
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64)
            .collect()
    };
    Ok((Plane::new(width, height, data)?, bits_for_max(maxval)))
}

pub fn write_pgm(path: &Path, plane: &Plane, bit_depth: u8) -> IoResult<()> {
    let maxval = (1u32 << bit_depth) - 1;
    let mut bytes = format!("P5\n{} {}\n{}\n", plane.width(), plane.height(), maxval).into_bytes();
    for &v in plane.data() {
        let q = quantize(v, bit_depth);
        if maxval < 256 {
            bytes.push(q as u8);
        } else {
            bytes.extend_from_slice(&q.to_be_bytes());
        }
    }
    write_bytes(path, &bytes)
}

/// Reads an 8- or 16-bit grayscale PNG.
pub fn read_png(path: &Path) -> IoResult<(Plane, u8)> {
    let img = image::open(path).map_err(|source| IoError::Image {
        path: path.to_path_buf(),
        source,
    })?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    match img {
        image::DynamicImage::ImageLuma8(buf) => Ok((
            Plane::new(w, h, buf.into_raw().into_iter().map(f64::from).collect())?,
            8,
        )),
        image::DynamicImage::ImageLuma16(buf) => Ok((
            Plane::new(w, h, buf.into_raw().into_iter().map(f64::from).collect())?,
            16,
        )),
        _ => Err(format_err(path, "expected a single-channel grayscale PNG")),
    }
}

/// 16-bit grayscale PNG, samples quantized to `bit_depth`.
pub fn write_png16(path: &Path, plane: &Plane, bit_depth: u8) -> IoResult<()> {
    let data: Vec<u16> = plane
        .data()
        .iter()
        .map(|&v| quantize(v, bit_depth))
        .collect();
    let buf = image::ImageBuffer::<image::Luma<u16>, _>::from_raw(
        plane.width() as u32,
        plane.height() as u32,
        data,
    )
    .expect("buffer matches dimensions");
    buf.save(path).map_err(|source| IoError::Image {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_png8(path: &Path, plane: &Plane) -> IoResult<()> {
    let data: Vec<u8> = plane.data().iter().map(|&v| quantize(v, 8) as u8).collect();
    let buf = image::GrayImage::from_raw(plane.width() as u32, plane.height() as u32, data)
        .expect("buffer matches dimensions");
    buf.save(path).map_err(|source| IoError::Image {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_rgb_png(path: &Path, rgb: &RgbImage) -> IoResult<()> {
    let buf = image::RgbImage::from_raw(rgb.width as u32, rgb.height as u32, rgb.data.clone())
        .expect("buffer matches dimensions");
    buf.save(path).map_err(|source| IoError::Image {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a mosaic. `pattern` and `bit_depth` override the file's metadata;
/// PGM and PNG carry no pattern, so they fall back to the default tile.
pub fn read_mosaic(
    path: &Path,
    pattern: Option<PfaPattern>,
    bit_depth: Option<u8>,
) -> IoResult<MosaicImage> {
    let (plane, depth, file_pattern) = match FileFormat::from_path(path)? {
        FileFormat::Pgm => {
            let (p, d) = read_pgm(path)?;
            (p, d, None)
        }
        FileFormat::Png => {
            let (p, d) = read_png(path)?;
            (p, d, None)
        }
        FileFormat::RawJson => {
            let (desc, mut planes) = read_raw_planes(path)?;
            if desc.planes != 1 {
                return Err(format_err(
                    path,
                    format!("expected 1 plane, sidecar has {}", desc.planes),
                ));
            }
            let pat = desc
                .pattern
                .as_deref()
                .map(str::parse::<PfaPattern>)
                .transpose()?;
            (planes.remove(0), desc.bit_depth, pat)
        }
    };
    let pattern = pattern.or(file_pattern).unwrap_or_default();
    Ok(MosaicImage::new(
        plane,
        bit_depth.unwrap_or(depth),
        pattern,
    )?)
}

/// Writes a mosaic in the format implied by the extension.
pub fn write_mosaic(path: &Path, img: &MosaicImage) -> IoResult<()> {
    match FileFormat::from_path(path)? {
        FileFormat::Pgm => write_pgm(path, img.plane(), img.bit_depth()),
        FileFormat::Png if img.bit_depth() <= 8 => write_png8(path, img.plane()),
        FileFormat::Png => write_png16(path, img.plane(), img.bit_depth()),
        FileFormat::RawJson => {
            write_raw_planes(path, &[img.plane()], img.bit_depth(), Some(img.pattern()))
        }
    }
}

/// Reads a four-plane container; returns the stack and its bit depth.
pub fn read_stack(path: &Path) -> IoResult<(ChannelStack, u8)> {
    let (desc, planes) = read_raw_planes(path)?;
    if desc.planes != 4 {
        return Err(format_err(
            path,
            format!("expected 4 planes, sidecar has {}", desc.planes),
        ));
    }
    let planes: [Plane; 4] = planes.try_into().expect("four planes");
    Ok((ChannelStack::new(planes)?, desc.bit_depth))
}

pub fn write_stack(path: &Path, stack: &ChannelStack, bit_depth: u8) -> IoResult<()> {
    let refs: Vec<&Plane> = stack.planes().iter().collect();
    write_raw_planes(path, &refs, bit_depth, None)
}
