//! FTR1 binary container for [`SignalMatrix`].
//!
//! Layout, little-endian throughout:
//!
//! | bytes        | field                                          |
//! |--------------|------------------------------------------------|
//! | 0..4         | ASCII magic `FTR1`                             |
//! | 4..8         | `u32` version, always 1                        |
//! | 8..12        | `u32` channel count                            |
//! | 12..20       | `u64` frame count                              |
//! | 20..28       | `f64` sample rate in Hz                        |
//! | 28..32       | `u32` dtype code (0 = IEEE-754 binary32)       |
//! | 32..36       | `u32` metadata length `M`                      |
//! | 36..36+M     | UTF-8 JSON object with string values           |
//! | 36+M..       | `n_frames × n_channels` `f32`, frame-major     |
//!
//! Metadata keys are written in sorted order so that encoding is deterministic.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::signal::SignalMatrix;

pub const MAGIC: [u8; 4] = *b"FTR1";
pub const VERSION: u32 = 1;
pub const DTYPE_F32: u32 = 0;
/// Size of the fixed header preceding the metadata block.
pub const HEADER_LEN: usize = 36;

/// Header fields of an FTR1 file.
#[derive(Debug, Clone, PartialEq)]
pub struct FtrHeader {
    pub n_channels: usize,
    pub n_frames: usize,
    pub sample_rate_hz: f64,
    pub meta: BTreeMap<String, String>,
    /// Offset of the first payload byte.
    pub payload_offset: usize,
}

impl FtrHeader {
    pub fn payload_len(&self) -> Option<u64> {
        (self.n_channels as u64)
            .checked_mul(self.n_frames as u64)?
            .checked_mul(4)
    }
}

/// Encodes `m` into FTR1 bytes.
pub fn encode_matrix(m: &SignalMatrix) -> Result<Vec<u8>> {
    if let Some(bad) = m.data().iter().position(|v| !v.is_finite()) {
        return Err(Error::Validation(format!(
            "non-finite value at frame {}, channel {}",
            bad / m.n_channels(),
            bad % m.n_channels()
        )));
    }
    if let Some(bad) = m.data().iter().position(|v| v.abs() > f32::MAX as f64) {
        return Err(Error::Validation(format!(
            "value {} at frame {} overflows binary32",
            m.data()[bad],
            bad / m.n_channels()
        )));
    }
    let n_channels = u32::try_from(m.n_channels())
        .map_err(|_| Error::Validation("channel count exceeds u32".into()))?;
    let meta = serde_json::to_vec(&m.meta).map_err(|source| Error::Json {
        context: "FTR1 metadata".into(),
        source,
    })?;
    let meta_len =
        u32::try_from(meta.len()).map_err(|_| Error::Validation("metadata exceeds 4 GiB".into()))?;

    let mut out = Vec::with_capacity(HEADER_LEN + meta.len() + 4 * m.data().len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&n_channels.to_le_bytes());
    out.extend_from_slice(&(m.n_frames() as u64).to_le_bytes());
    out.extend_from_slice(&m.sample_rate_hz().to_le_bytes());
    out.extend_from_slice(&DTYPE_F32.to_le_bytes());
    out.extend_from_slice(&meta_len.to_le_bytes());
    out.extend_from_slice(&meta);
    for &v in m.data() {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    Ok(out)
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

fn u64_at(bytes: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap())
}

/// Parses the fixed header and metadata block from the start of `bytes`.
pub fn decode_header(bytes: &[u8]) -> Result<FtrHeader> {
    if bytes.len() < 4 || bytes[0..4] != MAGIC {
        let found = String::from_utf8_lossy(&bytes[..bytes.len().min(4)]).into_owned();
        return Err(Error::Format(format!("expected magic \"FTR1\", found {found:?}")));
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!(
            "truncated header: {} bytes, need {HEADER_LEN}",
            bytes.len()
        )));
    }
    let version = u32_at(bytes, 4);
    if version != VERSION {
        return Err(Error::UnsupportedFormat(format!("FTR1 version {version}")));
    }
    let n_channels = u32_at(bytes, 8) as usize;
    let n_frames = u64_at(bytes, 12);
    let sample_rate_hz = f64::from_le_bytes(bytes[20..28].try_into().unwrap());
    let dtype = u32_at(bytes, 28);
    if dtype != DTYPE_F32 {
        return Err(Error::UnsupportedFormat(format!("dtype code {dtype}")));
    }
    let meta_len = u32_at(bytes, 32) as usize;
    if n_channels == 0 || n_frames == 0 {
        return Err(Error::Validation(format!(
            "empty matrix in header ({n_channels} channels × {n_frames} frames)"
        )));
    }
    if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
        return Err(Error::Validation(format!("invalid sample rate {sample_rate_hz}")));
    }
    let n_frames = usize::try_from(n_frames)
        .map_err(|_| Error::Validation(format!("frame count {n_frames} too large")))?;
    let meta_end = HEADER_LEN
        .checked_add(meta_len)
        .filter(|&end| end <= bytes.len())
        .ok_or_else(|| Error::Format(format!("metadata block of {meta_len} bytes is truncated")))?;
    let meta: BTreeMap<String, String> = serde_json::from_slice(&bytes[HEADER_LEN..meta_end])
        .map_err(|source| Error::Json {
            context: "FTR1 metadata".into(),
            source,
        })?;
    Ok(FtrHeader {
        n_channels,
        n_frames,
        sample_rate_hz,
        meta,
        payload_offset: meta_end,
    })
}

/// Decodes a complete FTR1 image.
pub fn decode_matrix(bytes: &[u8]) -> Result<SignalMatrix> {
    let header = decode_header(bytes)?;
    let expected = header
        .payload_len()
        .ok_or_else(|| Error::Validation("header dimensions overflow".into()))?;
    let actual = (bytes.len() - header.payload_offset) as u64;
    if expected != actual {
        return Err(Error::LengthMismatch { expected, actual });
    }
    let data: Vec<f64> = bytes[header.payload_offset..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect();
    if let Some(bad) = data.iter().position(|v| !v.is_finite()) {
        return Err(Error::Validation(format!(
            "non-finite value at frame {}",
            bad / header.n_channels
        )));
    }
    let mut m = SignalMatrix::new(header.n_channels, header.n_frames, header.sample_rate_hz, data)?;
    m.meta = header.meta;
    Ok(m)
}

/// Writes `bytes` to `path` through a temporary sibling file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Validation(format!("{} has no file name", path.display())))?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

pub fn write_matrix_file(m: &SignalMatrix, path: impl AsRef<Path>) -> Result<()> {
    let bytes = encode_matrix(m)?;
    write_atomic(path.as_ref(), &bytes)
}

pub fn read_matrix_file(path: impl AsRef<Path>) -> Result<SignalMatrix> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_matrix(&bytes)
}

/// Reads only the header and metadata of an FTR1 file.
pub fn read_header_file(path: impl AsRef<Path>) -> Result<FtrHeader> {
    let path = path.as_ref();
    let mut file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let file_len = file.metadata().map_err(|e| Error::io(path, e))?.len();
    let mut fixed = vec![0u8; HEADER_LEN.min(file_len as usize)];
    file.read_exact(&mut fixed).map_err(|e| Error::io(path, e))?;
    if fixed.len() == HEADER_LEN && fixed[0..4] == MAGIC {
        let meta_len = u32_at(&fixed, 32) as u64;
        let take = meta_len.min(file_len - HEADER_LEN as u64) as usize;
        let mut meta = vec![0u8; take];
        file.read_exact(&mut meta).map_err(|e| Error::io(path, e))?;
        fixed.extend_from_slice(&meta);
    }
    let header = decode_header(&fixed)?;
    let expected = header
        .payload_len()
        .ok_or_else(|| Error::Validation("header dimensions overflow".into()))?;
    let actual = file_len - header.payload_offset as u64;
    if expected != actual {
        return Err(Error::LengthMismatch { expected, actual });
    }
    Ok(header)
}
