//! On-disk formats: the `F32V` volume file and labeling CSV.
//!
//! A volume file is laid out as
//!
//! ```text
//! "F32V" | header length (u32 LE) | UTF-8 JSON header | payload
//! ```
//!
//! The payload holds `p * n` little-endian `f32` values, voxel-major: the `n`
//! samples of voxel 0, then the `n` samples of voxel 1, and so on. The mask is
//! stored in the header as runs of inside cells over the row-major grid.

use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labeling::Labeling;
use crate::volume::{GridShape, ImageStack, Mask};

pub const MAGIC: &[u8; 4] = b"F32V";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskRuns {
    pub encoding: String,
    /// `[start_cell, length]` pairs, ascending and non-overlapping.
    pub runs: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VolumeHeader {
    pub format_version: u32,
    pub dtype: String,
    pub endianness: String,
    pub layout: String,
    pub shape: Vec<usize>,
    pub p: usize,
    pub n: usize,
    pub mask: MaskRuns,
}

fn mask_runs(mask: &Mask) -> MaskRuns {
    let mut runs: Vec<[usize; 2]> = Vec::new();
    for &cell in mask.voxel_cells() {
        match runs.last_mut() {
            Some([start, len]) if *start + *len == cell => *len += 1,
            _ => runs.push([cell, 1]),
        }
    }
    MaskRuns {
        encoding: "runs".into(),
        runs,
    }
}

fn mask_from_header(header: &VolumeHeader) -> Result<Mask> {
    let shape = GridShape::new(&header.shape)?;
    if header.mask.encoding != "runs" {
        return Err(Error::Format(format!(
            "unsupported mask encoding '{}'",
            header.mask.encoding
        )));
    }
    let mut inside = vec![false; shape.n_cells()];
    let mut next_free = 0;
    for &[start, len] in &header.mask.runs {
        let end = start
            .checked_add(len)
            .filter(|&e| len > 0 && start >= next_free && e <= inside.len())
            .ok_or_else(|| Error::Format(format!("bad mask run [{start}, {len}]")))?;
        inside[start..end].iter_mut().for_each(|b| *b = true);
        next_free = end;
    }
    let mask = Mask::new(shape, inside)?;
    if mask.n_voxels() != header.p {
        return Err(Error::Format(format!(
            "mask selects {} voxels but header says p={}",
            mask.n_voxels(),
            header.p
        )));
    }
    Ok(mask)
}

/// Serializes a stack; values are stored as `f32`.
pub fn encode_volume(stack: &ImageStack) -> Result<Vec<u8>> {
    let header = VolumeHeader {
        format_version: FORMAT_VERSION,
        dtype: "float32".into(),
        endianness: "little".into(),
        layout: "voxel-major".into(),
        shape: stack.mask().shape().dims().to_vec(),
        p: stack.n_voxels(),
        n: stack.n_samples(),
        mask: mask_runs(stack.mask()),
    };
    let json = serde_json::to_vec(&header)?;
    let payload_len = stack.n_voxels() * stack.n_samples() * 4;
    let mut out = Vec::with_capacity(8 + json.len() + payload_len);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    for row in stack.data().rows() {
        for &v in row {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    Ok(out)
}

/// Parses just the header, returning it with the payload offset.
pub fn decode_header(bytes: &[u8]) -> Result<(VolumeHeader, usize)> {
    if bytes.len() < 8 || &bytes[..4] != MAGIC {
        return Err(Error::Format("missing F32V magic".into()));
    }
    let len = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
    let end = 8usize
        .checked_add(len)
        .filter(|&e| e <= bytes.len())
        .ok_or_else(|| Error::Format("truncated header".into()))?;
    let header: VolumeHeader = serde_json::from_slice(&bytes[8..end])
        .map_err(|e| Error::Format(format!("header: {e}")))?;
    if header.format_version != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported format version {}",
            header.format_version
        )));
    }
    if header.dtype != "float32" || header.endianness != "little" || header.layout != "voxel-major" {
        return Err(Error::Format(format!(
            "unsupported encoding {}/{}/{}",
            header.dtype, header.endianness, header.layout
        )));
    }
    Ok((header, end))
}

pub fn decode_volume(bytes: &[u8]) -> Result<ImageStack> {
    let (header, offset) = decode_header(bytes)?;
    let mask = mask_from_header(&header)?;
    let expected = header
        .p
        .checked_mul(header.n)
        .and_then(|v| v.checked_mul(4))
        .ok_or_else(|| Error::Format("payload size overflows".into()))?;
    let payload = &bytes[offset..];
    if payload.len() != expected {
        return Err(Error::Format(format!(
            "payload has {} bytes, expected p*n*4 = {expected}",
            payload.len()
        )));
    }
    let values: Vec<f64> = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64)
        .collect();
    let data = Array2::from_shape_vec((header.p, header.n), values)
        .map_err(|e| Error::Format(e.to_string()))?;
    ImageStack::new(mask, data)
}

pub fn write_volume(path: impl AsRef<Path>, stack: &ImageStack) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(&encode_volume(stack)?)?;
    Ok(())
}

pub fn read_volume(path: impl AsRef<Path>) -> Result<ImageStack> {
    decode_volume(&fs::read(path)?)
}

/// `voxel_index,label` rows sorted by voxel.
pub fn write_labeling<W: Write>(out: W, labeling: &Labeling) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["voxel_index", "label"])?;
    for (v, &l) in labeling.labels().iter().enumerate() {
        w.write_record([v.to_string(), l.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Deserialize)]
struct LabelRow {
    voxel_index: usize,
    label: usize,
}

pub fn read_labeling<R: std::io::Read>(input: R) -> Result<Labeling> {
    let mut r = csv::Reader::from_reader(input);
    let mut labels = Vec::new();
    for (expected, row) in r.deserialize::<LabelRow>().enumerate() {
        let row = row?;
        if row.voxel_index != expected {
            return Err(Error::InvalidLabeling(format!(
                "row {expected} has voxel_index {}",
                row.voxel_index
            )));
        }
        labels.push(row.label);
    }
    Labeling::new(labels)
}
