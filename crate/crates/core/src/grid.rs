//! Dense fields on tensor-product sample grids.
//!
//! Raw tensor layout (`CHGF`, little-endian): magic `b"CHGF"`, `u32` version
//! (1), `u32` dimension count `d`, `u32` reserved (0), then `d` × `u64` axis
//! lengths, then every axis' coordinates as `f64`, then the values as `f64`
//! in row-major order (last axis fastest).

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

const GRID_MAGIC: &[u8; 4] = b"CHGF";
const GRID_VERSION: u32 = 1;

/// Values on the tensor product of per-axis coordinate lists.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField<T> {
    pub label: String,
    pub axis_labels: Vec<String>,
    pub coords: Vec<Vec<T>>,
    pub values: Vec<T>,
}

impl<T: Real> GridField<T> {
    pub fn new(label: impl Into<String>, coords: Vec<Vec<T>>, values: Vec<T>) -> Result<Self> {
        let size: usize = coords.iter().map(Vec::len).product();
        if size != values.len() {
            return Err(invalid(format!(
                "grid shape holds {size} entries but {} values were given",
                values.len()
            )));
        }
        let axis_labels = (0..coords.len()).map(|d| format!("x{d}")).collect();
        Ok(Self {
            label: label.into(),
            axis_labels,
            coords,
            values,
        })
    }

    pub fn zeros(label: impl Into<String>, coords: Vec<Vec<T>>) -> Self {
        let size = coords.iter().map(Vec::len).product();
        Self::new(label, coords, vec![T::zero(); size]).expect("consistent shape")
    }

    pub fn with_axis_labels(mut self, labels: &[&str]) -> Self {
        assert_eq!(labels.len(), self.coords.len());
        self.axis_labels = labels.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn shape(&self) -> Vec<usize> {
        self.coords.iter().map(Vec::len).collect()
    }

    pub fn ndim(&self) -> usize {
        self.coords.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.coords.len());
        idx.iter().zip(&self.coords).fold(0, |acc, (&i, c)| acc * c.len() + i)
    }

    pub fn get(&self, idx: &[usize]) -> T {
        self.values[self.flat_index(idx)]
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    /// Multi-index of a flat position.
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.coords.len()];
        for d in (0..self.coords.len()).rev() {
            let n = self.coords[d].len();
            idx[d] = flat % n;
            flat /= n;
        }
        idx
    }

    /// CSV with one row per entry: index columns, coordinate columns, value.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        let mut header: Vec<String> = self.axis_labels.iter().map(|l| format!("i_{l}")).collect();
        header.extend(self.axis_labels.iter().cloned());
        header.push("value".into());
        writeln!(w, "{}", header.join(","))?;
        for (flat, v) in self.values.iter().enumerate() {
            let idx = self.unflatten(flat);
            let mut row: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
            row.extend(
                idx.iter()
                    .enumerate()
                    .map(|(d, &i)| format!("{:e}", self.coords[d][i].as_f64())),
            );
            row.push(format!("{:e}", v.as_f64()));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn to_raw_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 8 * (self.ndim() + self.len()));
        out.extend_from_slice(GRID_MAGIC);
        out.extend_from_slice(&GRID_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.ndim() as u32).to_le_bytes());
        out.extend_from_slice(&0u32.to_le_bytes());
        for c in &self.coords {
            out.extend_from_slice(&(c.len() as u64).to_le_bytes());
        }
        for v in self.coords.iter().flatten().chain(&self.values) {
            out.extend_from_slice(&v.as_f64().to_le_bytes());
        }
        out
    }

    pub fn from_raw_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(bytes);
        if r.take(4)? != GRID_MAGIC {
            return Err(r.corrupt_at(0, "bad magic"));
        }
        let version = r.u32()?;
        if version != GRID_VERSION {
            return Err(r.corrupt_at(4, format!("unsupported version {version}")));
        }
        let ndim = r.u32()? as usize;
        r.u32()?;
        let mut lens = Vec::with_capacity(ndim);
        for _ in 0..ndim {
            lens.push(r.u64()? as usize);
        }
        let mut coords = Vec::with_capacity(ndim);
        for &n in &lens {
            coords.push((0..n).map(|_| r.f64().map(T::lit)).collect::<Result<Vec<T>>>()?);
        }
        let size: usize = lens.iter().product();
        let values = (0..size).map(|_| r.f64().map(T::lit)).collect::<Result<Vec<T>>>()?;
        r.finish()?;
        Self::new("", coords, values)
    }

    pub fn write_raw(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_raw_bytes())?;
        Ok(())
    }

    pub fn read_raw(path: impl AsRef<Path>) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        Self::from_raw_bytes(&bytes)
    }
}

/// Little-endian cursor that reports corruption with byte offsets.
pub(crate) struct ByteReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    pub(crate) fn pos(&self) -> usize {
        self.pos
    }

    pub(crate) fn corrupt_at(&self, offset: usize, reason: impl Into<String>) -> Error {
        Error::CorruptFile {
            offset: offset as u64,
            reason: reason.into(),
        }
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(self.corrupt_at(self.pos, format!("truncated: needed {n} more bytes")));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub(crate) fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    pub(crate) fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    pub(crate) fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    pub(crate) fn finish(&self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return Err(self.corrupt_at(self.pos, "trailing bytes"));
        }
        Ok(())
    }
}
