//! Raw planar YUV 4:2:0 input and CSV report output.

use std::io::{Read, Seek, SeekFrom, Write};

use crate::error::{Error, Result};
use crate::types::{Frame, Plane, MAX_BIT_DEPTH, MIN_BIT_DEPTH};

/// Layout of a raw planar 4:2:0 file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct YuvSpec {
    pub width: usize,
    pub height: usize,
    pub bit_depth: u8,
    pub frame_count: usize,
}

impl YuvSpec {
    pub fn new(width: usize, height: usize, bit_depth: u8, frame_count: usize) -> Result<Self> {
        if width == 0 || height == 0 || !width.is_multiple_of(2) || !height.is_multiple_of(2) {
            return Err(Error::BadSpec(format!(
                "dimensions {width}x{height} must be positive and even"
            )));
        }
        if !(MIN_BIT_DEPTH..=MAX_BIT_DEPTH).contains(&bit_depth) {
            return Err(Error::BadSpec(format!("unsupported bit depth {bit_depth}")));
        }
        if frame_count == 0 {
            return Err(Error::BadSpec("frame count must be at least 1".into()));
        }
        Ok(Self {
            width,
            height,
            bit_depth,
            frame_count,
        })
    }

    pub fn bytes_per_sample(&self) -> usize {
        if self.bit_depth == 8 {
            1
        } else {
            2
        }
    }

    /// Bytes of one frame: Y plus two quarter-size chroma planes.
    pub fn frame_size(&self) -> usize {
        self.width * self.height * 3 / 2 * self.bytes_per_sample()
    }

    /// Number of whole frames in a stream of `len` bytes.
    pub fn frames_in(width: usize, height: usize, bit_depth: u8, len: u64) -> usize {
        let bps = if bit_depth == 8 { 1 } else { 2 };
        let size = (width * height * 3 / 2 * bps) as u64;
        len.checked_div(size).unwrap_or(0) as usize
    }
}

fn read_plane(buf: &[u8], width: usize, height: usize, bit_depth: u8) -> Result<Plane> {
    let data: Vec<u16> = if bit_depth == 8 {
        buf.iter().map(|&b| u16::from(b)).collect()
    } else {
        buf.chunks_exact(2)
            .map(|c| u16::from_le_bytes([c[0], c[1]]))
            .collect()
    };
    Plane::new(width, height, bit_depth, data)
}

/// Read frame `index` from a seekable raw stream.
pub fn read_frame<R: Read + Seek>(source: &mut R, spec: &YuvSpec, index: usize) -> Result<Frame> {
    if !spec.width.is_multiple_of(2) || !spec.height.is_multiple_of(2) {
        return Err(Error::BadSpec(format!(
            "dimensions {}x{} must be even",
            spec.width, spec.height
        )));
    }
    if index >= spec.frame_count {
        return Err(Error::OutOfRange {
            index,
            count: spec.frame_count,
        });
    }
    let frame_size = spec.frame_size() as u64;
    let offset = frame_size * index as u64;
    let available = source.seek(SeekFrom::End(0))?;
    if available < offset + frame_size {
        return Err(Error::TruncatedFile {
            needed: offset + frame_size,
            available,
        });
    }
    source.seek(SeekFrom::Start(offset))?;
    let mut buf = vec![0u8; frame_size as usize];
    source.read_exact(&mut buf)?;

    let bps = spec.bytes_per_sample();
    let (w, h) = (spec.width, spec.height);
    let luma_len = w * h * bps;
    let chroma_len = luma_len / 4;
    let luma = read_plane(&buf[..luma_len], w, h, spec.bit_depth)?;
    let cb = read_plane(
        &buf[luma_len..luma_len + chroma_len],
        w / 2,
        h / 2,
        spec.bit_depth,
    )?;
    let cr = read_plane(&buf[luma_len + chroma_len..], w / 2, h / 2, spec.bit_depth)?;
    Frame::new(luma, cb, cr)
}

/// Serialize a frame in the same layout [`read_frame`] expects.
pub fn write_frame<W: Write>(frame: &Frame, sink: &mut W) -> Result<()> {
    let wide = frame.bit_depth() > 8;
    let mut buf = Vec::new();
    for plane in [frame.luma(), frame.cb(), frame.cr()] {
        for &v in plane.data() {
            if wide {
                buf.extend_from_slice(&v.to_le_bytes());
            } else {
                buf.push(v as u8);
            }
        }
    }
    sink.write_all(&buf)?;
    Ok(())
}

/// One CSV row: ordered (column, value) cells.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CsvRecord {
    cells: Vec<(String, String)>,
}

impl CsvRecord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, column: &str, value: impl ToString) -> &mut Self {
        self.cells.push((column.to_string(), value.to_string()));
        self
    }

    pub fn with(mut self, column: &str, value: impl ToString) -> Self {
        self.push(column, value);
        self
    }

    pub fn columns(&self) -> impl Iterator<Item = &str> {
        self.cells.iter().map(|(c, _)| c.as_str())
    }

    pub fn values(&self) -> impl Iterator<Item = &str> {
        self.cells.iter().map(|(_, v)| v.as_str())
    }

    pub fn get(&self, column: &str) -> Option<&str> {
        self.cells
            .iter()
            .find(|(c, _)| c == column)
            .map(|(_, v)| v.as_str())
    }
}

/// A header plus the records that share it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub records: Vec<CsvRecord>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            records: Vec::new(),
        }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        let header: Vec<&str> = self.header.iter().map(String::as_str).collect();
        write_csv(&header, &self.records, &mut out)?;
        Ok(out)
    }
}

/// Write `records` under `header`, '\n' terminated, quoting per RFC 4180.
pub fn write_csv<W: Write>(header: &[&str], records: &[CsvRecord], sink: W) -> Result<()> {
    for (i, r) in records.iter().enumerate() {
        if !r.columns().eq(header.iter().copied()) {
            return Err(Error::ColumnMismatch(format!("record {i}")));
        }
    }
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    writer.write_record(header)?;
    for r in records {
        writer.write_record(r.values())?;
    }
    writer.flush()?;
    Ok(())
}
