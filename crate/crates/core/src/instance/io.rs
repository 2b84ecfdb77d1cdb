//! Edge-stream formats.
//!
//! Text: one `set_id element_id` pair per line in ASCII decimal, lines
//! starting with `#` are comments. Binary: little-endian `u32` pairs, 8 bytes
//! per edge, no header.

use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use super::EdgeRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeFormat {
    #[default]
    Text,
    Binary,
}

/// Sidecar metadata stored next to an edge file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub n: u64,
    pub m: u64,
    pub edge_count: u64,
}

/// Streams edges from `source` without buffering the whole input.
pub fn load_edges<R: Read>(source: R, format: EdgeFormat) -> EdgeReader<R> {
    match format {
        EdgeFormat::Text => EdgeReader::Text(TextEdgeReader::new(BufReader::new(source))),
        EdgeFormat::Binary => EdgeReader::Binary(BinaryEdgeReader::new(BufReader::new(source))),
    }
}

pub fn write_edges<W, I>(mut out: W, format: EdgeFormat, edges: I) -> Result<u64>
where
    W: Write,
    I: IntoIterator<Item = EdgeRecord>,
{
    let mut count = 0;
    for edge in edges {
        match format {
            EdgeFormat::Text => writeln!(out, "{} {}", edge.set.0, edge.element.0)?,
            EdgeFormat::Binary => {
                out.write_all(&edge.set.0.to_le_bytes())?;
                out.write_all(&edge.element.0.to_le_bytes())?;
            }
        }
        count += 1;
    }
    out.flush()?;
    Ok(count)
}

pub enum EdgeReader<R> {
    Text(TextEdgeReader<BufReader<R>>),
    Binary(BinaryEdgeReader<BufReader<R>>),
}

impl<R: Read> Iterator for EdgeReader<R> {
    type Item = Result<EdgeRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        match self {
            EdgeReader::Text(r) => r.next(),
            EdgeReader::Binary(r) => r.next(),
        }
    }
}

pub struct TextEdgeReader<R> {
    inner: R,
    buf: Vec<u8>,
    offset: u64,
    line: u64,
    failed: bool,
}

impl<R: BufRead> TextEdgeReader<R> {
    pub fn new(inner: R) -> Self {
        Self {
            inner,
            buf: Vec::new(),
            offset: 0,
            line: 0,
            failed: false,
        }
    }

    fn parse_line(&self, line: &[u8]) -> Result<EdgeRecord> {
        let fail = |column: usize, message: &str| Error::Parse {
            offset: self.offset + column as u64,
            line: self.line,
            column: column as u64,
            message: message.to_string(),
        };
        let (set, rest) = parse_id(line, 0).map_err(|c| fail(c, "expected decimal set id"))?;
        if line.get(rest) != Some(&b' ') {
            return Err(fail(rest, "expected a single space"));
        }
        let (element, end) =
            parse_id(line, rest + 1).map_err(|c| fail(c, "expected decimal element id"))?;
        if end != line.len() {
            return Err(fail(end, "trailing characters"));
        }
        let set = u32::try_from(set).map_err(|_| Error::Range {
            what: "set id",
            value: set,
            bound: u32::MAX as u64 + 1,
        })?;
        let element = u32::try_from(element).map_err(|_| Error::Range {
            what: "element id",
            value: element,
            bound: u32::MAX as u64 + 1,
        })?;
        Ok(EdgeRecord::new(set, element))
    }
}

/// Parses the decimal run starting at `start`; returns the value and the
/// index just past it, or the failing column.
fn parse_id(line: &[u8], start: usize) -> std::result::Result<(u64, usize), usize> {
    let mut value: u64 = 0;
    let mut i = start;
    while let Some(&b) = line.get(i) {
        if !b.is_ascii_digit() {
            break;
        }
        value = value
            .checked_mul(10)
            .and_then(|v| v.checked_add((b - b'0') as u64))
            .unwrap_or(u64::MAX);
        i += 1;
    }
    if i == start {
        Err(start)
    } else {
        Ok((value, i))
    }
}

impl<R: BufRead> Iterator for TextEdgeReader<R> {
    type Item = Result<EdgeRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            self.buf.clear();
            let read = match self.inner.read_until(b'\n', &mut self.buf) {
                Ok(0) => return None,
                Ok(read) => read,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e.into()));
                }
            };
            let mut line = &self.buf[..];
            if line.last() == Some(&b'\n') {
                line = &line[..line.len() - 1];
            }
            let result = if line.is_empty() || line[0] == b'#' {
                None
            } else {
                Some(self.parse_line(line))
            };
            self.offset += read as u64;
            self.line += 1;
            if let Some(result) = result {
                if result.is_err() {
                    self.failed = true;
                }
                return Some(result);
            }
        }
    }
}

pub struct BinaryEdgeReader<R> {
    inner: R,
    offset: u64,
    failed: bool,
}

impl<R: Read> BinaryEdgeReader<R> {
    pub fn new(inner: R) -> Self {
        Self {
            inner,
            offset: 0,
            failed: false,
        }
    }
}

impl<R: Read> Iterator for BinaryEdgeReader<R> {
    type Item = Result<EdgeRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let mut record = [0u8; 8];
        let mut filled = 0;
        while filled < record.len() {
            match self.inner.read(&mut record[filled..]) {
                Ok(0) => break,
                Ok(k) => filled += k,
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => continue,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e.into()));
                }
            }
        }
        if filled == 0 {
            return None;
        }
        if filled < record.len() {
            self.failed = true;
            return Some(Err(Error::Format(format!(
                "truncated record at byte {}: {filled} of 8 bytes",
                self.offset
            ))));
        }
        self.offset += 8;
        let set = u32::from_le_bytes(record[..4].try_into().unwrap());
        let element = u32::from_le_bytes(record[4..].try_into().unwrap());
        Some(Ok(EdgeRecord::new(set, element)))
    }
}
