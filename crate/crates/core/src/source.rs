//! Replayable edge streams with pass accounting.

use std::fs::File;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::instance::{load_edges, CoverageInstance, EdgeFormat, EdgeRecord};

pub type EdgeStream<'a> = Box<dyn Iterator<Item = Result<EdgeRecord>> + 'a>;

/// A source of edge-arrival streams. Every call to [`open`](EdgeSource::open)
/// starts one pass from the beginning.
pub trait EdgeSource {
    fn open(&mut self) -> Result<EdgeStream<'_>>;

    /// Passes started so far.
    fn passes(&self) -> usize;

    fn replayable(&self) -> bool {
        true
    }
}

/// In-memory edge list.
#[derive(Debug, Clone)]
pub struct MemorySource {
    edges: Vec<EdgeRecord>,
    passes: usize,
}

impl MemorySource {
    pub fn new(edges: Vec<EdgeRecord>) -> Self {
        Self { edges, passes: 0 }
    }

    pub fn from_instance(inst: &CoverageInstance) -> Self {
        Self::new(inst.edges().collect())
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }
}

impl EdgeSource for MemorySource {
    fn open(&mut self) -> Result<EdgeStream<'_>> {
        self.passes += 1;
        Ok(Box::new(self.edges.iter().copied().map(Ok)))
    }

    fn passes(&self) -> usize {
        self.passes
    }
}

/// An edge file, re-opened for every pass.
#[derive(Debug, Clone)]
pub struct FileSource {
    path: PathBuf,
    format: EdgeFormat,
    passes: usize,
}

impl FileSource {
    pub fn new(path: impl AsRef<Path>, format: EdgeFormat) -> Self {
        Self {
            path: path.as_ref().to_path_buf(),
            format,
            passes: 0,
        }
    }
}

impl EdgeSource for FileSource {
    fn open(&mut self) -> Result<EdgeStream<'_>> {
        let file = File::open(&self.path)?;
        self.passes += 1;
        Ok(Box::new(load_edges(file, self.format)))
    }

    fn passes(&self) -> usize {
        self.passes
    }
}

/// A stream that can be read only once, e.g. standard input.
pub struct OnceSource<'a> {
    stream: Option<EdgeStream<'a>>,
    passes: usize,
}

impl<'a> OnceSource<'a> {
    pub fn new(stream: EdgeStream<'a>) -> Self {
        Self {
            stream: Some(stream),
            passes: 0,
        }
    }
}

impl EdgeSource for OnceSource<'_> {
    fn open(&mut self) -> Result<EdgeStream<'_>> {
        let stream = self
            .stream
            .take()
            .ok_or(Error::State("stream source cannot be replayed"))?;
        self.passes += 1;
        Ok(stream)
    }

    fn passes(&self) -> usize {
        self.passes
    }

    fn replayable(&self) -> bool {
        false
    }
}
