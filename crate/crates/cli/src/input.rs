//! Generator specs, edge-file inputs and the sources built from them.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufReader};
use std::path::{Path, PathBuf};

use covsketch::hash::derive_seed;
use covsketch::instance::{
    gen_disjointness, gen_planted_cover, gen_random, load_edges, EdgeFormat, IdRemapper, InstanceMeta,
};
use covsketch::source::OnceSource;
use covsketch::{CoverageInstance, EdgeRecord, EdgeSource, FileSource, MemorySource, SetId};

use crate::error::{CliError, CliResult};

/// Sub-seed counters; every random stream derives from the run seed.
pub const SEED_GENERATOR: u64 = 0;
pub const SEED_BUILDER: u64 = 1;
pub const SEED_L0: u64 = 2;
pub const SEED_GOLD: u64 = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum GenSpec {
    Random { n: usize, m: usize, p: f64 },
    Planted { n: usize, m: usize, k: usize },
    Disjoint { n: usize, a: Vec<u32>, b: Vec<u32> },
    Purify { n: usize, k: usize },
}

fn fields(body: &str) -> CliResult<BTreeMap<&str, &str>> {
    body.split(',')
        .filter(|f| !f.is_empty())
        .map(|f| {
            f.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| CliError::config(format!("generator field `{f}` is not key=value")))
        })
        .collect()
}

fn take<T: std::str::FromStr>(f: &BTreeMap<&str, &str>, key: &str) -> CliResult<T> {
    let raw = f
        .get(key)
        .ok_or_else(|| CliError::config(format!("generator spec needs `{key}`")))?;
    raw.parse()
        .map_err(|_| CliError::config(format!("generator field `{key}={raw}` is not a valid value")))
}

fn id_list(f: &BTreeMap<&str, &str>, key: &str) -> CliResult<Vec<u32>> {
    let raw: String = take(f, key)?;
    raw.split(';')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| CliError::config(format!("`{x}` in `{key}` is not an index")))
        })
        .collect()
}

impl GenSpec {
    pub fn parse(spec: &str) -> CliResult<Self> {
        let (kind, body) = spec.split_once(':').unwrap_or((spec, ""));
        let f = fields(body)?;
        let allowed: &[&str] = match kind {
            "random" => &["n", "m", "p"],
            "planted" => &["n", "m", "k"],
            "disjoint" => &["n", "a", "b"],
            "purify" => &["n", "k"],
            other => return Err(CliError::config(format!("unknown generator `{other}`"))),
        };
        if let Some(extra) = f.keys().find(|k| !allowed.contains(k)) {
            return Err(CliError::config(format!("generator `{kind}` has no field `{extra}`")));
        }
        Ok(match kind {
            "random" => GenSpec::Random {
                n: take(&f, "n")?,
                m: take(&f, "m")?,
                p: take(&f, "p")?,
            },
            "planted" => GenSpec::Planted {
                n: take(&f, "n")?,
                m: take(&f, "m")?,
                k: take(&f, "k")?,
            },
            "disjoint" => GenSpec::Disjoint {
                n: take(&f, "n")?,
                a: id_list(&f, "a")?,
                b: id_list(&f, "b")?,
            },
            _ => GenSpec::Purify {
                n: take(&f, "n")?,
                k: take(&f, "k")?,
            },
        })
    }

    /// Materializes a coverage instance; `purify` specs have none.
    pub fn generate(&self, seed: u64) -> CliResult<Option<(CoverageInstance, Option<Vec<SetId>>)>> {
        let seed = derive_seed(seed, SEED_GENERATOR);
        Ok(match self {
            GenSpec::Random { n, m, p } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(CliError::config(format!("density p={p} not in [0, 1]")));
                }
                Some((gen_random(*n, *m, *p, seed)?, None))
            }
            GenSpec::Planted { n, m, k } => {
                let planted = gen_planted_cover(*n, *m, *k, seed)?;
                Some((planted.instance, Some(planted.planted)))
            }
            GenSpec::Disjoint { n, a, b } => Some((gen_disjointness(*n, a, b)?, None)),
            GenSpec::Purify { .. } => None,
        })
    }
}

#[derive(Debug)]
pub enum InputKind {
    Memory(Vec<EdgeRecord>),
    File(PathBuf, EdgeFormat),
    Stdin(EdgeFormat),
}

/// A resolved input together with its dimensions.
#[derive(Debug)]
pub struct Input {
    pub label: String,
    pub meta: InstanceMeta,
    pub kind: InputKind,
    /// Kept for generated inputs so oracles need no extra pass.
    pub instance: Option<CoverageInstance>,
    pub planted: Option<Vec<SetId>>,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn read_meta(path: &Path) -> CliResult<InstanceMeta> {
    let file = File::open(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_reader(BufReader::new(file))?)
}

/// Dimensions from a scan when no sidecar exists: ids are taken as dense.
fn scan_meta(path: &Path, format: EdgeFormat) -> CliResult<InstanceMeta> {
    let file = File::open(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    let mut meta = InstanceMeta {
        n: 0,
        m: 0,
        edge_count: 0,
    };
    for edge in load_edges(BufReader::new(file), format) {
        let edge = edge?;
        meta.n = meta.n.max(edge.set.0 as u64 + 1);
        meta.m = meta.m.max(edge.element.0 as u64 + 1);
        meta.edge_count += 1;
    }
    Ok(meta)
}

impl Input {
    pub fn from_instance(label: String, instance: CoverageInstance, planted: Option<Vec<SetId>>) -> Self {
        Self {
            label,
            meta: instance.meta(),
            kind: InputKind::Memory(instance.edges().collect()),
            instance: Some(instance),
            planted,
        }
    }

    pub fn from_path(path: &Path, format: EdgeFormat, meta: Option<&Path>) -> CliResult<Self> {
        let stdin = path.as_os_str() == "-";
        let sidecar = meta.map(Path::to_path_buf).or_else(|| (!stdin).then(|| sidecar_path(path)));
        let meta = match sidecar {
            Some(p) if p.exists() => read_meta(&p)?,
            Some(p) if meta.is_some() => return Err(CliError::io(format!("{}: no such file", p.display()))),
            _ if stdin => return Err(CliError::config("standard input needs --meta with the instance dimensions")),
            _ => scan_meta(path, format)?,
        };
        Ok(Self {
            label: path.display().to_string(),
            meta,
            kind: if stdin {
                InputKind::Stdin(format)
            } else {
                InputKind::File(path.to_path_buf(), format)
            },
            instance: None,
            planted: None,
        })
    }

    pub fn n(&self) -> usize {
        self.meta.n as usize
    }

    pub fn m(&self) -> usize {
        self.meta.m as usize
    }

    /// A fresh source; standard input can be handed out once.
    pub fn source(&self) -> Box<dyn EdgeSource + '_> {
        match &self.kind {
            InputKind::Memory(edges) => Box::new(MemorySource::new(edges.clone())),
            InputKind::File(path, format) => Box::new(FileSource::new(path, *format)),
            InputKind::Stdin(format) => Box::new(OnceSource::new(Box::new(load_edges(io::stdin().lock(), *format)))),
        }
    }

    /// The instance with element ids compacted to those present, for exact
    /// oracles. Not available for standard input.
    pub fn materialize(&self) -> CliResult<Option<CoverageInstance>> {
        if let Some(inst) = &self.instance {
            return Ok(Some(inst.clone()));
        }
        let InputKind::File(path, format) = &self.kind else {
            return Ok(None);
        };
        let file = File::open(path)?;
        let mut remap = IdRemapper::new();
        let mut edges = Vec::new();
        for edge in load_edges(BufReader::new(file), *format) {
            let e = edge?;
            edges.push(EdgeRecord::new(e.set.0, remap.id(e.element.0)));
        }
        Ok(Some(CoverageInstance::from_edges(self.n(), remap.len(), edges)?))
    }
}

pub fn edge_format(arg: crate::cli::FormatArg) -> EdgeFormat {
    match arg {
        crate::cli::FormatArg::Text => EdgeFormat::Text,
        crate::cli::FormatArg::Binary => EdgeFormat::Binary,
    }
}
