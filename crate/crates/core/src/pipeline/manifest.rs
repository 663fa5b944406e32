use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::PipelineConfig;

pub const MANIFEST_HEADER: &str = "#pskill-manifest v1";
pub const MANIFEST_FILE: &str = "manifest.jsonl";

/// One artifact, relative to the output directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    /// Hash of the stage's config slice and input file contents. Empty when
    /// the inputs were never produced.
    pub input_hash: String,
    pub outputs: Vec<OutputRecord>,
    /// Set when this stage or an earlier one failed; the outputs may be
    /// partial or out of date.
    pub stale: bool,
}

/// Effective config plus one record per stage. Holds no timestamps, so
/// an unchanged rerun writes the same bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: Option<PipelineConfig>,
    pub stages: Vec<StageRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Line {
    Config(PipelineConfig),
    Stage(StageRecord),
}

impl Manifest {
    pub fn stage(&self, name: &str) -> Option<&StageRecord> {
        self.stages.iter().find(|s| s.name == name)
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{MANIFEST_HEADER}")?;
        if let Some(c) = &self.config {
            writeln!(out, "{}", serde_json::to_string(&Line::Config(c.clone()))?)?;
        }
        for s in &self.stages {
            writeln!(out, "{}", serde_json::to_string(&Line::Stage(s.clone()))?)?;
        }
        out.flush()
    }

    pub fn read<R: BufRead>(input: R) -> Result<Manifest, String> {
        let mut lines = input.lines();
        match lines.next() {
            Some(Ok(h)) if h.trim_end() == MANIFEST_HEADER => {}
            _ => return Err("missing manifest header".into()),
        }
        let mut m = Manifest { config: None, stages: Vec::new() };
        for (i, line) in lines.enumerate() {
            let line = line.map_err(|e| e.to_string())?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str(&line).map_err(|e| format!("line {}: {e}", i + 2))? {
                Line::Config(c) => m.config = Some(c),
                Line::Stage(s) => m.stages.push(s),
            }
        }
        Ok(m)
    }

    /// Reads `<dir>/manifest.jsonl`; a missing or unreadable manifest is
    /// treated as no previous run.
    pub fn load(dir: &Path) -> Option<Manifest> {
        let f = std::fs::File::open(dir.join(MANIFEST_FILE)).ok()?;
        Manifest::read(std::io::BufReader::new(f)).ok()
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Files under `path` (or `path` itself), sorted, as paths relative to
/// `root`.
pub fn collect_outputs(root: &Path, path: &Path) -> std::io::Result<Vec<OutputRecord>> {
    let mut files = Vec::new();
    gather(path, &mut files)?;
    files.sort();
    files
        .into_iter()
        .map(|f| {
            let bytes = std::fs::read(&f)?;
            let rel = f.strip_prefix(root).unwrap_or(&f);
            Ok(OutputRecord {
                path: rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/"),
                sha256: sha256_hex(&bytes),
                bytes: bytes.len() as u64,
            })
        })
        .collect()
}

fn gather(path: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    if path.is_dir() {
        for entry in std::fs::read_dir(path)? {
            gather(&entry?.path(), out)?;
        }
    } else if path.is_file() {
        out.push(path.to_path_buf());
    }
    Ok(())
}

/// True when every recorded output still exists with its recorded hash.
pub fn outputs_intact(root: &Path, outputs: &[OutputRecord]) -> bool {
    !outputs.is_empty()
        && outputs.iter().all(|o| std::fs::read(root.join(&o.path)).is_ok_and(|b| sha256_hex(&b) == o.sha256))
}

/// Incremental hash over labelled parts.
pub struct InputHasher(Sha256);

impl InputHasher {
    pub fn new(stage: &str) -> Self {
        let mut h = Sha256::new();
        h.update(b"stage\0");
        h.update(stage.as_bytes());
        InputHasher(h)
    }

    pub fn part(&mut self, label: &str, bytes: &[u8]) -> &mut Self {
        self.0.update(label.as_bytes());
        self.0.update([0]);
        self.0.update((bytes.len() as u64).to_le_bytes());
        self.0.update(bytes);
        self
    }

    pub fn json<T: Serialize>(&mut self, label: &str, value: &T) -> &mut Self {
        let text = serde_json::to_vec(value).expect("config slices serialize");
        self.part(label, &text)
    }

    /// Adds every file under `path`, by relative name and content.
    pub fn files(&mut self, label: &str, root: &Path, path: &Path) -> std::io::Result<&mut Self> {
        let outs = collect_outputs(root, path)?;
        if outs.is_empty() {
            return Err(std::io::Error::new(std::io::ErrorKind::NotFound, format!("{} not found", path.display())));
        }
        for o in outs {
            self.part(label, o.path.as_bytes());
            self.part(label, o.sha256.as_bytes());
        }
        Ok(self)
    }

    pub fn finish(&self) -> String {
        hex::encode(self.0.clone().finalize())
    }
}
