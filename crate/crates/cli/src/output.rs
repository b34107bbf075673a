//! Plot-ready data files and the run manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Header marker for files computed from levels that failed the trust check.
pub const WATERMARK: &str = "UNCONVERGED";

/// Whitespace-separated numeric columns under one `#` header line.
#[derive(Debug, Clone)]
pub struct DataTable {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
    watermark: bool,
}

impl DataTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        DataTable {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            watermark: false,
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn watermark(mut self, on: bool) -> Self {
        self.watermark = on;
        self
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::from("#");
        if self.watermark {
            out.push(' ');
            out.push_str(WATERMARK);
        }
        for c in &self.columns {
            out.push(' ');
            out.push_str(c);
        }
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_value(*v)).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

fn format_value(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{v:.0}")
    } else {
        format!("{v:.12e}")
    }
}

/// One emitted file as listed in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
    pub unconverged: bool,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects files written into one output directory.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: Vec<FileEntry>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root)
            .with_context(|| format!("creating output directory {}", root.display()))?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write_table(&mut self, name: &str, table: &DataTable) -> Result<()> {
        self.write_bytes(name, table.render().as_bytes(), table.watermark)
    }

    fn write_bytes(&mut self, name: &str, bytes: &[u8], unconverged: bool) -> Result<()> {
        let path = self.root.join(name);
        std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(FileEntry {
            name: name.to_string(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(bytes),
            unconverged,
        });
        Ok(())
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }

    /// Write `manifest.toml`; it lists every other file but not itself.
    pub fn finish(self, mut manifest: Manifest) -> Result<Manifest> {
        manifest.files = self.files;
        let text = toml::to_string(&manifest).context("serializing manifest")?;
        let path = self.root.join(MANIFEST_NAME);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(manifest)
    }
}

pub const MANIFEST_NAME: &str = "manifest.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

/// Trusted window of one sector at one cutoff, in manifest form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrustEntry {
    pub sector: String,
    pub n_max: u32,
    pub n_max_probe: u32,
    pub tol: f64,
    pub count_trusted: usize,
    /// Absent when no level is trusted.
    pub e_trust_per_atom: Option<f64>,
    pub first_untrusted_per_atom: Option<f64>,
    pub e_star_per_atom: f64,
    pub covers_window: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub allow_unconverged: bool,
    /// Anything computed from untrusted levels was emitted (watermarked).
    pub unconverged_output: bool,
    pub violations: Vec<String>,
    pub notes: Vec<String>,
    pub config: crate::config::ExperimentConfig,
    pub timings: Vec<Timing>,
    pub trust: Vec<TrustEntry>,
    pub results: toml::Table,
    pub files: Vec<FileEntry>,
}

impl Manifest {
    pub fn new(
        command: &str,
        config: &crate::config::ExperimentConfig,
        seed: u64,
        allow_unconverged: bool,
    ) -> Self {
        Manifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            allow_unconverged,
            unconverged_output: false,
            violations: Vec::new(),
            notes: Vec::new(),
            config: config.clone(),
            timings: Vec::new(),
            trust: Vec::new(),
            results: toml::Table::new(),
            files: Vec::new(),
        }
    }

    pub fn time(&mut self, stage: &str, start: std::time::Instant) {
        self.timings.push(Timing {
            stage: stage.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        let v = toml::Value::try_from(value).expect("manifest value serializes");
        self.results.insert(key.to_string(), v);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}: {} files", self.command, self.files.len());
        for f in &self.files {
            let mark = if f.unconverged { " [UNCONVERGED]" } else { "" };
            let _ = writeln!(s, "  {} {}{}", &f.sha256[..16], f.name, mark);
        }
        for n in &self.notes {
            let _ = writeln!(s, "  note: {n}");
        }
        for v in &self.violations {
            let _ = writeln!(s, "  VIOLATION: {v}");
        }
        s
    }
}
