//! CSV and JSON writers. Every file starts with the same provenance: tool
//! version, SHA-256 of the effective configuration, and the seed.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::RunConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_sha256: String,
    pub seed: u64,
}

impl Metadata {
    pub fn for_config(config: &RunConfig) -> Self {
        let canonical = toml::to_string(config).expect("configuration serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let config_sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
        Metadata { tool: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION"), config_sha256, seed: config.seed }
    }

    pub fn comment_line(&self) -> String {
        format!("# {} {} config_sha256={} seed={}", self.tool, self.version, self.config_sha256, self.seed)
    }
}

/// Shortest round-trip decimal, switching to scientific notation when
/// `|x| >= 1e6` or `0 < |x| < 1e-6`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = x.abs();
    if a != 0.0 && !(1e-6..1e6).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

/// Output directory with the files written so far, in order.
pub struct OutDir {
    dir: PathBuf,
    meta: Metadata,
    pub written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(dir: &Path, meta: Metadata) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(OutDir { dir: dir.to_path_buf(), meta, written: Vec::new() })
    }

    pub fn meta(&self) -> &Metadata {
        &self.meta
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
        let path = self.dir.join(name);
        let mut buf = Vec::new();
        writeln!(buf, "{}", self.meta.comment_line())?;
        {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut buf);
            w.write_record(header)?;
            for row in rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        fs::write(&path, buf)?;
        self.written.push(path);
        Ok(())
    }

    /// Writes `{"meta": …, "report": …}` as pretty JSON.
    pub fn json(&mut self, name: &str, report: &impl Serialize) -> io::Result<()> {
        #[derive(Serialize)]
        struct Doc<'a, T: Serialize> {
            meta: &'a Metadata,
            report: &'a T,
        }
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(&Doc { meta: &self.meta, report })?;
        text.push('\n');
        fs::write(&path, text)?;
        self.written.push(path);
        Ok(())
    }
}
