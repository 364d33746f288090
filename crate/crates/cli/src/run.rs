//! Output directory, file writers and the run manifest.

use anyhow::{Context, Result};
use serde::Serialize;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

pub const OUT_ENV: &str = "CIRCLAB_OUT";
pub const DEFAULT_OUT: &str = "circlab-out";
pub const MANIFEST: &str = "manifest.json";

pub struct Globals {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Globals {
    pub fn seed(&self, config: Option<u64>) -> u64 {
        self.seed.or(config).unwrap_or(0)
    }

    /// Flag, then config key, then `CIRCLAB_OUT`, then `./circlab-out`.
    pub fn out(&self, config: Option<&Path>) -> PathBuf {
        self.out
            .clone()
            .or_else(|| config.map(Path::to_path_buf))
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }
}

/// Bad config or arguments; exits with status 2.
#[derive(Debug)]
pub struct UsageError(String);

impl UsageError {
    pub fn new(msg: impl Into<String>) -> anyhow::Error {
        anyhow::Error::new(UsageError(msg.into()))
    }
}

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Maps a core validation error to a usage error.
pub fn usage<T>(r: circlab_core::Result<T>) -> Result<T> {
    r.map_err(|e| UsageError::new(e.to_string()))
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    command: &'a str,
    version: &'a str,
    seed: u64,
    threads: usize,
    created_unix: u64,
    config: &'a C,
    files: &'a [String],
}

/// Files written by one command, relative to the output directory.
pub struct Run {
    dir: PathBuf,
    command: &'static str,
    files: Vec<String>,
}

impl Run {
    pub fn create(dir: PathBuf, command: &'static str) -> Result<Self> {
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir, command, files: Vec::new() })
    }

    pub fn csv(&mut self, name: &str, header: &[&str]) -> Result<csv::Writer<BufWriter<File>>> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = csv::Writer::from_writer(BufWriter::new(f));
        w.write_record(header)?;
        self.files.push(name.to_string());
        Ok(w)
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let path = self.dir.join(name);
        let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        serde_json::to_writer_pretty(BufWriter::new(f), value)?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn finish(self, seed: u64, config: &impl Serialize) -> Result<()> {
        let created_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let m = Manifest {
            command: self.command,
            version: env!("CARGO_PKG_VERSION"),
            seed,
            threads: rayon::current_num_threads(),
            created_unix,
            config,
            files: &self.files,
        };
        let f = File::create(self.dir.join(MANIFEST))?;
        serde_json::to_writer_pretty(BufWriter::new(f), &m)?;
        eprintln!("wrote {} files to {}", self.files.len(), self.dir.display());
        Ok(())
    }
}

/// Shortest decimal that round-trips.
pub fn num(x: f64) -> String {
    format!("{x}")
}
