//! Config loading, error classification and artifact writing.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

pub const EXIT_TOLERANCE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

/// A failed run and its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub error: anyhow::Error,
}

impl CliError {
    pub fn input(error: impl Into<anyhow::Error>) -> Self {
        Self { code: EXIT_INPUT, error: error.into() }
    }

    pub fn other(error: impl Into<anyhow::Error>) -> Self {
        Self { code: 1, error: error.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

impl From<advgame::Error> for CliError {
    fn from(e: advgame::Error) -> Self {
        use advgame::Error::*;
        match e {
            Input(_) | Unsupported(_) | Parse { .. } | Json(_) | Generation(_) => Self::input(e),
            Io(_) => Self::other(e),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Reads a command config. Accepts either the bare config object or a
/// `run.json` written by an earlier run of the same command. Unknown fields
/// are rejected.
pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>, command: &str) -> CliResult<T> {
    let Some(path) = path else { return Ok(T::default()) };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(anyhow::anyhow!("cannot read config {}: {e}", path.display())))?;
    let mut value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::input(anyhow::anyhow!("config {} is not valid JSON: {e}", path.display())))?;
    if let Some(obj) = value.as_object() {
        if obj.contains_key("command") && obj.contains_key("config") {
            let found = obj["command"].as_str().unwrap_or_default();
            if found != command {
                return Err(CliError::input(anyhow::anyhow!(
                    "{} was written by `{found}`, not `{command}`",
                    path.display()
                )));
            }
            value = obj["config"].clone();
        }
    }
    serde_json::from_value(value)
        .map_err(|e| CliError::input(anyhow::anyhow!("invalid config {}: {e}", path.display())))
}

#[derive(Serialize)]
struct RunRecord<'a, C: Serialize> {
    command: &'a str,
    version: &'a str,
    seed: u64,
    config: &'a C,
}

/// Files produced by a command, written together once the run succeeded.
pub struct Artifacts {
    files: Vec<(String, String)>,
}

impl Artifacts {
    pub fn new() -> Self {
        Self { files: Vec::new() }
    }

    pub fn add(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    pub fn add_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut s = serde_json::to_string_pretty(value).map_err(CliError::other)?;
        s.push('\n');
        self.add(name, s);
        Ok(())
    }

    /// Writes every file plus `run.json` into `dir`.
    pub fn write<C: Serialize>(mut self, dir: &Path, command: &str, seed: u64, config: &C) -> CliResult<Vec<PathBuf>> {
        let record = RunRecord { command, version: env!("CARGO_PKG_VERSION"), seed, config };
        self.add_json("run.json", &record)?;
        fs::create_dir_all(dir)
            .map_err(|e| CliError::other(anyhow::anyhow!("cannot create {}: {e}", dir.display())))?;
        let mut written = Vec::new();
        for (name, contents) in &self.files {
            let p = dir.join(name);
            fs::write(&p, contents).map_err(|e| CliError::other(anyhow::anyhow!("cannot write {}: {e}", p.display())))?;
            written.push(p);
        }
        Ok(written)
    }
}

/// Joins the display forms of `fields` with commas.
pub fn csv_line<I: IntoIterator<Item = String>>(fields: I) -> String {
    let mut s = fields.into_iter().collect::<Vec<_>>().join(",");
    s.push('\n');
    s
}

pub fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}
