use serde::Serialize;
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::{Path, PathBuf};

use super::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
}

/// Sidecar written next to the primary output. Everything that may vary
/// between identical invocations (timing, worker count) lives here and
/// never in the primary output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub workers: usize,
    pub duration_seconds: f64,
    pub outputs: Vec<OutputDigest>,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// `dir/stem.suffix` next to `out`.
pub fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.{suffix}"))
}

pub fn json_string<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn csv_string<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Collects primary outputs, writing each to its file (or stdout when no
/// path was given) and remembering digests for the manifest.
#[derive(Default)]
pub struct Emitter {
    digests: Vec<OutputDigest>,
}

impl Emitter {
    pub fn emit(&mut self, path: Option<&Path>, contents: &str) -> Result<(), CliError> {
        match path {
            Some(p) => {
                std::fs::write(p, contents)?;
                self.digests.push(OutputDigest {
                    path: p.display().to_string(),
                    sha256: hex::encode(Sha256::digest(contents.as_bytes())),
                });
            }
            None => {
                std::io::stdout().write_all(contents.as_bytes())?;
            }
        }
        Ok(())
    }

    pub fn finish(self, primary: Option<&Path>, manifest: RunManifest) -> Result<(), CliError> {
        if let Some(p) = primary {
            let full = RunManifest { outputs: self.digests, ..manifest };
            std::fs::write(manifest_path(p), json_string(&full)?)?;
        }
        Ok(())
    }
}
