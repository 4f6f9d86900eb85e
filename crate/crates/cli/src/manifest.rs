//! Output directory bookkeeping: every file written by a run is recorded
//! in `manifest.json` together with its size.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use deltashell::Table;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_sha256: String,
    pub timestamp: String,
    pub files: Vec<FileEntry>,
}

/// SHA-256 of the compact JSON form; object keys are sorted, so equal
/// configurations hash equally regardless of key order in the file.
pub fn config_hash(config: &Value) -> String {
    let canonical = serde_json::to_string(config).expect("json value serializes");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

pub struct OutputDir {
    dir: PathBuf,
    manifest: RunManifest,
    verbose: bool,
}

impl OutputDir {
    pub fn create(dir: &Path, command: &str, config: &Value, verbose: bool) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            manifest: RunManifest {
                tool: "deltashell",
                version: env!("CARGO_PKG_VERSION"),
                command: command.into(),
                config_sha256: config_hash(config),
                timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
                files: Vec::new(),
            },
            verbose,
        })
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> io::Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)?;
        if self.verbose {
            eprintln!("wrote {} ({} bytes)", path.display(), bytes.len());
        }
        self.manifest.files.push(FileEntry {
            name: name.into(),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    pub fn write_table(&mut self, name: &str, table: &Table) -> io::Result<()> {
        let csv = table.to_csv_string().map_err(io::Error::other)?;
        self.write_bytes(name, csv.as_bytes())
    }

    pub fn finish(self) -> io::Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(&self.manifest).map_err(io::Error::other)?;
        text.push('\n');
        let path = self.dir.join("manifest.json");
        fs::write(&path, text)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn hash_ignores_key_order() {
        let a: Value = serde_json::from_str(r#"{"x": 1, "y": [1, 2]}"#).unwrap();
        let b: Value = serde_json::from_str(r#"{"y": [1, 2], "x": 1}"#).unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
        assert_ne!(config_hash(&a), config_hash(&json!({"x": 2})));
        assert_eq!(config_hash(&a).len(), 64);
    }

    #[test]
    fn manifest_lists_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path(), "bands", &json!({}), false).unwrap();
        out.write_bytes("a.csv", b"x,y\n").unwrap();
        let path = out.finish().unwrap();
        let m: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(m["files"][0]["name"], "a.csv");
        assert_eq!(m["files"][0]["bytes"], 4);
    }
}
