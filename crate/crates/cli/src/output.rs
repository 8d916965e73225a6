//! Output files and their metadata sidecars.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Failure;

/// Provenance written next to every output as `<file>.meta.json`.
#[derive(Serialize)]
struct Meta<'a> {
    file: &'a str,
    command: &'a str,
    version: &'a str,
    config_sha256: &'a str,
    seed: Option<u64>,
    sha256: String,
}

pub struct Outputs {
    dir: PathBuf,
    command: &'static str,
    config_sha256: String,
    seed: Option<u64>,
    written: Vec<PathBuf>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Outputs {
    pub fn new(dir: &Path, command: &'static str, config_bytes: &[u8], seed: Option<u64>) -> Result<Self, Failure> {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::config(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            command,
            config_sha256: sha256_hex(config_bytes),
            seed,
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), Failure> {
        let path = self.dir.join(name);
        let meta = Meta {
            file: name,
            command: self.command,
            version: env!("CARGO_PKG_VERSION"),
            config_sha256: &self.config_sha256,
            seed: self.seed,
            sha256: sha256_hex(contents.as_bytes()),
        };
        let mut sidecar = serde_json::to_string_pretty(&meta).expect("metadata serializes");
        sidecar.push('\n');
        let write = |p: &Path, s: &str| {
            std::fs::write(p, s).map_err(|e| Failure::config(format!("cannot write {}: {e}", p.display())))
        };
        write(&path, contents)?;
        write(&self.dir.join(format!("{name}.meta.json")), &sidecar)?;
        self.written.push(path);
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), Failure> {
        let mut s = serde_json::to_string_pretty(value)
            .map_err(|e| Failure::numeric(format!("cannot serialize {name}: {e}")))?;
        s.push('\n');
        self.write(name, &s)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}
