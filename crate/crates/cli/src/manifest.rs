//! Run manifests embedded in every output file.
//!
//! A manifest captures the command, every resolved parameter, and the
//! hashes of all input files. Two runs with equal manifests (timestamp
//! aside) must produce byte-identical data sections; the timestamp is
//! therefore kept out of the determinism-checked bytes (comment lines in
//! CSV, a separate field in JSON).

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

#[derive(Clone, Debug)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub params: BTreeMap<String, String>,
    pub input_hashes: BTreeMap<String, String>,
    pub timestamp_unix: u64,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            params: BTreeMap::new(),
            input_hashes: BTreeMap::new(),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn input(&mut self, name: &str, bytes: &[u8]) -> &mut Self {
        let digest = Sha256::digest(bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.input_hashes.insert(name.to_string(), hex);
        self
    }

    /// CSV rendering: `# `-prefixed comment lines, parameters sorted.
    pub fn csv_comment_lines(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# flan {} {}\n", self.version, self.command));
        for (key, value) in &self.params {
            out.push_str(&format!("# param {key}={value}\n"));
        }
        for (name, hash) in &self.input_hashes {
            out.push_str(&format!("# input {name}=sha256:{hash}\n"));
        }
        out.push_str(&format!("# timestamp_unix {}\n", self.timestamp_unix));
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "command": self.command,
            "version": self.version,
            "params": self.params,
            "input_hashes": self.input_hashes,
            "timestamp_unix": self.timestamp_unix,
        })
    }
}
