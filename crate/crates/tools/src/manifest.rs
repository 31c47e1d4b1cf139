//! Provenance records embedded in every artifact.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{ToolError, ToolResult};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Input path -> SHA-256 (hex) of its contents.
    pub inputs: BTreeMap<String, String>,
    pub backend: String,
    pub seed: u64,
    pub version: String,
    /// Only recorded on request: it would make repeated runs differ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl RunManifest {
    pub fn new(args: &[String], backend: &str, seed: u64) -> Self {
        Self {
            command: args.join(" "),
            inputs: BTreeMap::new(),
            backend: backend.to_string(),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_ms: None,
        }
    }

    pub fn record_input(&mut self, path: &Path) -> ToolResult<()> {
        let bytes = std::fs::read(path).map_err(|e| ToolError::io(path, e))?;
        self.inputs.insert(path.display().to_string(), sha256_hex(&bytes));
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("manifest serializes")
    }

    /// `# manifest: {...}` comment line for text formats.
    pub fn comment_line(&self) -> String {
        format!("# manifest: {}", self.to_json())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_known_vector() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn manifest_omits_wall_time_by_default() {
        let m = RunManifest::new(&["bellpoly".into(), "vertices".into(), "L[2]".into()], "rational", 1);
        assert_eq!(m.command, "bellpoly vertices L[2]");
        assert!(!m.to_json().contains("wall_time"));
        assert!(m.comment_line().starts_with("# manifest: {"));
        let back: RunManifest = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(back, m);
    }
}
