use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use qtst_core::output::CsvTable;

use crate::config::RunConfig;

pub const OUTPUT_SCHEMA_VERSION: u32 = 1;

/// SHA-256 of the resolved configuration in canonical JSON form. The output
/// directory is not part of it.
pub fn config_hash(cfg: &RunConfig) -> String {
    let canonical = serde_json::to_string(cfg).expect("config serializes");
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub version: String,
    pub config_sha256: String,
    pub command: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(cfg: &RunConfig) -> Self {
        Self {
            version: qtst_core::VERSION.to_string(),
            config_sha256: config_hash(cfg),
            command: cfg
                .command
                .map(|c| c.name().to_string())
                .unwrap_or_default(),
            seed: cfg.seed,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Payload {
    Csv(CsvTable),
    Json(Value),
}

#[derive(Debug, Clone)]
pub struct Artifact {
    pub file_name: String,
    pub payload: Payload,
}

impl Artifact {
    pub fn csv(file_name: &str, table: CsvTable) -> Self {
        Self {
            file_name: file_name.into(),
            payload: Payload::Csv(table),
        }
    }

    pub fn json(file_name: &str, body: impl Serialize) -> Self {
        Self {
            file_name: file_name.into(),
            payload: Payload::Json(serde_json::to_value(body).expect("artifact serializes")),
        }
    }

    pub fn render(&self, prov: &Provenance) -> String {
        match &self.payload {
            Payload::Csv(t) => {
                let mut t = t.clone();
                t.comment(format!("qtst {}", prov.version))
                    .comment(format!("command {}", prov.command))
                    .comment(format!("config_sha256 {}", prov.config_sha256))
                    .comment(format!("seed {}", prov.seed));
                t.render()
            }
            Payload::Json(body) => {
                let doc = json!({
                    "schema_version": OUTPUT_SCHEMA_VERSION,
                    "provenance": prov,
                    "result": body,
                });
                let mut s = serde_json::to_string_pretty(&doc).expect("json renders");
                s.push('\n');
                s
            }
        }
    }
}
