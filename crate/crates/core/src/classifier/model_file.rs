//! Versioned JSON model file.
//!
//! ```text
//! {
//!   "format": "indoamr-model",
//!   "version": 1,
//!   "seed": 42,
//!   "params": { "algorithm": "gbt", "learning_rate": 0.1, ... },
//!   "rules": { "determiner": { "enabled": true, "upos": [...], "words": [...] }, ... },
//!   "encoder": { "config": ["lexical", "syntactic"], "embedding_dim": 300, ... },
//!   "classifier": { "kind": "gbt", ... }
//! }
//! ```
//!
//! Reals are written in shortest round-trip form and read back exactly.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{Classifier, ModelParams};
use crate::error::{Error, Result};
use crate::features::FeatureEncoder;
use crate::pairgen::FilterRuleSet;

pub const FORMAT_NAME: &str = "indoamr-model";
pub const FORMAT_VERSION: u32 = 1;

/// Everything needed to label pairs at inference time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub seed: u64,
    pub params: ModelParams,
    pub rules: FilterRuleSet,
    pub encoder: FeatureEncoder,
    pub classifier: Classifier,
}

impl ModelFile {
    pub fn new(
        seed: u64,
        params: ModelParams,
        rules: FilterRuleSet,
        encoder: FeatureEncoder,
        classifier: Classifier,
    ) -> Self {
        ModelFile {
            format: FORMAT_NAME.into(),
            version: FORMAT_VERSION,
            seed,
            params,
            rules,
            encoder,
            classifier,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model serializes");
        s.push('\n');
        s
    }
}

pub fn save_model<W: Write>(model: &ModelFile, mut writer: W) -> Result<()> {
    writer.write_all(model.to_json().as_bytes())?;
    Ok(())
}

pub fn load_model<R: Read>(mut reader: R) -> Result<ModelFile> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Model(format!("truncated or malformed model file: {e}")))?;
    if value.get("format").and_then(|v| v.as_str()) != Some(FORMAT_NAME) {
        return Err(Error::Model(format!("not an {FORMAT_NAME} file")));
    }
    let version = value
        .get("version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::Model("missing version".into()))?;
    if version != u64::from(FORMAT_VERSION) {
        return Err(Error::ModelVersion {
            found: u32::try_from(version).unwrap_or(u32::MAX),
            expected: FORMAT_VERSION,
        });
    }
    let model: ModelFile = serde_json::from_str(&text)
        .map_err(|e| Error::Model(format!("malformed model file: {e}")))?;
    if model.classifier.n_features() != model.encoder.dimension() {
        return Err(Error::Model(format!(
            "classifier expects {} features but the encoder produces {}",
            model.classifier.n_features(),
            model.encoder.dimension()
        )));
    }
    Ok(model)
}
