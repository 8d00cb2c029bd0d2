//! Loading of theta matrices, resonance lists and rational lists, with the
//! raw bytes of every file kept for the content hash.

use std::collections::BTreeMap;
use std::fs;

use serde::Serialize;
use sha2::{Digest, Sha256};

use schmidt_core::rational::{parse_q, parse_q_list};
use schmidt_core::resonance::{resonance_from_theta, ResonanceSequence, ThetaMatrix};
use schmidt_core::Q;

use crate::failure::{config_err, Failure};

/// Files read while preparing a command, keyed by the path as given.
#[derive(Default, Debug)]
pub struct Inputs {
    files: BTreeMap<String, String>,
}

impl Inputs {
    fn read(&mut self, path: &str) -> Result<String, Failure> {
        let text = fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {path}: {e}")))?;
        self.files.insert(path.to_string(), text.clone());
        Ok(text)
    }

    /// A preset name (`golden`, `sqrt2`, `silver`) or a theta JSON file.
    pub fn theta(&mut self, source: &str) -> Result<ThetaMatrix, Failure> {
        if let Some(theta) = ThetaMatrix::preset(source) {
            return Ok(theta);
        }
        let text = self.read(source)?;
        ThetaMatrix::from_json(&text).map_err(|e| config_err(format!("{source}: {e}")))
    }

    /// The list in `lambda_path` if given, otherwise the sequence derived from
    /// `theta`.
    pub fn lambda(
        &mut self,
        lambda_path: Option<&str>,
        theta: &ThetaMatrix,
        m: &Q,
        t_max: u64,
    ) -> Result<ResonanceSequence, Failure> {
        match lambda_path {
            Some(path) => {
                let text = self.read(path)?;
                ResonanceSequence::from_json_list(&text, m).map_err(|e| config_err(format!("{path}: {e}")))
            }
            None => resonance_from_theta(theta, m, t_max).map_err(Failure::from),
        }
    }

    /// `sha256:` digest of `blob <len>\0<bytes>`, where the bytes are the
    /// canonical JSON of the config followed by every file read.
    pub fn content_hash<C: Serialize>(&self, config: &C) -> String {
        let doc = serde_json::json!({ "config": config, "files": self.files });
        let body = serde_json::to_vec(&doc).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(format!("blob {}\0", body.len()).as_bytes());
        hasher.update(&body);
        format!("sha256:{}", hex::encode(hasher.finalize()))
    }
}

pub fn rational(name: &str, text: &str) -> Result<Q, Failure> {
    parse_q(text).map_err(|e| config_err(format!("--{name}: {e}")))
}

pub fn rationals(name: &str, text: &str) -> Result<Vec<Q>, Failure> {
    parse_q_list(text).map_err(|e| config_err(format!("--{name}: {e}")))
}

/// Comma-separated list of plain tokens.
pub fn tokens(text: &str) -> Vec<String> {
    text.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}
