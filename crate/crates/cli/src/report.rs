//! Report envelope and set listings.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use sievelab::IntegerSet;

use crate::config::ExperimentConfig;

pub const REPORT_SCHEMA: &str = "sievelab/report/v1";
/// Sets larger than this are listed by their ends and a digest.
pub const LISTING_LIMIT: usize = 10_000;
const LISTING_ENDS: usize = 100;

/// A set in a report: every element when small, otherwise the first and last
/// hundred. The digest is SHA-256 over the decimal elements joined by `\n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetListing {
    pub size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub last: Option<Vec<u64>>,
    pub sha256: String,
}

pub fn set_digest(s: &IntegerSet) -> String {
    let mut h = Sha256::new();
    for (i, x) in s.elements().iter().enumerate() {
        if i > 0 {
            h.update(b"\n");
        }
        h.update(x.to_string().as_bytes());
    }
    format!("{:x}", h.finalize())
}

impl SetListing {
    pub fn new(s: &IntegerSet) -> Self {
        let e = s.elements();
        let sha256 = set_digest(s);
        if e.len() <= LISTING_LIMIT {
            SetListing { size: e.len(), elements: Some(e.to_vec()), first: None, last: None, sha256 }
        } else {
            SetListing {
                size: e.len(),
                elements: None,
                first: Some(e[..LISTING_ENDS].to_vec()),
                last: Some(e[e.len() - LISTING_ENDS..].to_vec()),
                sha256,
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

/// Everything after `config` is a function of the config and the input
/// files, except `timing`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub exit_code: i32,
    pub result: Value,
    pub timing: Timing,
}

impl Report {
    pub fn new(config: ExperimentConfig, exit_code: i32, result: Value, elapsed_ms: f64) -> Self {
        Report {
            schema: REPORT_SCHEMA.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            exit_code,
            result,
            timing: Timing { elapsed_ms },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
