//! Report documents: per-check records, an optional certificate payload,
//! and timing. Reports are deterministic functions of (command, flags,
//! seed) except for the `timing_ms` field.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

use crate::instance::ElementBlocks;
use crate::{CliError, CliResult};

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckStatus {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "WARN")]
    Warn,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: CheckStatus,
    pub measured: Option<f64>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDoc {
    pub schema: u32,
    pub command: String,
    pub options: BTreeMap<String, serde_json::Value>,
    pub seed: Option<u64>,
    pub checks: Vec<CheckRecord>,
    pub certificate: Option<serde_json::Value>,
    pub timing_ms: f64,
}

impl ReportDoc {
    pub fn new(command: &str) -> Self {
        ReportDoc {
            schema: REPORT_SCHEMA,
            command: command.to_string(),
            options: BTreeMap::new(),
            seed: None,
            checks: Vec::new(),
            certificate: None,
            timing_ms: 0.0,
        }
    }

    pub fn option(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.options.insert(key.to_string(), value.into());
    }

    /// A thresholded check: PASS iff `measured <= tolerance`.
    pub fn check(&mut self, name: &str, measured: f64, tolerance: f64) {
        let status = if measured <= tolerance {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        self.checks.push(CheckRecord {
            name: name.to_string(),
            status,
            measured: Some(measured),
            tolerance: Some(tolerance),
        });
    }

    /// A boolean check with no numeric reading.
    pub fn check_bool(&mut self, name: &str, ok: bool) {
        self.checks.push(CheckRecord {
            name: name.to_string(),
            status: if ok {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            measured: None,
            tolerance: None,
        });
    }

    /// An informational record that never fails.
    pub fn info(&mut self, name: &str, measured: f64) {
        self.checks.push(CheckRecord {
            name: name.to_string(),
            status: CheckStatus::Pass,
            measured: Some(measured),
            tolerance: None,
        });
    }

    /// A warning record: noted, but not a failure.
    pub fn warn(&mut self, name: &str, measured: Option<f64>) {
        self.checks.push(CheckRecord {
            name: name.to_string(),
            status: CheckStatus::Warn,
            measured,
            tolerance: None,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn set_certificate<T: Serialize>(&mut self, payload: &T) -> CliResult<()> {
        let value = serde_json::to_value(payload)
            .map_err(|e| CliError::internal(format!("certificate serialization failed: {e}")))?;
        self.certificate = Some(value);
        Ok(())
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::internal(format!("report serialization failed: {e}")))?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read report {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::input(format!("malformed report {}: {e}", path.display())))
    }
}

/// Certificate payload written by the unitarize command. Residuals and band
/// flags are the freshly recomputed verification values, not the solver's
/// own bookkeeping.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificatePayload {
    pub method: String,
    pub group_order: usize,
    pub group_closed: bool,
    pub uniform_bound: f64,
    pub band: [f64; 2],
    pub center: ElementBlocks,
    pub unitarizer: ElementBlocks,
    pub residual_unitarity: f64,
    pub residual_fixed_point: f64,
    pub orbit_band_ok: bool,
    pub unitarizer_band_ok: bool,
    pub converged: bool,
    pub solver_iterations: usize,
    pub verified: bool,
    pub verify_tolerance: f64,
}

/// Payload written by the circumcenter command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallPayload {
    pub center: ElementBlocks,
    pub radius: f64,
    pub iterations: usize,
    pub converged: bool,
    pub radius_history: Vec<f64>,
    pub point_distances: BTreeMap<String, f64>,
}

/// Payload written by the geodesic command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeodesicPayload {
    pub t: f64,
    pub result: ElementBlocks,
}
