//! Experiment config parsing.
//!
//! The schema is strict: unknown keys fail with the JSON path of the
//! offending field, so typos never silently change an experiment.

use std::collections::BTreeSet;
use std::path::PathBuf;

use ebitsim_core::protocol::{ProtocolKind, ProtocolSpec, DEFAULT_SINGLE_DETECTION_DIM};
use ebitsim_core::{etpd, optics, Scalar};
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub protocol: ProtocolSpec<Scalar>,
    pub output_path: PathBuf,
    pub format: OutputFormat,
    pub sweep: Option<SweepPlan>,
}

impl ExperimentConfig {
    /// The ordered run plan: the base protocol, or one spec per sweep
    /// value with the swept field substituted.
    pub fn run_plan(&self) -> CliResult<Vec<ProtocolSpec<Scalar>>> {
        match &self.sweep {
            None => Ok(vec![self.protocol.clone()]),
            Some(plan) => plan
                .values
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    with_parameter(&self.protocol, &plan.parameter, v).map_err(|e| {
                        CliError::config(format!("sweep.values[{i}]: {e}"))
                    })
                })
                .collect(),
        }
    }
}

pub fn parse_config(text: &str) -> CliResult<ExperimentConfig> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| CliError::config(format!("invalid JSON: {e}")))?;
    let obj = require_object(&root, "<root>")?;
    reject_unknown_keys(obj, "<root>", &["protocol", "output_path", "format", "sweep"])?;

    let protocol_value = obj
        .get("protocol")
        .ok_or_else(|| CliError::config("<root>: missing \"protocol\""))?;
    let protocol = parse_protocol(protocol_value)?;

    let output_path = PathBuf::from(require_str(obj, "output_path", "<root>")?);

    let format = match require_str(obj, "format", "<root>")? {
        "json" => OutputFormat::Json,
        "csv" => OutputFormat::Csv,
        other => {
            return Err(CliError::config(format!(
                "format: expected \"json\" or \"csv\", got \"{other}\""
            )))
        }
    };

    let sweep = match obj.get("sweep") {
        None | Some(Value::Null) => None,
        Some(v) => Some(parse_sweep(v, &protocol)?),
    };

    Ok(ExperimentConfig {
        protocol,
        output_path,
        format,
        sweep,
    })
}

fn parse_protocol(value: &Value) -> CliResult<ProtocolSpec<Scalar>> {
    let obj = require_object(value, "protocol")?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::config("protocol.kind: missing or not a string"))?;

    let spec = match kind {
        "single_detection" => {
            reject_unknown_keys(obj, "protocol", &["kind", "dim", "seed"])?;
            let dim = opt_usize(obj, "dim", "protocol")?.unwrap_or(DEFAULT_SINGLE_DETECTION_DIM);
            ProtocolSpec::new(ProtocolKind::SingleDetection { dim }, seed_of(obj)?)
        }
        "two_photon_two_detector" => {
            reject_unknown_keys(obj, "protocol", &["kind", "network", "seed"])?;
            let network = match obj.get("network") {
                None | Some(Value::Null) => None,
                Some(v) => Some(parse_netlist(v)?),
            };
            ProtocolSpec::new(ProtocolKind::TwoPhotonTwoDetector { network }, seed_of(obj)?)
        }
        "symmetric_n" => {
            reject_unknown_keys(obj, "protocol", &["kind", "n", "seed"])?;
            let n = require_usize(obj, "n", "protocol")?;
            ProtocolSpec::new(ProtocolKind::SymmetricN { n }, seed_of(obj)?)
        }
        "saturating_n" => {
            reject_unknown_keys(obj, "protocol", &["kind", "n", "seed"])?;
            let n = require_usize(obj, "n", "protocol")?;
            ProtocolSpec::new(ProtocolKind::SaturatingN { n }, seed_of(obj)?)
        }
        "etpd" => {
            reject_unknown_keys(
                obj,
                "protocol",
                &["kind", "sigma", "delta", "points", "extent", "seed"],
            )?;
            let sigma = require_f64(obj, "sigma", "protocol")?;
            let delta = require_f64(obj, "delta", "protocol")?;
            let points = opt_usize(obj, "points", "protocol")?.unwrap_or(etpd::DEFAULT_POINTS);
            let extent = opt_f64(obj, "extent", "protocol")?;
            ProtocolSpec::new(
                ProtocolKind::Etpd {
                    sigma,
                    delta,
                    points,
                    extent,
                },
                seed_of(obj)?,
            )
        }
        other => {
            return Err(CliError::config(format!(
                "protocol.kind: unknown kind \"{other}\" (expected one of single_detection, \
                 two_photon_two_detector, symmetric_n, saturating_n, etpd)"
            )))
        }
    };
    spec.map_err(|e| CliError::config(format!("protocol: {e}")))
}

/// Netlist element records, validated key-by-key before deserializing so
/// unknown keys are rejected with their path.
fn parse_netlist(value: &Value) -> CliResult<Vec<optics::NetworkElement<Scalar>>> {
    let records = value
        .as_array()
        .ok_or_else(|| CliError::config("protocol.network: expected a netlist array"))?;
    let mut elements = Vec::with_capacity(records.len());
    for (i, record) in records.iter().enumerate() {
        let path = format!("protocol.network[{i}]");
        let obj = require_object(record, &path)?;
        let kind = obj
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| CliError::config(format!("{path}.kind: missing or not a string")))?;
        let allowed: &[&str] = match kind {
            "beam_splitter" => &["kind", "ports", "theta", "phi"],
            "phase_shifter" => &["kind", "port", "phi"],
            "attenuator" => &["kind", "port", "t"],
            other => {
                return Err(CliError::config(format!(
                    "{path}.kind: unknown element kind \"{other}\""
                )))
            }
        };
        reject_unknown_keys(obj, &path, allowed)?;
        let element: optics::NetworkElement<Scalar> = serde_json::from_value(record.clone())
            .map_err(|e| CliError::config(format!("{path}: {e}")))?;
        elements.push(element);
    }
    Ok(elements)
}

fn parse_sweep(value: &Value, protocol: &ProtocolSpec<Scalar>) -> CliResult<SweepPlan> {
    let obj = require_object(value, "sweep")?;
    reject_unknown_keys(obj, "sweep", &["parameter", "values"])?;
    let parameter = require_str(obj, "parameter", "sweep")?.to_string();

    let allowed = sweepable_parameters(protocol);
    if !allowed.contains(&parameter.as_str()) {
        return Err(CliError::config(format!(
            "sweep.parameter: \"{parameter}\" is not a field of protocol kind \"{}\" \
             (sweepable: {})",
            protocol.name(),
            allowed.join(", ")
        )));
    }

    let values: Vec<f64> = obj
        .get("values")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::config("sweep.values: expected an array of numbers"))?
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_f64()
                .ok_or_else(|| CliError::config(format!("sweep.values[{i}]: not a number")))
        })
        .collect::<CliResult<_>>()?;
    if values.is_empty() {
        return Err(CliError::config("sweep.values: must be non-empty"));
    }

    // Fail fast on out-of-range values so the error carries the path.
    for (i, &v) in values.iter().enumerate() {
        with_parameter(protocol, &parameter, v)
            .map_err(|e| CliError::config(format!("sweep.values[{i}]: {e}")))?;
    }

    Ok(SweepPlan { parameter, values })
}

fn sweepable_parameters(protocol: &ProtocolSpec<Scalar>) -> Vec<&'static str> {
    match protocol.kind {
        ProtocolKind::SingleDetection { .. } => vec!["dim", "seed"],
        ProtocolKind::TwoPhotonTwoDetector { .. } => vec!["seed"],
        ProtocolKind::SymmetricN { .. } | ProtocolKind::SaturatingN { .. } => vec!["n", "seed"],
        ProtocolKind::Etpd { .. } => vec!["sigma", "delta", "points", "extent"],
    }
}

/// Clones the spec with one named field replaced by a sweep value.
pub fn with_parameter(
    spec: &ProtocolSpec<Scalar>,
    parameter: &str,
    value: f64,
) -> Result<ProtocolSpec<Scalar>, String> {
    let mut kind = spec.kind.clone();
    let mut seed = spec.seed;
    match (&mut kind, parameter) {
        (ProtocolKind::SingleDetection { dim }, "dim") => *dim = as_usize(value)?,
        (ProtocolKind::SymmetricN { n }, "n") | (ProtocolKind::SaturatingN { n }, "n") => {
            *n = as_usize(value)?
        }
        (ProtocolKind::Etpd { sigma, .. }, "sigma") => *sigma = value,
        (ProtocolKind::Etpd { delta, .. }, "delta") => *delta = value,
        (ProtocolKind::Etpd { points, .. }, "points") => *points = as_usize(value)?,
        (ProtocolKind::Etpd { extent, .. }, "extent") => *extent = Some(value),
        (_, "seed") => seed = as_usize(value)? as u64,
        (_, other) => return Err(format!("parameter \"{other}\" does not apply here")),
    }
    ProtocolSpec::new(kind, seed).map_err(|e| e.to_string())
}

fn as_usize(value: f64) -> Result<usize, String> {
    if value.fract() != 0.0 || value < 0.0 || value > usize::MAX as f64 {
        return Err(format!("expected a non-negative integer, got {value}"));
    }
    Ok(value as usize)
}

fn require_object<'v>(
    value: &'v Value,
    path: &str,
) -> CliResult<&'v serde_json::Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| CliError::config(format!("{path}: expected a JSON object")))
}

fn reject_unknown_keys(
    obj: &serde_json::Map<String, Value>,
    path: &str,
    allowed: &[&str],
) -> CliResult<()> {
    let allowed: BTreeSet<&str> = allowed.iter().copied().collect();
    for key in obj.keys() {
        if !allowed.contains(key.as_str()) {
            return Err(CliError::config(format!(
                "{path}.{key}: unknown key (allowed: {})",
                allowed.into_iter().collect::<Vec<_>>().join(", ")
            )));
        }
    }
    Ok(())
}

fn require_str<'v>(
    obj: &'v serde_json::Map<String, Value>,
    key: &str,
    path: &str,
) -> CliResult<&'v str> {
    obj.get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| CliError::config(format!("{path}.{key}: missing or not a string")))
}

fn require_f64(obj: &serde_json::Map<String, Value>, key: &str, path: &str) -> CliResult<f64> {
    obj.get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| CliError::config(format!("{path}.{key}: missing or not a number")))
}

fn opt_f64(
    obj: &serde_json::Map<String, Value>,
    key: &str,
    path: &str,
) -> CliResult<Option<f64>> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| CliError::config(format!("{path}.{key}: not a number"))),
    }
}

fn require_usize(obj: &serde_json::Map<String, Value>, key: &str, path: &str) -> CliResult<usize> {
    opt_usize(obj, key, path)?
        .ok_or_else(|| CliError::config(format!("{path}.{key}: missing")))
}

fn opt_usize(
    obj: &serde_json::Map<String, Value>,
    key: &str,
    path: &str,
) -> CliResult<Option<usize>> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => {
            let i = v
                .as_u64()
                .ok_or_else(|| {
                    CliError::config(format!("{path}.{key}: not a non-negative integer"))
                })?;
            Ok(Some(i as usize))
        }
    }
}

fn seed_of(obj: &serde_json::Map<String, Value>) -> CliResult<u64> {
    match obj.get("seed") {
        None | Some(Value::Null) => Ok(0),
        Some(v) => v
            .as_u64()
            .ok_or_else(|| CliError::config("protocol.seed: not a non-negative integer")),
    }
}
