//! Checkpoint files: the variational state as JSON.
//!
//! A checkpoint stores the ansatz family, its shape, and the full complex
//! parameter vector. Parameters are written as two parallel number arrays;
//! the JSON encoder emits the shortest decimal form that round-trips, so a
//! save/load cycle reproduces the state bit for bit.

use std::path::Path;

use nqs_core::ansatz::{build_ansatz, AnsatzSpec, AnsatzState, AnyAnsatz, SymmetryGroup};
use nqs_core::Cplx;
use serde_json::{json, Value};

use crate::error::{io_err, CliError, Result};

/// File name used by every command that saves a state.
pub const FILE_NAME: &str = "checkpoint.json";

/// Serialize the ansatz to a JSON checkpoint.
pub fn save(path: &Path, spec: &AnsatzSpec, ansatz: &AnyAnsatz<f64>) -> Result<()> {
    let parameters = ansatz.parameters();
    let re: Vec<f64> = parameters.iter().map(|p| p.re).collect();
    let im: Vec<f64> = parameters.iter().map(|p| p.im).collect();
    let mut record = json!({
        "kind": ansatz.kind().name(),
        "n_sites": ansatz.n_sites(),
        "parameters_re": re,
        "parameters_im": im,
    });
    match spec {
        AnsatzSpec::Rbm { hidden } => {
            record["hidden"] = json!(hidden);
        }
        AnsatzSpec::SymmetricRbm { features, .. } => {
            record["features"] = json!(features);
        }
        AnsatzSpec::Jastrow | AnsatzSpec::MeanField => {}
    }
    let text = format!("{}\n", serde_json::to_string_pretty(&record).expect("valid json"));
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Load a checkpoint and rebuild the ansatz it describes.
///
/// The checkpoint's own shape wins: the configured ansatz family and width
/// apply only to fresh starts. Only the site count must match the run.
pub fn load(path: &Path, expected_n: usize) -> Result<(AnsatzSpec, AnyAnsatz<f64>)> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let record: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Checkpoint(format!("{}: {e}", path.display())))?;
    let n_sites = field_u64(&record, "n_sites", path)? as usize;
    if n_sites != expected_n {
        return Err(CliError::Checkpoint(format!(
            "{}: checkpoint has {n_sites} sites but the run is configured for {expected_n}",
            path.display()
        )));
    }
    let kind = record["kind"]
        .as_str()
        .ok_or_else(|| missing(path, "kind"))?;
    let spec = match kind {
        "rbm" => AnsatzSpec::Rbm { hidden: field_u64(&record, "hidden", path)? as usize },
        "symmetric-rbm" => AnsatzSpec::SymmetricRbm {
            features: field_u64(&record, "features", path)? as usize,
            group: SymmetryGroup::translations(n_sites)?,
        },
        "jastrow" => AnsatzSpec::Jastrow,
        "mean-field" => AnsatzSpec::MeanField,
        other => {
            return Err(CliError::Checkpoint(format!(
                "{}: unknown ansatz kind '{other}'",
                path.display()
            )))
        }
    };
    let re = number_array(&record, "parameters_re", path)?;
    let im = number_array(&record, "parameters_im", path)?;
    if re.len() != im.len() {
        return Err(CliError::Checkpoint(format!(
            "{}: parameters_re has {} entries but parameters_im has {}",
            path.display(),
            re.len(),
            im.len()
        )));
    }
    // The random init is immediately overwritten, so scale and seed are
    // irrelevant here.
    let mut ansatz = build_ansatz(n_sites, &spec, 1.0, 0)?;
    if re.len() != ansatz.parameter_count() {
        return Err(CliError::Checkpoint(format!(
            "{}: a {kind} state on {n_sites} sites needs {} parameters, found {}",
            path.display(),
            ansatz.parameter_count(),
            re.len()
        )));
    }
    let parameters = nalgebra::DVector::from_iterator(
        re.len(),
        re.iter().zip(&im).map(|(&a, &b)| Cplx::new(a, b)),
    );
    ansatz.set_parameters(&parameters)?;
    Ok((spec, ansatz))
}

fn missing(path: &Path, field: &str) -> CliError {
    CliError::Checkpoint(format!("{}: missing field '{field}'", path.display()))
}

fn field_u64(record: &Value, field: &str, path: &Path) -> Result<u64> {
    record[field].as_u64().ok_or_else(|| missing(path, field))
}

fn number_array(record: &Value, field: &str, path: &Path) -> Result<Vec<f64>> {
    let values = record[field].as_array().ok_or_else(|| missing(path, field))?;
    values
        .iter()
        .map(|v| {
            v.as_f64().ok_or_else(|| {
                CliError::Checkpoint(format!(
                    "{}: non-numeric entry in '{field}'",
                    path.display()
                ))
            })
        })
        .collect()
}
