//! State input: `--p`, `--t` or a JSON matrix file.

use std::path::Path;

use bsa_lab_core::matcore::{Mat4, C64};
use bsa_lab_core::measures::{validate_density_matrix, DENSITY_TOL};
use bsa_lab_core::BdState;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// The state as the user gave it, echoed back in reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    P { p: [f64; 4] },
    T { t: [f64; 3] },
    Matrix { matrix: Vec<Vec<[f64; 2]>> },
}

impl StateSpec {
    pub fn from_args(p: Option<&[f64]>, t: Option<&[f64]>, matrix_file: Option<&Path>) -> Result<Self, CliError> {
        match (p, t, matrix_file) {
            (Some(p), None, None) => Ok(StateSpec::P { p: fixed(p, "--p")? }),
            (None, Some(t), None) => Ok(StateSpec::T { t: fixed(t, "--t")? }),
            (None, None, Some(path)) => read_file(path),
            (None, None, None) => Err(CliError::Input("give a state with --p, --t or --matrix-file".into())),
            _ => Err(CliError::Input("--p, --t and --matrix-file are mutually exclusive".into())),
        }
    }

    pub fn matrix(&self) -> Result<Mat4, CliError> {
        match self {
            StateSpec::Matrix { matrix } => {
                let m = to_mat4(matrix)?;
                validate_density_matrix(&m, DENSITY_TOL).map_err(|e| CliError::Input(e.to_string()))?;
                Ok(m)
            }
            _ => Ok(self.bd_state()?.density_matrix()),
        }
    }

    /// The Bell-diagonal state; matrix input must be Bell-diagonal.
    pub fn bd_state(&self) -> Result<BdState, CliError> {
        let r = match self {
            StateSpec::P { p } => BdState::from_p(*p),
            StateSpec::T { t } => BdState::from_t(*t),
            StateSpec::Matrix { .. } => BdState::from_density_matrix(&self.matrix()?),
        };
        r.map_err(|e| CliError::Input(e.to_string()))
    }
}

fn fixed<const N: usize>(v: &[f64], flag: &str) -> Result<[f64; N], CliError> {
    v.try_into()
        .map_err(|_| CliError::Input(format!("{flag} needs {N} comma-separated numbers, got {}", v.len())))
}

fn to_mat4(rows: &[Vec<[f64; 2]>]) -> Result<Mat4, CliError> {
    if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
        return Err(CliError::Input("matrix must be 4x4 with [re, im] entries".into()));
    }
    let mut m = Mat4::zeros();
    for (i, row) in rows.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            m[(i, j)] = C64::new(z[0], z[1]);
        }
    }
    Ok(m)
}

// Accepts a state object or a bare array of rows.
fn read_file(path: &Path) -> Result<StateSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    if let Ok(spec) = serde_json::from_str::<StateSpec>(&text) {
        return Ok(spec);
    }
    serde_json::from_str::<Vec<Vec<[f64; 2]>>>(&text)
        .map(|matrix| StateSpec::Matrix { matrix })
        .map_err(|e| CliError::Input(format!("{}: expected {{\"p\"}}, {{\"t\"}} or {{\"matrix\"}}: {e}", path.display())))
}
