//! Kernel parameters as JSON: `n_modes` plus row-major matrices split into
//! real and imaginary arrays.

use std::path::Path;

use gaussent::KernelParams;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaFile {
    pub n_modes: usize,
    pub a_real: Vec<f64>,
    pub a_imag: Vec<f64>,
    pub c_real: Vec<f64>,
    pub c_imag: Vec<f64>,
    pub d_real: Vec<f64>,
    pub d_imag: Vec<f64>,
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

impl ThetaFile {
    pub fn from_params(theta: &KernelParams) -> Self {
        ThetaFile {
            n_modes: theta.n_modes(),
            a_real: row_major(&theta.a_real),
            a_imag: row_major(&theta.a_imag),
            c_real: row_major(&theta.c_real),
            c_imag: row_major(&theta.c_imag),
            d_real: theta.d_real.as_slice().to_vec(),
            d_imag: theta.d_imag.as_slice().to_vec(),
        }
    }

    pub fn to_params(&self) -> Result<KernelParams> {
        let n = self.n_modes;
        if n == 0 {
            return Err(CliError::spec("state file has n_modes = 0"));
        }
        let mat = |name: &str, v: &[f64]| {
            if v.len() != n * n {
                return Err(CliError::spec(format!(
                    "{name} has {} entries, expected {}",
                    v.len(),
                    n * n
                )));
            }
            Ok(DMatrix::from_row_slice(n, n, v))
        };
        let vec = |name: &str, v: &[f64]| {
            if v.len() != n {
                return Err(CliError::spec(format!("{name} has {} entries, expected {n}", v.len())));
            }
            Ok(DVector::from_column_slice(v))
        };
        Ok(KernelParams::from_parts(
            mat("a_real", &self.a_real)?,
            mat("a_imag", &self.a_imag)?,
            mat("c_real", &self.c_real)?,
            mat("c_imag", &self.c_imag)?,
            vec("d_real", &self.d_real)?,
            vec("d_imag", &self.d_imag)?,
        )?)
    }
}

pub fn read_theta(path: &Path) -> Result<KernelParams> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
    let file: ThetaFile =
        serde_json::from_str(&text).map_err(|e| CliError::spec(format!("{}: {e}", path.display())))?;
    file.to_params()
}

pub fn write_theta(path: &Path, theta: &KernelParams) -> Result<()> {
    let text = serde_json::to_string_pretty(&ThetaFile::from_params(theta)).expect("plain data serializes");
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path.display(), e))
}
