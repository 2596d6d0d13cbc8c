//! JSON state files.
//!
//! A density matrix is stored as `{"dims":[..], "re":[[..],..], "im":[[..],..]}`
//! and a ket as `{"dims":[..], "re":[..], "im":[..]}`, both row-major. `im`
//! may be omitted for real states.

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::state::{validate_density, DensityOperator, Ket};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub enum StateFile {
    Density(DensityOperator),
    Pure(Ket),
}

impl StateFile {
    pub fn density(&self) -> DensityOperator {
        match self {
            StateFile::Density(rho) => rho.clone(),
            StateFile::Pure(psi) => psi.to_density(),
        }
    }

    pub fn dims(&self) -> &[usize] {
        match self {
            StateFile::Density(rho) => rho.dims(),
            StateFile::Pure(psi) => psi.dims(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Values {
    Matrix(Vec<Vec<f64>>),
    Vector(Vec<f64>),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    dims: Vec<usize>,
    re: Values,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Values>,
}

fn matrix_from(re: Vec<Vec<f64>>, im: Option<Vec<Vec<f64>>>) -> Result<CMatrix> {
    let n = re.len();
    if re.iter().any(|row| row.len() != n) {
        return Err(Error::Parse("\"re\" is not a square matrix".into()));
    }
    if let Some(im) = &im {
        if im.len() != n || im.iter().any(|row| row.len() != n) {
            return Err(Error::Parse("\"im\" does not match the shape of \"re\"".into()));
        }
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        Complex64::new(re[i][j], im.as_ref().map_or(0.0, |m| m[i][j]))
    }))
}

pub fn parse_state(text: &str) -> Result<StateFile> {
    let raw: RawState = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    match (raw.re, raw.im) {
        (Values::Matrix(re), None) => Ok(StateFile::Density(validate_density(matrix_from(re, None)?, &raw.dims)?)),
        (Values::Matrix(re), Some(Values::Matrix(im))) => Ok(StateFile::Density(validate_density(
            matrix_from(re, Some(im))?,
            &raw.dims,
        )?)),
        (Values::Vector(re), im) => {
            let im = match im {
                None => vec![0.0; re.len()],
                Some(Values::Vector(im)) if im.len() == re.len() => im,
                _ => return Err(Error::Parse("\"im\" does not match the shape of \"re\"".into())),
            };
            let amps = CVector::from_iterator(
                re.len(),
                re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)),
            );
            Ok(StateFile::Pure(Ket::new(raw.dims, amps)?))
        }
        (Values::Matrix(_), Some(Values::Vector(_))) => {
            Err(Error::Parse("\"im\" does not match the shape of \"re\"".into()))
        }
    }
}

pub fn read_state(path: &Path) -> Result<StateFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_state(&text).map_err(|e| e.context(path.display().to_string()))
}

pub fn density_to_json(rho: &DensityOperator) -> String {
    let m = rho.matrix();
    let n = m.nrows();
    let part = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
        (0..n).map(|i| (0..n).map(|j| f(&m[(i, j)])).collect()).collect()
    };
    let raw = RawState {
        dims: rho.dims().to_vec(),
        re: Values::Matrix(part(|z| z.re)),
        im: Some(Values::Matrix(part(|z| z.im))),
    };
    serde_json::to_string(&raw).expect("state serialization cannot fail")
}

pub fn ket_to_json(psi: &Ket) -> String {
    let raw = RawState {
        dims: psi.dims().to_vec(),
        re: Values::Vector(psi.amplitudes().iter().map(|z| z.re).collect()),
        im: Some(Values::Vector(psi.amplitudes().iter().map(|z| z.im).collect())),
    };
    serde_json::to_string(&raw).expect("state serialization cannot fail")
}
