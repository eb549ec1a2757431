//! State files: a single state object or an array of them, each in dense or
//! Bloch form.

use std::path::Path;

use nalgebra::{Matrix3, Matrix4, Vector3};
use qdiscord::linalg::C64;
use qdiscord::{validate_state, BlochForm, TwoQubitState};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<[[[f64; 2]; 4]; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<[f64; 3]>,
    #[serde(default, rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<[[f64; 3]; 3]>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StateFile {
    Many(Vec<StateEntry>),
    One(Box<StateEntry>),
}

impl StateEntry {
    pub fn dense(rho: &Matrix4<C64>) -> Self {
        StateEntry {
            id: None,
            rho: Some(std::array::from_fn(|r| std::array::from_fn(|c| [rho[(r, c)].re, rho[(r, c)].im]))),
            x: None,
            y: None,
            k: None,
        }
    }

    pub fn bloch(b: &BlochForm) -> Self {
        StateEntry {
            id: None,
            rho: None,
            x: Some(b.x.into()),
            y: Some(b.y.into()),
            k: Some(std::array::from_fn(|r| std::array::from_fn(|c| b.k[(r, c)]))),
        }
    }

    pub fn to_state(&self) -> Result<TwoQubitState, String> {
        let bloch_given = self.x.is_some() || self.y.is_some() || self.k.is_some();
        match (&self.rho, bloch_given) {
            (Some(rho), false) => {
                let m = Matrix4::from_fn(|r, c| C64::new(rho[r][c][0], rho[r][c][1]));
                validate_state(m).map_err(|e| e.to_string())
            }
            (None, true) => {
                let (Some(x), Some(y), Some(k)) = (self.x, self.y, self.k) else {
                    return Err("bloch form needs all of \"x\", \"y\" and \"K\"".into());
                };
                let k = Matrix3::from_fn(|r, c| k[r][c]);
                BlochForm::new(Vector3::from(x), Vector3::from(y), k)
                    .to_state()
                    .map_err(|e| e.to_string())
            }
            (Some(_), true) => Err("both dense and bloch forms present".into()),
            (None, false) => Err("neither \"rho\" nor \"x\"/\"y\"/\"K\" present".into()),
        }
    }
}

/// Parsed entries of one file with their identifiers.
pub fn read_entries(path: &Path) -> Result<Vec<(String, StateEntry)>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let parsed: StateFile =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: malformed state file: {e}", path.display())))?;
    let entries = match parsed {
        StateFile::One(e) => vec![*e],
        StateFile::Many(v) => v,
    };
    let many = entries.len() > 1;
    Ok(entries
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            let id = match (&e.id, many) {
                (Some(id), _) => id.clone(),
                (None, false) => path.display().to_string(),
                (None, true) => format!("{}#{i}", path.display()),
            };
            (id, e)
        })
        .collect())
}
