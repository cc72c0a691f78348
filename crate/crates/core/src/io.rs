//! File formats: state JSON, float formatting for CSV, sorted-key JSON.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dressed::PureStateSpec;
use crate::error::{Error, Result};

/// 17 significant digits, scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty-printed JSON with keys sorted at every level.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String> {
    // serde_json::Value keeps object keys in a BTreeMap
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateForm {
    Product,
    Joint,
}

/// On-disk state description:
/// `{"form": "product"|"joint", "atom": [re,im,re,im]?, "field": [[re,im],...]?,
///   "a": [[re,im],...]?, "b": [[re,im],...]?}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub form: StateForm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atom: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<[f64; 2]>>,
}

fn complexes(v: &[[f64; 2]]) -> Vec<Complex64> {
    v.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

fn pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|c| [c.re, c.im]).collect()
}

impl StateFile {
    pub fn into_state(self) -> Result<PureStateSpec> {
        let state = match self.form {
            StateForm::Product => {
                let atom = self
                    .atom
                    .ok_or_else(|| Error::validation("product state needs \"atom\""))?;
                let field = self
                    .field
                    .ok_or_else(|| Error::validation("product state needs \"field\""))?;
                if self.a.is_some() || self.b.is_some() {
                    return Err(Error::validation("product state takes no \"a\"/\"b\""));
                }
                PureStateSpec::Product {
                    atom: [
                        Complex64::new(atom[0], atom[1]),
                        Complex64::new(atom[2], atom[3]),
                    ],
                    field: complexes(&field),
                }
            }
            StateForm::Joint => {
                if self.atom.is_some() || self.field.is_some() {
                    return Err(Error::validation("joint state takes no \"atom\"/\"field\""));
                }
                PureStateSpec::Joint {
                    a: complexes(self.a.as_deref().unwrap_or_default()),
                    b: complexes(self.b.as_deref().unwrap_or_default()),
                }
            }
        };
        state.validate()?;
        Ok(state)
    }

    pub fn from_state(state: &PureStateSpec) -> Self {
        match state {
            PureStateSpec::Product { atom, field } => StateFile {
                form: StateForm::Product,
                atom: Some([atom[0].re, atom[0].im, atom[1].re, atom[1].im]),
                field: Some(pairs(field)),
                a: None,
                b: None,
            },
            PureStateSpec::Joint { a, b } => StateFile {
                form: StateForm::Joint,
                atom: None,
                field: None,
                a: Some(pairs(a)),
                b: Some(pairs(b)),
            },
        }
    }
}

pub fn parse_state(json: &str) -> Result<PureStateSpec> {
    serde_json::from_str::<StateFile>(json)?.into_state()
}
