//! Cavity mode functions u(z) on the scattering axis.
//!
//! Positions and lengths are measured in units of 1/κ, so a profile is fully
//! described by its shape and the dimensionless cavity length κL.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{self, Expr};

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileShape {
    /// u = 1 on [0, L], 0 elsewhere.
    Mesa,
    /// u = sech²((z − L/2)/width).
    Sech2 { width: f64 },
    /// u = exp(−(z − L/2)²/2σ²).
    Gaussian { sigma: f64 },
    /// u = sin(mπz/L) on [0, L], 0 elsewhere.
    Sinusoidal { lobes: u32 },
    /// User expression, clipped to [0, L].
    Custom(Expr),
}

/// Immutable cavity mode profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeProfile {
    shape: ProfileShape,
    cavity_length: f64,
}

pub const DEFAULT_WIDTH: f64 = 1.0;

impl ModeProfile {
    pub fn new(shape: ProfileShape, kappa_l: f64) -> Result<Self> {
        if !(kappa_l > 0.0 && kappa_l.is_finite()) {
            return Err(Error::validation(format!(
                "cavity length kappa_L must be positive and finite, got {kappa_l}"
            )));
        }
        match &shape {
            ProfileShape::Sech2 { width: w } | ProfileShape::Gaussian { sigma: w } => {
                if !(*w > 0.0 && w.is_finite()) {
                    return Err(Error::validation(format!(
                        "profile width must be positive and finite, got {w}"
                    )));
                }
            }
            ProfileShape::Sinusoidal { lobes } if *lobes == 0 => {
                return Err(Error::validation(
                    "sinusoidal profile needs at least one lobe",
                ));
            }
            _ => {}
        }
        Ok(ModeProfile {
            shape,
            cavity_length: kappa_l,
        })
    }

    pub fn mesa(kappa_l: f64) -> Result<Self> {
        Self::new(ProfileShape::Mesa, kappa_l)
    }

    pub fn sech2(width: f64, kappa_l: f64) -> Result<Self> {
        Self::new(ProfileShape::Sech2 { width }, kappa_l)
    }

    pub fn gaussian(sigma: f64, kappa_l: f64) -> Result<Self> {
        Self::new(ProfileShape::Gaussian { sigma }, kappa_l)
    }

    pub fn sinusoidal(lobes: u32, kappa_l: f64) -> Result<Self> {
        Self::new(ProfileShape::Sinusoidal { lobes }, kappa_l)
    }

    pub fn custom(text: &str, kappa_l: f64) -> Result<Self> {
        Self::new(ProfileShape::Custom(expr::parse(text)?), kappa_l)
    }

    pub fn shape(&self) -> &ProfileShape {
        &self.shape
    }

    pub fn cavity_length(&self) -> f64 {
        self.cavity_length
    }

    pub fn is_compact(&self) -> bool {
        matches!(
            self.shape,
            ProfileShape::Mesa | ProfileShape::Sinusoidal { .. } | ProfileShape::Custom(_)
        )
    }

    /// u(z). Compactly supported shapes return exactly 0 outside [0, L].
    pub fn eval(&self, z: f64) -> Result<f64> {
        let l = self.cavity_length;
        let inside = (0.0..=l).contains(&z);
        Ok(match &self.shape {
            ProfileShape::Mesa => {
                if inside {
                    1.0
                } else {
                    0.0
                }
            }
            ProfileShape::Sinusoidal { lobes } => {
                if inside {
                    (*lobes as f64 * std::f64::consts::PI * z / l).sin()
                } else {
                    0.0
                }
            }
            ProfileShape::Sech2 { width } => {
                let s = 1.0 / ((z - 0.5 * l) / width).cosh();
                s * s
            }
            ProfileShape::Gaussian { sigma } => {
                let d = (z - 0.5 * l) / sigma;
                (-0.5 * d * d).exp()
            }
            ProfileShape::Custom(e) => {
                if inside {
                    e.eval(z, l)
                        .map_err(|source| Error::ModeEval { z, source })?
                } else {
                    0.0
                }
            }
        })
    }

    /// Interval symmetric about L/2, containing [0, L], outside of which
    /// |u| < `epsilon`. Compact shapes return exactly (0, L).
    pub fn effective_support(&self, epsilon: f64) -> (f64, f64) {
        let l = self.cavity_length;
        let tail = match self.shape {
            ProfileShape::Sech2 { width } => width * (1.0 / epsilon.sqrt()).acosh(),
            ProfileShape::Gaussian { sigma } => sigma * (2.0 * (1.0 / epsilon).ln()).sqrt(),
            _ => return (0.0, l),
        };
        let half = 0.5 * l + tail;
        (0.5 * l - half, 0.5 * l + half)
    }
}

/// Profile descriptor as it appears in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileDescriptor {
    pub mode: ProfileMode,
    #[serde(rename = "kappa_L")]
    pub kappa_l: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lobes: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileMode {
    Mesa,
    Sech2,
    Gaussian,
    Sin,
    Expr,
}

impl ProfileDescriptor {
    pub fn mesa(kappa_l: f64) -> Self {
        ProfileDescriptor {
            mode: ProfileMode::Mesa,
            kappa_l,
            width: None,
            lobes: None,
            expr: None,
        }
    }

    pub fn build(&self) -> Result<ModeProfile> {
        let width = self.width.unwrap_or(DEFAULT_WIDTH);
        match self.mode {
            ProfileMode::Mesa => ModeProfile::mesa(self.kappa_l),
            ProfileMode::Sech2 => ModeProfile::sech2(width, self.kappa_l),
            ProfileMode::Gaussian => ModeProfile::gaussian(width, self.kappa_l),
            ProfileMode::Sin => ModeProfile::sinusoidal(self.lobes.unwrap_or(1), self.kappa_l),
            ProfileMode::Expr => {
                let text = self
                    .expr
                    .as_deref()
                    .ok_or_else(|| Error::validation("mode \"expr\" requires an \"expr\" field"))?;
                ModeProfile::custom(text, self.kappa_l)
            }
        }
    }
}
