//! Incident momentum distributions |A(k)|² and k-averaging of observables.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const GAUSSIAN_NODES: usize = 64;
pub const GAUSSIAN_WINDOW: f64 = 6.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WavePacketSpec {
    /// Monochromatic incidence at k0.
    Delta { k0: f64 },
    /// |A(k)|² ∝ exp(−(k − k0)²/2σ_k²).
    Gaussian { k0: f64, sigma_k: f64 },
    /// Sampled |A(k)|² at strictly increasing k.
    Tabulated { points: Vec<(f64, f64)> },
}

impl WavePacketSpec {
    pub fn monochromatic(k0: f64) -> Self {
        WavePacketSpec::Delta { k0 }
    }

    /// Nodes and normalized weights (Σ weights = 1), ascending in k.
    pub fn quadrature(&self) -> Result<Vec<(f64, f64)>> {
        let nodes = match self {
            WavePacketSpec::Delta { k0 } => vec![(*k0, 1.0)],
            WavePacketSpec::Gaussian { k0, sigma_k } => {
                if !(*sigma_k > 0.0 && sigma_k.is_finite() && k0.is_finite()) {
                    return Err(Error::validation(format!(
                        "gaussian packet needs sigma_k > 0, got {sigma_k}"
                    )));
                }
                let lo = (k0 - GAUSSIAN_WINDOW * sigma_k).max(0.0);
                let hi = k0 + GAUSSIAN_WINDOW * sigma_k;
                let rule = GaussLegendre::new(NonZeroUsize::new(GAUSSIAN_NODES).unwrap());
                let mut nodes: Vec<(f64, f64)> = rule
                    .as_node_weight_pairs()
                    .iter()
                    .map(|&(x, w)| {
                        let k = 0.5 * ((hi - lo) * x + hi + lo);
                        let d = (k - k0) / sigma_k;
                        (k, w * (-0.5 * d * d).exp())
                    })
                    .collect();
                nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
                nodes
            }
            WavePacketSpec::Tabulated { points } => {
                if points.is_empty() {
                    return Err(Error::validation("tabulated packet has no points"));
                }
                if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                    return Err(Error::validation(
                        "tabulated k values must be strictly increasing",
                    ));
                }
                if points.iter().any(|p| !(p.1 >= 0.0 && p.1.is_finite())) {
                    return Err(Error::validation("tabulated weights must be non-negative"));
                }
                if points.len() == 1 {
                    vec![(points[0].0, 1.0)]
                } else {
                    // trapezoid: each point carries half of its neighbouring intervals
                    let last = points.len() - 1;
                    points
                        .iter()
                        .enumerate()
                        .map(|(i, &(k, a2))| {
                            let left = if i > 0 { k - points[i - 1].0 } else { 0.0 };
                            let right = if i < last { points[i + 1].0 - k } else { 0.0 };
                            (k, 0.5 * (left + right) * a2)
                        })
                        .collect()
                }
            }
        };
        if let Some(&(k, _)) = nodes.iter().find(|(k, _)| !(*k > 0.0 && k.is_finite())) {
            return Err(Error::validation(format!(
                "quadrature node at k/kappa = {k} is not positive"
            )));
        }
        let total: f64 = nodes.iter().map(|n| n.1).sum();
        if !(total > 0.0) {
            return Err(Error::validation("wave packet has zero total weight"));
        }
        Ok(nodes.into_iter().map(|(k, w)| (k, w / total)).collect())
    }
}

/// ∫ dk |A(k)|² f(k), accumulated in ascending k.
pub fn wavepacket_average<F>(spec: &WavePacketSpec, mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut acc = 0.0;
    for (k, w) in spec.quadrature()? {
        if w == 0.0 {
            continue;
        }
        acc += w * f(k)?;
    }
    Ok(acc)
}
