//! Populations, photon statistics and reflection/transmission probabilities
//! after one atom has crossed the cavity.
//!
//! Everything here is a closed expression in the dressed coordinates and the
//! channel amplitudes; no phase χ_n appears in any of them.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dressed::{
    to_dressed_coordinates, trapping_state, DressedCoordinates, DressedEntry, PureStateSpec,
    TrappingParam,
};
use crate::error::{Error, Result};
use crate::scattering::{AmplitudeSource, Amplitudes, Branch, Channel};
use crate::wavepacket::WavePacketSpec;

/// Default truncation of the coherent tail of trapping states.
pub const DEFAULT_EPSILON_TAIL: f64 = 1e-12;

/// K_n per photon number.
pub type KernelMap = BTreeMap<usize, Complex64>;

/// K_n = r⁺ r⁻* + t⁺ t⁻*.
pub fn kernel_k(plus: &Amplitudes, minus: &Amplitudes) -> Result<Complex64> {
    if plus.channel.branch != Branch::Plus || minus.channel.branch != Branch::Minus {
        return Err(Error::validation("kernel needs one + and one - amplitude"));
    }
    if plus.channel.n != minus.channel.n || plus.k != minus.k {
        return Err(Error::validation(format!(
            "kernel amplitudes disagree: {} at k={} vs {} at k={}",
            plus.channel, plus.k, minus.channel, minus.k
        )));
    }
    Ok(plus.r * minus.r.conj() + plus.t * minus.t.conj())
}

/// Δ_n = (w_n²/2) sin θ_n [Re(e^{iφ_n} K_n) − cos φ_n].
pub fn delta_n(entry: &DressedEntry, k: Complex64) -> f64 {
    let s = entry.sin_theta();
    if s == 0.0 {
        return 0.0;
    }
    let rotated = Complex64::from_polar(1.0, entry.phi) * k;
    0.5 * entry.w * entry.w * s * (rotated.re - entry.phi.cos())
}

/// σ_aa(0) = ½[1 − w₋₁² + Σ w_n² sin θ_n cos φ_n].
pub fn sigma_aa_initial(coords: &DressedCoordinates) -> f64 {
    let sum: f64 = coords
        .entries
        .iter()
        .map(|e| e.w * e.w * e.sin_theta() * e.phi.cos())
        .sum();
    (0.5 * (1.0 - coords.w_minus1 * coords.w_minus1 + sum)).clamp(0.0, 1.0)
}

fn occupied(coords: &DressedCoordinates, n: usize) -> Option<&DressedEntry> {
    coords
        .entries
        .get(n)
        .filter(|e| e.w > crate::dressed::OCCUPIED_CUTOFF)
}

fn delta_at(coords: &DressedCoordinates, kernels: &KernelMap, n: usize) -> Result<f64> {
    match occupied(coords, n) {
        None => Ok(0.0),
        Some(e) => {
            let k = kernels.get(&n).ok_or_else(|| {
                Error::validation(format!("no kernel K_n for occupied level n = {n}"))
            })?;
            Ok(delta_n(e, *k))
        }
    }
}

/// δσ_aa = Σ_n Δ_n.
pub fn delta_sigma_aa(coords: &DressedCoordinates, kernels: &KernelMap) -> Result<f64> {
    (0..coords.entries.len())
        .map(|n| delta_at(coords, kernels, n))
        .sum()
}

/// δP_n = Δ_n − Δ_{n−1} (n ≥ 1), Δ_0 (n = 0).
pub fn delta_p(coords: &DressedCoordinates, kernels: &KernelMap, n: usize) -> Result<f64> {
    let here = delta_at(coords, kernels, n)?;
    if n == 0 {
        Ok(here)
    } else {
        Ok(here - delta_at(coords, kernels, n - 1)?)
    }
}

/// (R, T) at one wave number. Only channels with non-zero weight are queried.
pub fn reflection_transmission(
    coords: &DressedCoordinates,
    source: &dyn AmplitudeSource,
    k: f64,
) -> Result<(f64, f64)> {
    let mut r_sum = 0.0;
    let mut t_sum = coords.w_minus1 * coords.w_minus1;
    for n in 0..coords.entries.len() {
        let Some(e) = occupied(coords, n) else {
            continue;
        };
        let w2 = e.w * e.w;
        let (cos2, sin2) = e.half_angle_weights();
        for (weight, branch) in [(cos2, Branch::Plus), (sin2, Branch::Minus)] {
            if weight == 0.0 {
                continue;
            }
            let a = source.amplitudes(Channel::new(n as u32, branch), k)?;
            r_sum += w2 * weight * a.reflection();
            t_sum += w2 * weight * a.transmission();
        }
    }
    Ok((r_sum, t_sum))
}

/// (R, T) for |γ±⟩; only the matching branch is ever consulted.
pub fn trapping_rt(
    p: &TrappingParam,
    source: &dyn AmplitudeSource,
    k: f64,
    epsilon_tail: f64,
) -> Result<(f64, f64)> {
    let coords = trapping_state(p, epsilon_tail)?;
    reflection_transmission(&coords, source, k)
}

/// Ultracold |γ⁺⟩ limit (|t_n⁺| = 0): R = 2|γ|²/(1+|γ|²), T = (1−|γ|²)/(1+|γ|²).
pub fn ultracold_rt_plus(gamma_abs: f64) -> (f64, f64) {
    let g2 = gamma_abs * gamma_abs;
    (2.0 * g2 / (1.0 + g2), (1.0 - g2) / (1.0 + g2))
}

/// Initial internal state of the atom-field system.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Pure(PureStateSpec),
    Trapping(TrappingParam),
}

impl InitialState {
    pub fn coordinates(&self, epsilon_tail: f64) -> Result<DressedCoordinates> {
        match self {
            InitialState::Pure(s) => to_dressed_coordinates(s),
            InitialState::Trapping(p) => trapping_state(p, epsilon_tail),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerLevel {
    pub n: usize,
    #[serde(rename = "re_K")]
    pub re_k: f64,
    #[serde(rename = "im_K")]
    pub im_k: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
    #[serde(rename = "delta_P")]
    pub delta_p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservablesReport {
    pub sigma_aa_initial: f64,
    pub delta_sigma_aa: f64,
    /// n = 0 ..= highest occupied level + 1.
    pub per_n: Vec<PerLevel>,
    #[serde(rename = "R")]
    pub reflection: f64,
    #[serde(rename = "T")]
    pub transmission: f64,
    pub k: WavePacketSpec,
}

impl ObservablesReport {
    /// Per-level CSV: n, re_K, im_K, Delta, delta_P.
    pub fn per_n_csv(&self) -> String {
        let mut out = String::from("n,re_K,im_K,Delta,delta_P\n");
        for row in &self.per_n {
            let vals = [row.re_k, row.im_k, row.delta, row.delta_p].map(crate::io::fmt_f64);
            out.push_str(&format!("{},{}\n", row.n, vals.join(",")));
        }
        out
    }

    pub fn delta_p(&self, n: usize) -> f64 {
        self.per_n.get(n).map_or(0.0, |row| row.delta_p)
    }
}

struct Snapshot {
    kernels: Vec<Complex64>,
    deltas: Vec<f64>,
    delta_ps: Vec<f64>,
    delta_sigma: f64,
    r: f64,
    t: f64,
}

fn snapshot(
    coords: &DressedCoordinates,
    source: &dyn AmplitudeSource,
    k: f64,
    levels: usize,
) -> Result<Snapshot> {
    let channels: Vec<Channel> = (0..levels as u32)
        .flat_map(|n| Branch::BOTH.map(|b| Channel::new(n, b)))
        .collect();
    let amps = channels
        .par_iter()
        .map(|&ch| source.amplitudes(ch, k))
        .collect::<Result<Vec<_>>>()?;
    let kernels: Vec<Complex64> = amps
        .chunks(2)
        .map(|pair| kernel_k(&pair[0], &pair[1]))
        .collect::<Result<_>>()?;
    let kernel_map: KernelMap = kernels.iter().copied().enumerate().collect();
    let deltas = (0..levels)
        .map(|n| delta_at(coords, &kernel_map, n))
        .collect::<Result<Vec<_>>>()?;
    let delta_ps = (0..levels)
        .map(|n| delta_p(coords, &kernel_map, n))
        .collect::<Result<Vec<_>>>()?;
    let delta_sigma = delta_sigma_aa(coords, &kernel_map)?;
    let table: BTreeMap<Channel, Amplitudes> = amps.into_iter().map(|a| (a.channel, a)).collect();
    let (r, t) = reflection_transmission(coords, &MapSource(&table), k)?;
    Ok(Snapshot {
        kernels,
        deltas,
        delta_ps,
        delta_sigma,
        r,
        t,
    })
}

struct MapSource<'a>(&'a BTreeMap<Channel, Amplitudes>);

impl AmplitudeSource for MapSource<'_> {
    fn amplitudes(&self, channel: Channel, _k: f64) -> Result<Amplitudes> {
        self.0
            .get(&channel)
            .copied()
            .ok_or(Error::MissingChannel(channel))
    }
}

/// Builds coordinates, fetches amplitudes up to one level above the highest
/// occupied one, and evaluates every observable, |A(k)|²-averaged.
pub fn full_report(
    state: &InitialState,
    source: &dyn AmplitudeSource,
    incidence: &WavePacketSpec,
    epsilon_tail: f64,
) -> Result<ObservablesReport> {
    let coords = state
        .coordinates(epsilon_tail)
        .map_err(|e| e.in_stage("building dressed coordinates"))?;
    let nodes = incidence
        .quadrature()
        .map_err(|e| e.in_stage("wave-packet quadrature"))?;
    let levels = coords.highest_occupied().map_or(1, |n| n + 2);

    let mut kernels = vec![Complex64::new(0.0, 0.0); levels];
    let mut deltas = vec![0.0; levels];
    let mut delta_ps = vec![0.0; levels];
    let (mut delta_sigma, mut r, mut t) = (0.0, 0.0, 0.0);
    for (k, weight) in nodes {
        let snap = snapshot(&coords, source, k, levels).map_err(|e| e.in_stage("scattering"))?;
        for n in 0..levels {
            kernels[n] += weight * snap.kernels[n];
            deltas[n] += weight * snap.deltas[n];
            delta_ps[n] += weight * snap.delta_ps[n];
        }
        delta_sigma += weight * snap.delta_sigma;
        r += weight * snap.r;
        t += weight * snap.t;
    }
    let per_n = (0..levels)
        .map(|n| PerLevel {
            n,
            re_k: kernels[n].re,
            im_k: kernels[n].im,
            delta: deltas[n],
            delta_p: delta_ps[n],
        })
        .collect();
    Ok(ObservablesReport {
        sigma_aa_initial: sigma_aa_initial(&coords),
        delta_sigma_aa: delta_sigma,
        per_n,
        reflection: r,
        transmission: t,
        k: incidence.clone(),
    })
}
