//! One-dimensional scattering on the dressed-channel potentials.
//!
//! Channel (n, ±) solves φ'' + (k² ∓ κ_n² u(z)) φ = 0 with κ_n² = √(n+1)
//! (dimensionless: z in 1/κ, k in κ). Amplitudes follow the asymptotic
//! convention φ = e^{ikz} + r e^{−ikz} for z < 0 and φ = t e^{ik(z−L)} for
//! z > L, so an empty cavity gives r = 0, t = e^{ikL}.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{ModeProfile, ProfileShape};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Branch {
    /// Barrier channel, potential +κ_n² u(z).
    #[serde(rename = "+")]
    Plus,
    /// Well channel, potential −κ_n² u(z).
    #[serde(rename = "-")]
    Minus,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Plus, Branch::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Branch::Plus => "+",
            Branch::Minus => "-",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" => Ok(Branch::Plus),
            "-" | "minus" => Ok(Branch::Minus),
            _ => Err(Error::validation(format!(
                "unknown branch `{s}`, expected + or -"
            ))),
        }
    }
}

/// Dressed scattering channel (n, ±). Orders by n, then `+` before `−`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Channel {
    pub n: u32,
    pub branch: Branch,
}

impl Channel {
    pub fn new(n: u32, branch: Branch) -> Self {
        Channel { n, branch }
    }

    /// Signed dimensionless potential strength ±κ_n²/κ².
    pub fn strength(self) -> f64 {
        self.branch.sign() * ((self.n + 1) as f64).sqrt()
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n={}, {})", self.n, self.branch)
    }
}

/// κ_n/κ = (n+1)^{1/4}.
pub fn kappa_n_ratio(n: u32) -> f64 {
    ((n + 1) as f64).sqrt().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Amplitudes {
    pub channel: Channel,
    /// k/κ
    pub k: f64,
    pub r: Complex64,
    pub t: Complex64,
    /// Estimated absolute error in r and t; zero for closed-form results.
    pub error_estimate: f64,
}

impl Amplitudes {
    pub fn reflection(&self) -> f64 {
        self.r.norm_sqr()
    }

    pub fn transmission(&self) -> f64 {
        self.t.norm_sqr()
    }

    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(self.r, self.t)
    }
}

/// | |r|² + |t|² − 1 |
pub fn unitarity_defect(r: Complex64, t: Complex64) -> f64 {
    (r.norm_sqr() + t.norm_sqr() - 1.0).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Piecewise-constant slices over the effective support (the solver also
    /// runs at twice this count for Richardson extrapolation).
    pub segments: usize,
    pub support_epsilon: f64,
    pub unitarity_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            segments: 4096,
            support_epsilon: 1e-10,
            unitarity_tol: 1e-6,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.segments < 2 {
            return Err(Error::validation(format!(
                "segments must be at least 2, got {}",
                self.segments
            )));
        }
        for (name, v) in [
            ("support_epsilon", self.support_epsilon),
            ("unitarity_tol", self.unitarity_tol),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::validation(format!(
                    "{name} must lie in (0, 1), got {v}"
                )));
            }
        }
        Ok(())
    }
}

fn check_wave_number(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(format!(
            "k/kappa must be positive and finite, got {k}"
        )))
    }
}

/// Closed-form amplitudes for a constant potential `height` on [0, length].
///
/// With q² = k² − height, writes c = cos(qL), s = sin(qL)/q (hyperbolic for
/// q² < 0, Taylor series near q = 0); then
/// t = 1/(c − i(k²+q²)s/2k) and r = −i(k²−q²)s/2k · t.
pub fn square_potential_amplitudes(k: f64, height: f64, length: f64) -> (Complex64, Complex64) {
    let q2 = k * k - height;
    let x = q2 * length * length;
    // c = e^scale · c_s, s = e^scale · s_s
    let (c_s, s_s, scale) = if x.abs() < 1e-8 {
        (
            1.0 - x / 2.0 + x * x / 24.0,
            length * (1.0 - x / 6.0 + x * x / 120.0),
            0.0,
        )
    } else if q2 > 0.0 {
        let q = q2.sqrt();
        ((q * length).cos(), (q * length).sin() / q, 0.0)
    } else {
        let kap = (-q2).sqrt();
        let y = kap * length;
        if y < 1.0 {
            (y.cosh(), y.sinh() / kap, 0.0)
        } else {
            let e = (-2.0 * y).exp();
            (0.5 * (1.0 + e), -0.5 * (-2.0 * y).exp_m1() / kap, y)
        }
    };
    let a = (k * k + q2) / (2.0 * k);
    let b = height / (2.0 * k);
    let den = Complex64::new(c_s, -a * s_s);
    let t = Complex64::new((-scale).exp(), 0.0) / den;
    let r = Complex64::new(0.0, -b * s_s) / den;
    (r, t)
}

/// Closed-form square barrier (+) / square well (−) amplitudes for the mesa mode.
pub fn scatter_mesa_analytic(channel: Channel, k: f64, kappa_l: f64) -> Result<Amplitudes> {
    check_wave_number(k)?;
    if !(kappa_l > 0.0 && kappa_l.is_finite()) {
        return Err(Error::validation(format!(
            "kappa_L must be positive and finite, got {kappa_l}"
        )));
    }
    let (r, t) = square_potential_amplitudes(k, channel.strength(), kappa_l);
    Ok(Amplitudes {
        channel,
        k,
        r,
        t,
        error_estimate: 0.0,
    })
}

/// Mode function sampled at slice midpoints over its effective support.
#[derive(Debug, Clone)]
pub struct SampledProfile {
    z_min: f64,
    width: f64,
    cavity_length: f64,
    samples: Vec<f64>,
}

impl SampledProfile {
    pub fn new(profile: &ModeProfile, segments: usize, support_epsilon: f64) -> Result<Self> {
        let (z_min, z_max) = profile.effective_support(support_epsilon);
        let width = z_max - z_min;
        let h = width / segments as f64;
        let samples = (0..segments)
            .map(|j| profile.eval(z_min + (j as f64 + 0.5) * h))
            .collect::<Result<Vec<_>>>()?;
        Ok(SampledProfile {
            z_min,
            width,
            cavity_length: profile.cavity_length(),
            samples,
        })
    }

    pub fn segments(&self) -> usize {
        self.samples.len()
    }

    /// Composes the slice transfer matrices for one channel and extracts (r, t).
    pub fn propagate(&self, channel: Channel, k: f64) -> (Complex64, Complex64) {
        let h = self.width / self.samples.len() as f64;
        let strength = channel.strength();
        let k2 = k * k;
        let mut prop = Propagator::identity();
        for &u in &self.samples {
            prop.step(k2 - strength * u, h);
        }
        prop.amplitudes(k, self.z_min, self.width, self.cavity_length)
    }
}

/// Real transfer matrix on (φ, φ') with an accumulated log-magnitude, so deep
/// evanescent stretches never overflow.
#[derive(Debug, Clone, Copy)]
struct Propagator {
    m: [[f64; 2]; 2],
    log_scale: f64,
}

const RESCALE_ABOVE: f64 = 1e64;

impl Propagator {
    fn identity() -> Self {
        Propagator {
            m: [[1.0, 0.0], [0.0, 1.0]],
            log_scale: 0.0,
        }
    }

    /// Left-multiplies by the exact propagator of a slice of width `h` with
    /// constant local wave number squared `q2`.
    fn step(&mut self, q2: f64, h: f64) {
        let x = q2 * h * h;
        let (c, s, minus_q2_s, scale) = if x.abs() < 1e-8 {
            // |q|h < 1e-4: series around the branch point
            let c = 1.0 - x / 2.0;
            let s = h * (1.0 - x / 6.0);
            (c, s, -q2 * s, 0.0)
        } else if q2 > 0.0 {
            let q = q2.sqrt();
            let (sn, cs) = (q * h).sin_cos();
            (cs, sn / q, -q * sn, 0.0)
        } else {
            let kap = (-q2).sqrt();
            let y = kap * h;
            if y < 1.0 {
                let sh = y.sinh();
                (y.cosh(), sh / kap, kap * sh, 0.0)
            } else {
                let e = (-2.0 * y).exp();
                let sh = -0.5 * (-2.0 * y).exp_m1();
                (0.5 * (1.0 + e), sh / kap, kap * sh, y)
            }
        };
        let [[a, b], [cc, d]] = self.m;
        self.m = [
            [c * a + s * cc, c * b + s * d],
            [minus_q2_s * a + c * cc, minus_q2_s * b + c * d],
        ];
        self.log_scale += scale;
        let big = self
            .m
            .iter()
            .flatten()
            .fold(0.0f64, |acc, v| acc.max(v.abs()));
        if big > RESCALE_ABOVE {
            self.m.iter_mut().flatten().for_each(|v| *v /= big);
            self.log_scale += big.ln();
        }
    }

    /// Matches free waves at both ends of [z_min, z_min + width].
    fn amplitudes(&self, k: f64, z_min: f64, width: f64, length: f64) -> (Complex64, Complex64) {
        let [[m11, m12], [m21, m22]] = self.m;
        let i = Complex64::i();
        let alpha = i * k * m11 - m21;
        let beta = i * k * m22 + k * k * m12;
        let sum = alpha + beta;
        let r = (beta - alpha) / sum * Complex64::from_polar(1.0, 2.0 * k * z_min);
        let t = 2.0 * i * k * (-self.log_scale).exp() / sum
            * Complex64::from_polar(1.0, -k * (width - length));
        (r, t)
    }
}

/// Piecewise-constant transfer-matrix solution with one Richardson step.
pub fn scatter_transfer_matrix(
    profile: &ModeProfile,
    channel: Channel,
    k: f64,
    config: &SolverConfig,
) -> Result<Amplitudes> {
    Solver::new(profile.clone(), *config)?.transfer_matrix(channel, k)
}

/// Analytic path for the mesa mode, transfer matrix otherwise.
pub fn scatter(
    profile: &ModeProfile,
    channel: Channel,
    k: f64,
    config: &SolverConfig,
) -> Result<Amplitudes> {
    match profile.shape() {
        ProfileShape::Mesa => scatter_mesa_analytic(channel, k, profile.cavity_length()),
        _ => scatter_transfer_matrix(profile, channel, k, config),
    }
}

/// Anything that can produce channel amplitudes at a given wave number.
pub trait AmplitudeSource: Sync {
    fn amplitudes(&self, channel: Channel, k: f64) -> Result<Amplitudes>;
}

/// Profile + solver settings, with the slice samples cached.
#[derive(Debug, Clone)]
pub struct Solver {
    profile: ModeProfile,
    config: SolverConfig,
    grids: Option<(SampledProfile, SampledProfile)>,
}

impl Solver {
    pub fn new(profile: ModeProfile, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        let grids = match profile.shape() {
            ProfileShape::Mesa => None,
            _ => Some((
                SampledProfile::new(&profile, config.segments, config.support_epsilon)?,
                SampledProfile::new(&profile, 2 * config.segments, config.support_epsilon)?,
            )),
        };
        Ok(Solver {
            profile,
            config,
            grids,
        })
    }

    pub fn profile(&self) -> &ModeProfile {
        &self.profile
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn transfer_matrix(&self, channel: Channel, k: f64) -> Result<Amplitudes> {
        check_wave_number(k)?;
        let owned;
        let (coarse, fine) = match &self.grids {
            Some((c, f)) => (c, f),
            None => {
                owned = (
                    SampledProfile::new(
                        &self.profile,
                        self.config.segments,
                        self.config.support_epsilon,
                    )?,
                    SampledProfile::new(
                        &self.profile,
                        2 * self.config.segments,
                        self.config.support_epsilon,
                    )?,
                );
                (&owned.0, &owned.1)
            }
        };
        let (r1, t1) = coarse.propagate(channel, k);
        let (r2, t2) = fine.propagate(channel, k);
        // midpoint slicing is second order in the slice width
        let r = (4.0 * r2 - r1) / 3.0;
        let t = (4.0 * t2 - t1) / 3.0;
        let error_estimate = (r2 - r1).norm().max((t2 - t1).norm()) / 3.0;
        let defect = unitarity_defect(r, t);
        if !(defect <= self.config.unitarity_tol) {
            return Err(Error::Unitarity {
                channel,
                k,
                defect,
                tol: self.config.unitarity_tol,
            });
        }
        Ok(Amplitudes {
            channel,
            k,
            r,
            t,
            error_estimate,
        })
    }

    pub fn scatter(&self, channel: Channel, k: f64) -> Result<Amplitudes> {
        match self.profile.shape() {
            ProfileShape::Mesa => scatter_mesa_analytic(channel, k, self.profile.cavity_length()),
            _ => self.transfer_matrix(channel, k),
        }
    }
}

impl AmplitudeSource for Solver {
    fn amplitudes(&self, channel: Channel, k: f64) -> Result<Amplitudes> {
        self.scatter(channel, k)
    }
}

/// Amplitudes for n = 0..=n_max, both branches, every k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeTable {
    n_max: u32,
    k_list: Vec<f64>,
    /// Ordered by n, then branch (+ first), then position in `k_list`.
    entries: Vec<Amplitudes>,
}

impl AmplitudeTable {
    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn k_list(&self) -> &[f64] {
        &self.k_list
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Amplitudes> {
        self.entries.iter()
    }

    pub fn get(&self, channel: Channel, k: f64) -> Option<&Amplitudes> {
        if channel.n > self.n_max {
            return None;
        }
        let ki = self.k_list.iter().position(|&x| x == k)?;
        let b = match channel.branch {
            Branch::Plus => 0,
            Branch::Minus => 1,
        };
        self.entries
            .get((channel.n as usize * 2 + b) * self.k_list.len() + ki)
    }

    /// CSV with columns n, branch, k_over_kappa, re_r, im_r, re_t, im_t, defect.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,branch,k_over_kappa,re_r,im_r,re_t,im_t,defect\n");
        for a in &self.entries {
            let row = [a.k, a.r.re, a.r.im, a.t.re, a.t.im, a.unitarity_defect()]
                .map(crate::io::fmt_f64)
                .join(",");
            out.push_str(&format!("{},{},{}\n", a.channel.n, a.channel.branch, row));
        }
        out
    }
}

impl AmplitudeSource for AmplitudeTable {
    fn amplitudes(&self, channel: Channel, k: f64) -> Result<Amplitudes> {
        self.get(channel, k)
            .copied()
            .ok_or(Error::MissingChannel(channel))
    }
}

/// Builds the full table. Channels run in parallel; the first failure in table
/// order is reported.
pub fn amplitude_table(
    profile: &ModeProfile,
    n_max: u32,
    k_list: &[f64],
    config: &SolverConfig,
) -> Result<AmplitudeTable> {
    let solver = Solver::new(profile.clone(), *config)?;
    amplitude_table_from(&solver, n_max, k_list)
}

pub fn amplitude_table_from(
    source: &dyn AmplitudeSource,
    n_max: u32,
    k_list: &[f64],
) -> Result<AmplitudeTable> {
    if k_list.is_empty() {
        return Err(Error::validation("k list is empty"));
    }
    for &k in k_list {
        check_wave_number(k)?;
    }
    let mut sorted = k_list.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let jobs: Vec<(Channel, f64)> = (0..=n_max)
        .flat_map(|n| Branch::BOTH.map(|b| Channel::new(n, b)))
        .flat_map(|ch| sorted.iter().map(move |&k| (ch, k)))
        .collect();
    let results: Vec<Result<Amplitudes>> = jobs
        .par_iter()
        .map(|&(ch, k)| {
            source.amplitudes(ch, k).map_err(|e| Error::InChannel {
                channel: ch,
                k,
                source: Box::new(e),
            })
        })
        .collect();
    let entries = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(AmplitudeTable {
        n_max,
        k_list: sorted,
        entries,
    })
}
