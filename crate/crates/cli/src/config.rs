//! Run configuration: defaults, command-line flags and an optional JSON file,
//! merged with file values taking precedence over flags.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use mazer_core::io::StateFile;
use mazer_core::profile::{ProfileDescriptor, ProfileMode};
use mazer_core::{
    Branch, PureStateSpec, SolverConfig, TrappingParam, WavePacketSpec, DEFAULT_EPSILON_TAIL,
};
use num_complex::Complex64;
use serde::Deserialize;

use crate::error::CliError;

pub const DEFAULT_K: f64 = 0.1;
pub const DEFAULT_KAPPA_L: f64 = 10.0;
pub const DEFAULT_N_MAX: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
pub enum Axis {
    #[serde(rename = "gamma_abs")]
    #[value(name = "gamma_abs")]
    GammaAbs,
    #[serde(rename = "k_over_kappa")]
    #[value(name = "k_over_kappa")]
    KOverKappa,
    #[serde(rename = "kappa_L")]
    #[value(name = "kappa_L")]
    KappaL,
}

impl Axis {
    pub fn column(self) -> &'static str {
        match self {
            Axis::GammaAbs => "gamma_abs",
            Axis::KOverKappa => "k_over_kappa",
            Axis::KappaL => "kappa_L",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: Axis,
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.from];
        }
        (0..self.points)
            .map(|i| self.from + (self.to - self.from) * i as f64 / (self.points - 1) as f64)
            .collect()
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(format!("sweep: {msg}")));
        if self.points == 0 {
            return bad("points must be at least 1".into());
        }
        if !(self.from.is_finite() && self.to.is_finite() && self.from <= self.to) {
            return bad(format!("range [{}, {}] is not ordered", self.from, self.to));
        }
        if self.points > 1 && self.from == self.to {
            return bad("a multi-point sweep needs from < to".into());
        }
        let ok = match self.axis {
            Axis::GammaAbs => self.from >= 0.0 && self.to < 1.0,
            Axis::KOverKappa | Axis::KappaL => self.from > 0.0,
        };
        if !ok {
            return bad(format!(
                "range [{}, {}] leaves the domain of {}",
                self.from,
                self.to,
                self.axis.column()
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOverrides {
    pub segments: Option<usize>,
    pub support_epsilon: Option<f64>,
    pub unitarity_tol: Option<f64>,
}

/// γ as a bare modulus or as [re, im].
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GammaValue {
    Real(f64),
    Complex([f64; 2]),
}

/// Every setting, each optional. Used both for the JSON file and for flags.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Partial {
    pub mode: Option<String>,
    #[serde(rename = "kappa_L")]
    pub kappa_l: Option<f64>,
    pub width: Option<f64>,
    pub lobes: Option<u32>,
    pub expr: Option<String>,
    pub k_over_kappa: Option<f64>,
    pub wave_packet: Option<WavePacketSpec>,
    pub state: Option<StateFile>,
    pub state_file: Option<PathBuf>,
    pub gamma: Option<GammaValue>,
    pub gamma_phase: Option<f64>,
    pub branch: Option<String>,
    pub sweep: Option<SweepSpec>,
    pub solver: Option<SolverOverrides>,
    pub n_max: Option<u32>,
    pub epsilon_tail: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Partial {
    fn has_state(&self) -> bool {
        self.state.is_some() || self.state_file.is_some() || self.gamma.is_some()
    }

    fn has_incidence(&self) -> bool {
        self.k_over_kappa.is_some() || self.wave_packet.is_some()
    }

    /// `self` overridden by `top`. State and incidence are replaced as a
    /// group so one source never mixes with another.
    pub fn overridden_by(mut self, top: Partial) -> Partial {
        if top.has_state() {
            self.state = None;
            self.state_file = None;
            self.gamma = None;
        }
        if top.has_incidence() {
            self.k_over_kappa = None;
            self.wave_packet = None;
        }
        let solver = match (self.solver, top.solver) {
            (Some(a), Some(b)) => Some(SolverOverrides {
                segments: b.segments.or(a.segments),
                support_epsilon: b.support_epsilon.or(a.support_epsilon),
                unitarity_tol: b.unitarity_tol.or(a.unitarity_tol),
            }),
            (a, b) => b.or(a),
        };
        Partial {
            mode: top.mode.or(self.mode),
            kappa_l: top.kappa_l.or(self.kappa_l),
            width: top.width.or(self.width),
            lobes: top.lobes.or(self.lobes),
            expr: top.expr.or(self.expr),
            k_over_kappa: top.k_over_kappa.or(self.k_over_kappa),
            wave_packet: top.wave_packet.or(self.wave_packet),
            state: top.state.or(self.state),
            state_file: top.state_file.or(self.state_file),
            gamma: top.gamma.or(self.gamma),
            gamma_phase: top.gamma_phase.or(self.gamma_phase),
            branch: top.branch.or(self.branch),
            sweep: top.sweep.or(self.sweep),
            solver,
            n_max: top.n_max.or(self.n_max),
            epsilon_tail: top.epsilon_tail.or(self.epsilon_tail),
            out: top.out.or(self.out),
            format: top.format.or(self.format),
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON configuration file; its values override flags
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Mode profile: mesa, sech2, gaussian, sin or expr
    #[arg(long, global = true)]
    pub mode: Option<String>,
    /// Cavity length in units of 1/kappa
    #[arg(long = "kappa-l", global = true)]
    pub kappa_l: Option<f64>,
    /// Width of sech2 or gaussian profiles
    #[arg(long, global = true)]
    pub width: Option<f64>,
    /// Number of half-wave lobes of the sin profile
    #[arg(long, global = true)]
    pub lobes: Option<u32>,
    /// Mode expression in z and L, for --mode expr
    #[arg(long, global = true)]
    pub expr: Option<String>,
    /// Incident wave number in units of kappa
    #[arg(long, global = true)]
    pub k: Option<f64>,
    /// Trapping-state parameter |gamma|
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// Phase of gamma in radians
    #[arg(long = "gamma-phase", global = true)]
    pub gamma_phase: Option<f64>,
    /// Trapping-state branch, + or -
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub branch: Option<String>,
    /// Initial state as a JSON file
    #[arg(long = "state-file", global = true)]
    pub state_file: Option<PathBuf>,
    /// Highest photon number for amplitude tables
    #[arg(long, global = true)]
    pub nmax: Option<u32>,
    /// Transfer-matrix slices
    #[arg(long, global = true)]
    pub segments: Option<usize>,
    /// Output path; standard output when absent
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Sweep axis
    #[arg(long, global = true, value_enum)]
    pub axis: Option<Axis>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub from: Option<f64>,
    #[arg(long, global = true)]
    pub to: Option<f64>,
    #[arg(long, global = true)]
    pub points: Option<usize>,
}

impl Flags {
    pub fn to_partial(&self) -> Result<Partial, CliError> {
        let sweep = match (self.axis, self.from, self.to, self.points) {
            (None, None, None, None) => None,
            (Some(axis), Some(from), Some(to), Some(points)) => Some(SweepSpec {
                axis,
                from,
                to,
                points,
            }),
            _ => {
                return Err(CliError::Config(
                    "--axis, --from, --to and --points go together".into(),
                ))
            }
        };
        Ok(Partial {
            mode: self.mode.clone(),
            kappa_l: self.kappa_l,
            width: self.width,
            lobes: self.lobes,
            expr: self.expr.clone(),
            k_over_kappa: self.k,
            state_file: self.state_file.clone(),
            gamma: self.gamma.map(GammaValue::Real),
            gamma_phase: self.gamma_phase,
            branch: self.branch.clone(),
            sweep,
            solver: self.segments.map(|s| SolverOverrides {
                segments: Some(s),
                ..Default::default()
            }),
            n_max: self.nmax,
            out: self.out.clone(),
            format: self.format,
            ..Default::default()
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateSource {
    Pure(PureStateSpec),
    Trapping(TrappingParam),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub profile: ProfileDescriptor,
    pub incidence: WavePacketSpec,
    /// None when no state was given; commands pick their own default.
    pub state: Option<StateSource>,
    pub branch: Branch,
    pub gamma_phase: f64,
    pub sweep: Option<SweepSpec>,
    pub solver: SolverConfig,
    pub n_max: u32,
    pub epsilon_tail: f64,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

fn parse_mode(s: &str) -> Result<ProfileMode, CliError> {
    Ok(match s {
        "mesa" => ProfileMode::Mesa,
        "sech2" => ProfileMode::Sech2,
        "gaussian" => ProfileMode::Gaussian,
        "sin" => ProfileMode::Sin,
        "expr" => ProfileMode::Expr,
        _ => {
            return Err(CliError::Config(format!(
                "unknown mode `{s}`, expected mesa, sech2, gaussian, sin or expr"
            )))
        }
    })
}

impl RunConfig {
    /// Reads the config file (if any) and merges it over the flags.
    pub fn load(flags: &Flags) -> Result<RunConfig, CliError> {
        let mut merged = flags.to_partial()?;
        if let Some(path) = &flags.config {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let file: Partial = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            merged = merged.overridden_by(file);
        }
        RunConfig::resolve(merged)
    }

    pub fn resolve(p: Partial) -> Result<RunConfig, CliError> {
        let profile = ProfileDescriptor {
            mode: parse_mode(p.mode.as_deref().unwrap_or("mesa"))?,
            kappa_l: p.kappa_l.unwrap_or(DEFAULT_KAPPA_L),
            width: p.width,
            lobes: p.lobes,
            expr: p.expr,
        };
        profile.build()?;

        let incidence = match (p.wave_packet, p.k_over_kappa) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "give either k_over_kappa or wave_packet, not both".into(),
                ))
            }
            (Some(w), None) => w,
            (None, k) => WavePacketSpec::monochromatic(k.unwrap_or(DEFAULT_K)),
        };
        incidence.quadrature()?;

        let branch = match p.branch.as_deref() {
            None => Branch::Plus,
            Some(s) => s.parse()?,
        };
        let gamma_phase = p.gamma_phase.unwrap_or(0.0);
        if !gamma_phase.is_finite() {
            return Err(CliError::Config("gamma_phase must be finite".into()));
        }
        let sources = [p.state.is_some(), p.state_file.is_some(), p.gamma.is_some()];
        if sources.iter().filter(|&&s| s).count() > 1 {
            return Err(CliError::Config(
                "give at most one of state, state_file and gamma".into(),
            ));
        }
        let state = if let Some(s) = p.state {
            Some(StateSource::Pure(s.into_state()?))
        } else if let Some(path) = &p.state_file {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let file: StateFile = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            Some(StateSource::Pure(file.into_state()?))
        } else if let Some(g) = p.gamma {
            let gamma = match g {
                GammaValue::Real(m) => Complex64::from_polar(m, gamma_phase),
                GammaValue::Complex([re, im]) => Complex64::new(re, im),
            };
            Some(StateSource::Trapping(TrappingParam::new(gamma, branch)?))
        } else {
            None
        };

        if let Some(s) = &p.sweep {
            s.validate()?;
        }

        let mut solver = SolverConfig::default();
        if let Some(o) = p.solver {
            solver.segments = o.segments.unwrap_or(solver.segments);
            solver.support_epsilon = o.support_epsilon.unwrap_or(solver.support_epsilon);
            solver.unitarity_tol = o.unitarity_tol.unwrap_or(solver.unitarity_tol);
        }
        solver.validate()?;

        let epsilon_tail = p.epsilon_tail.unwrap_or(DEFAULT_EPSILON_TAIL);
        if !(epsilon_tail > 0.0 && epsilon_tail < 1.0) {
            return Err(CliError::Config(format!(
                "epsilon_tail must lie in (0, 1), got {epsilon_tail}"
            )));
        }

        Ok(RunConfig {
            profile,
            incidence,
            state,
            branch,
            gamma_phase,
            sweep: p.sweep,
            solver,
            n_max: p.n_max.unwrap_or(DEFAULT_N_MAX),
            epsilon_tail,
            out: p.out,
            format: p.format,
        })
    }
}
