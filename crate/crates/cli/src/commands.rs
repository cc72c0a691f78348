//! Subcommand bodies. Each returns the rendered output; nothing is written
//! until the whole computation has succeeded.

use mazer_core::dressed::DressedCoordinates;
use mazer_core::io::to_sorted_json;
use mazer_core::{
    amplitude_table, full_report, trapping_rt, truncation_level, ultracold_rt_plus,
    wavepacket_average, AmplitudeTable, Branch, InitialState, ModeProfile, PureStateSpec, Solver,
    TrappingParam, WavePacketSpec,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Axis, Format, RunConfig, StateSource};
use crate::error::CliError;
use crate::output::{Cell, Table};

pub const FIGURE1_POINTS: usize = 100;
pub const FIGURE1_GAMMA_MAX: f64 = 0.99;

fn initial_state(cfg: &RunConfig) -> InitialState {
    match &cfg.state {
        Some(StateSource::Pure(s)) => InitialState::Pure(s.clone()),
        Some(StateSource::Trapping(p)) => InitialState::Trapping(*p),
        None => InitialState::Pure(PureStateSpec::excited(0)),
    }
}

fn solver(cfg: &RunConfig, profile: ModeProfile) -> Result<Solver, CliError> {
    Ok(Solver::new(profile, cfg.solver)?)
}

fn k_nodes(incidence: &WavePacketSpec) -> Result<Vec<f64>, CliError> {
    Ok(incidence
        .quadrature()?
        .into_iter()
        .map(|(k, _)| k)
        .collect())
}

/// Amplitudes for every level a trapping state with |γ| ≤ `gamma_max` occupies.
fn trapping_table(cfg: &RunConfig, gamma_max: f64) -> Result<AmplitudeTable, CliError> {
    let n_max = truncation_level(gamma_max, cfg.epsilon_tail) as u32 + 1;
    let ks = k_nodes(&cfg.incidence)?;
    Ok(amplitude_table(
        &cfg.profile.build()?,
        n_max,
        &ks,
        &cfg.solver,
    )?)
}

pub fn report(cfg: &RunConfig) -> Result<String, CliError> {
    let source = solver(cfg, cfg.profile.build()?)?;
    let rep = full_report(
        &initial_state(cfg),
        &source,
        &cfg.incidence,
        cfg.epsilon_tail,
    )?;
    match cfg.format.unwrap_or(Format::Json) {
        Format::Json => Ok(to_sorted_json(&rep)?),
        Format::Csv => Ok(rep.per_n_csv()),
    }
}

pub fn figure1(cfg: &RunConfig) -> Result<String, CliError> {
    let gammas: Vec<f64> = (0..FIGURE1_POINTS)
        .map(|i| FIGURE1_GAMMA_MAX * i as f64 / (FIGURE1_POINTS - 1) as f64)
        .collect();
    let table = trapping_table(cfg, FIGURE1_GAMMA_MAX)?;
    let rows = gammas
        .par_iter()
        .map(|&g| {
            let gamma = Complex64::from_polar(g, cfg.gamma_phase);
            let r = |branch| -> Result<f64, CliError> {
                let p = TrappingParam::new(gamma, branch)?;
                Ok(wavepacket_average(&cfg.incidence, |k| {
                    Ok(trapping_rt(&p, &table, k, cfg.epsilon_tail)?.0)
                })?)
            };
            let row = [
                g,
                r(Branch::Plus)?,
                r(Branch::Minus)?,
                ultracold_rt_plus(g).0,
            ];
            Ok(row)
        })
        .collect::<Vec<Result<_, CliError>>>();
    let mut out = Table::new(vec!["gamma_abs", "R_plus", "R_minus", "R_plus_closed_form"]);
    for (g, row) in gammas.iter().zip(rows) {
        out.push_floats(&row.map_err(|e| e.context(format!("gamma_abs = {g}")))?);
    }
    out.render(cfg.format.unwrap_or(Format::Csv))
}

pub fn sweep(cfg: &RunConfig) -> Result<String, CliError> {
    let spec = cfg
        .sweep
        .ok_or_else(|| CliError::Config("sweep needs an axis, range and point count".into()))?;
    let values = spec.values();
    let base_state = initial_state(cfg);
    let shared = match spec.axis {
        Axis::GammaAbs => {
            if matches!(cfg.state, Some(StateSource::Pure(_))) {
                return Err(CliError::Config(
                    "a gamma_abs sweep runs over trapping states; drop the pure state".into(),
                ));
            }
            Some(trapping_table(cfg, spec.to)?)
        }
        _ => None,
    };
    let fixed_solver = match spec.axis {
        Axis::KappaL => None,
        _ => Some(solver(cfg, cfg.profile.build()?)?),
    };
    let rows = values
        .par_iter()
        .map(|&v| -> Result<[f64; 6], CliError> {
            let (state, incidence) = match spec.axis {
                Axis::GammaAbs => {
                    let branch = match cfg.state {
                        Some(StateSource::Trapping(p)) => p.branch(),
                        _ => cfg.branch,
                    };
                    let p = TrappingParam::new(Complex64::from_polar(v, cfg.gamma_phase), branch)?;
                    (InitialState::Trapping(p), cfg.incidence.clone())
                }
                Axis::KOverKappa => (base_state.clone(), WavePacketSpec::monochromatic(v)),
                Axis::KappaL => (base_state.clone(), cfg.incidence.clone()),
            };
            let owned;
            let source: &dyn mazer_core::AmplitudeSource = match (&shared, &fixed_solver) {
                (Some(t), _) => t,
                (None, Some(s)) => s,
                (None, None) => {
                    let mut profile = cfg.profile.clone();
                    profile.kappa_l = v;
                    owned = solver(cfg, profile.build()?)?;
                    &owned
                }
            };
            let rep = full_report(&state, source, &incidence, cfg.epsilon_tail)?;
            Ok([
                v,
                rep.sigma_aa_initial,
                rep.delta_sigma_aa,
                -rep.delta_sigma_aa,
                rep.reflection,
                rep.transmission,
            ])
        })
        .collect::<Vec<_>>();
    let mut out = Table::new(vec![
        spec.axis.column(),
        "sigma_aa_initial",
        "delta_sigma_aa",
        "emission",
        "R",
        "T",
    ]);
    for (v, row) in values.iter().zip(rows) {
        out.push_floats(&row.map_err(|e| e.context(format!("{} = {v}", spec.axis.column())))?);
    }
    out.render(cfg.format.unwrap_or(Format::Csv))
}

pub fn scatter(cfg: &RunConfig) -> Result<String, CliError> {
    let ks = match cfg.sweep {
        Some(s) if s.axis == Axis::KOverKappa => s.values(),
        Some(s) => {
            return Err(CliError::Config(format!(
                "scatter sweeps only over k_over_kappa, not {}",
                s.axis.column()
            )))
        }
        None => k_nodes(&cfg.incidence)?,
    };
    let table = amplitude_table(&cfg.profile.build()?, cfg.n_max, &ks, &cfg.solver)?;
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => Ok(table.to_csv()),
        Format::Json => {
            let mut out = Table::new(vec![
                "n",
                "branch",
                "k_over_kappa",
                "re_r",
                "im_r",
                "re_t",
                "im_t",
                "defect",
            ]);
            for a in table.iter() {
                let mut row = vec![
                    Cell::Int(a.channel.n as i64),
                    Cell::Text(a.channel.branch.to_string()),
                ];
                row.extend(
                    [a.k, a.r.re, a.r.im, a.t.re, a.t.im, a.unitarity_defect()].map(Cell::Float),
                );
                out.rows.push(row);
            }
            out.to_json()
        }
    }
}

#[derive(Serialize)]
struct CoordsEntry {
    n: usize,
    w: f64,
    theta: f64,
    chi: f64,
    phi: f64,
}

#[derive(Serialize)]
struct CoordsFile {
    w_minus1: f64,
    entries: Vec<CoordsEntry>,
}

pub fn coords(cfg: &RunConfig) -> Result<String, CliError> {
    let state = match &cfg.state {
        Some(_) => initial_state(cfg),
        None => {
            return Err(CliError::Config(
                "coords needs a state (--state-file, state or gamma)".into(),
            ))
        }
    };
    let c: DressedCoordinates = state.coordinates(cfg.epsilon_tail)?;
    match cfg.format.unwrap_or(Format::Json) {
        Format::Json => {
            let file = CoordsFile {
                w_minus1: c.w_minus1,
                entries: c
                    .entries
                    .iter()
                    .enumerate()
                    .map(|(n, e)| CoordsEntry {
                        n,
                        w: e.w,
                        theta: e.theta,
                        chi: e.chi,
                        phi: e.phi,
                    })
                    .collect(),
            };
            Ok(to_sorted_json(&file)?)
        }
        Format::Csv => {
            // n = -1 carries w_-1; its angles are fixed at zero
            let mut out = Table::new(vec!["n", "w", "theta", "chi", "phi"]);
            out.rows.push(
                std::iter::once(Cell::Int(-1))
                    .chain([c.w_minus1, 0.0, 0.0, 0.0].map(Cell::Float))
                    .collect(),
            );
            for (n, e) in c.entries.iter().enumerate() {
                out.rows.push(
                    std::iter::once(Cell::Int(n as i64))
                        .chain([e.w, e.theta, e.chi, e.phi].map(Cell::Float))
                        .collect(),
                );
            }
            Ok(out.to_csv())
        }
    }
}
