//! Acceptance suite: one line per criterion, non-zero exit on any failure.

mod common;

use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use mazer_core::{
    amplitude_table, from_dressed_coordinates, full_report, scatter_mesa_analytic,
    to_dressed_coordinates, trapping_rt, truncation_level, ultracold_rt_plus, Branch, Channel,
    InitialState, ModeProfile, ObservablesReport, PureStateSpec, Solver, SolverConfig,
    TrappingParam, WavePacketSpec, DEFAULT_EPSILON_TAIL,
};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

const LENGTHS: [f64; 2] = [1.0, 10.0];

fn profiles(kappa_l: f64) -> Vec<(&'static str, ModeProfile)> {
    vec![
        ("mesa", ModeProfile::mesa(kappa_l).unwrap()),
        ("sech2", ModeProfile::sech2(1.0, kappa_l).unwrap()),
        ("gaussian", ModeProfile::gaussian(1.0, kappa_l).unwrap()),
        ("sin", ModeProfile::sinusoidal(1, kappa_l).unwrap()),
    ]
}

fn solver(profile: &ModeProfile) -> Solver {
    Solver::new(profile.clone(), SolverConfig::default()).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn report(
    state: InitialState,
    source: &dyn mazer_core::AmplitudeSource,
    incidence: WavePacketSpec,
) -> Result<ObservablesReport, String> {
    full_report(&state, source, &incidence, DEFAULT_EPSILON_TAIL).map_err(|e| e.to_string())
}

fn flux_conservation() -> Check {
    let (mut worst_analytic, mut worst_numeric) = (0.0f64, 0.0f64);
    for l in LENGTHS {
        for (name, profile) in profiles(l) {
            let s = solver(&profile);
            for n in 0..=5 {
                for b in Branch::BOTH {
                    for k in [0.05, 0.1, 0.5, 1.0, 2.0, 5.0] {
                        let a = s
                            .scatter(Channel::new(n, b), k)
                            .map_err(|e| e.to_string())?;
                        let d = a.unitarity_defect();
                        let (worst, tol) = if name == "mesa" {
                            (&mut worst_analytic, 1e-10)
                        } else {
                            (&mut worst_numeric, 1e-6)
                        };
                        *worst = worst.max(d);
                        ensure(d <= tol, || {
                            format!("{name} L={l} {n}{b} k={k}: defect {d:e}")
                        })?;
                    }
                }
            }
        }
    }
    Ok(format!(
        "max defect {worst_analytic:.1e} (analytic mesa), {worst_numeric:.1e} (transfer matrix)"
    ))
}

fn method_agreement() -> Check {
    let mut worst = 0.0f64;
    for l in LENGTHS {
        let s = solver(&ModeProfile::mesa(l).unwrap());
        for n in 0..=5 {
            for b in Branch::BOTH {
                for k in [0.05, 0.1, 0.5, 1.0, 2.0, 5.0] {
                    let ch = Channel::new(n, b);
                    let tm = s.transfer_matrix(ch, k).map_err(|e| e.to_string())?;
                    let an = scatter_mesa_analytic(ch, k, l).map_err(|e| e.to_string())?;
                    let d = (tm.r - an.r).norm().max((tm.t - an.t).norm());
                    worst = worst.max(d);
                    ensure(d <= 1e-6, || format!("L={l} {ch} k={k}: differ by {d:e}"))?;
                }
            }
        }
    }
    Ok(format!("max |delta amplitude| {worst:.1e}"))
}

fn perfect_trapping() -> Check {
    let ks = [0.05, 0.1, 1.0];
    let gammas: Vec<Complex64> = [0.1, 0.5, 0.9]
        .into_iter()
        .flat_map(|g| [Complex64::new(g, 0.0), Complex64::from_polar(g, PI / 3.0)])
        .collect();
    let n_max = truncation_level(0.9, DEFAULT_EPSILON_TAIL) as u32 + 1;
    let (mut worst_sigma, mut worst_p, mut cases) = (0.0f64, 0.0f64, 0);
    for l in LENGTHS {
        for (name, profile) in profiles(l) {
            let table = amplitude_table(&profile, n_max, &ks, &SolverConfig::default())
                .map_err(|e| format!("{name} L={l}: {e}"))?;
            for &gamma in &gammas {
                for b in Branch::BOTH {
                    for k in ks {
                        let p = TrappingParam::new(gamma, b).unwrap();
                        let rep = report(
                            InitialState::Trapping(p),
                            &table,
                            WavePacketSpec::monochromatic(k),
                        )?;
                        let max_p = rep
                            .per_n
                            .iter()
                            .map(|r| r.delta_p.abs())
                            .fold(0.0, f64::max);
                        worst_sigma = worst_sigma.max(rep.delta_sigma_aa.abs());
                        worst_p = worst_p.max(max_p);
                        ensure(rep.delta_sigma_aa.abs() < 1e-12 && max_p < 1e-12, || {
                            format!(
                                "{name} L={l} gamma={gamma} {b} k={k}: dsigma {:e}, dP {max_p:e}",
                                rep.delta_sigma_aa
                            )
                        })?;
                        cases += 1;
                    }
                }
            }
        }
    }
    Ok(format!(
        "{cases} cases, max |dsigma_aa| {worst_sigma:.1e}, max |dP_n| {worst_p:.1e}"
    ))
}

fn ultracold_closed_form() -> Check {
    let s = solver(&ModeProfile::mesa(10.0).unwrap());
    let mut details = Vec::new();
    for (k, tol) in [(0.1, 1e-2), (0.01, 1e-3)] {
        let mut worst = 0.0f64;
        for g in common::linspace(0.0, 0.95, 96) {
            let p = TrappingParam::new(Complex64::new(g, 0.0), Branch::Plus).unwrap();
            let (r, _) = trapping_rt(&p, &s, k, DEFAULT_EPSILON_TAIL).map_err(|e| e.to_string())?;
            let d = (r - ultracold_rt_plus(g).0).abs();
            worst = worst.max(d);
            ensure(d <= tol, || format!("k={k} |gamma|={g}: off by {d:e}"))?;
        }
        details.push(format!("k={k}: max dev {worst:.1e}"));
    }
    Ok(details.join(", "))
}

fn figure1_endpoints() -> Check {
    let s = solver(&ModeProfile::mesa(10.0).unwrap());
    let golden = std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/figure1_mesa_k0.1_L10.csv"),
    )
    .map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for line in golden.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let g = cols[0];
        let mut pair = [0.0; 2];
        for (slot, b) in pair.iter_mut().zip(Branch::BOTH) {
            let p = TrappingParam::new(Complex64::new(g, 0.0), b).unwrap();
            let (r, t) =
                trapping_rt(&p, &s, 0.1, DEFAULT_EPSILON_TAIL).map_err(|e| e.to_string())?;
            ensure(
                (0.0..=1.0).contains(&r) && (r + t - 1.0).abs() < 1e-9,
                || format!("|gamma|={g} {b}: R={r}, T={t}"),
            )?;
            *slot = r;
        }
        let d = (pair[0] - cols[1]).abs().max((pair[1] - cols[2]).abs());
        worst = worst.max(d);
        ensure(d < 1e-9, || format!("|gamma|={g}: golden mismatch {d:e}"))?;
        rows.push((g, pair[0], pair[1]));
    }
    ensure(rows.len() == 100, || format!("{} golden rows", rows.len()))?;
    let (first, last) = (rows[0], rows[99]);
    ensure(first.0 == 0.0 && first.1 == 0.0 && first.2 == 0.0, || {
        format!("at gamma=0: R+={}, R-={}", first.1, first.2)
    })?;
    ensure((last.0 - 0.99).abs() < 1e-12 && last.1 > 0.95, || {
        format!("R+(0.99) = {}", last.1)
    })?;
    Ok(format!(
        "R+(0.99) = {:.4}, R-(0.99) = {:.4}, max golden dev {worst:.1e}",
        last.1, last.2
    ))
}

fn special_case_recovery() -> Check {
    let mut worst = 0.0f64;
    for (name, profile) in profiles(10.0) {
        let s = solver(&profile);
        for n in 0..3 {
            let rep = report(
                InitialState::Pure(PureStateSpec::excited(n as usize)),
                &s,
                WavePacketSpec::monochromatic(0.1),
            )?;
            let plus = s.scatter(Channel::new(n, Branch::Plus), 0.1).unwrap();
            let minus = s.scatter(Channel::new(n, Branch::Minus), 0.1).unwrap();
            let d = (rep.reflection - 0.5 * (plus.reflection() + minus.reflection())).abs();
            worst = worst.max(d);
            ensure(d < 1e-15, || format!("{name} |a,{n}>: off by {d:e}"))?;
        }
    }
    Ok(format!("max dev {worst:.1e}"))
}

fn population_conservation() -> Check {
    let mut worst = 0.0f64;
    for l in LENGTHS {
        for (name, profile) in profiles(l) {
            let s = solver(&profile);
            for n in 0..3usize {
                for k in [0.05, 0.1, 1.0] {
                    let rep = report(
                        InitialState::Pure(PureStateSpec::excited(n)),
                        &s,
                        WavePacketSpec::monochromatic(k),
                    )?;
                    let d = (rep.delta_sigma_aa + rep.delta_p(n + 1)).abs();
                    worst = worst.max(d);
                    ensure(d < 1e-12, || format!("{name} L={l} |a,{n}> k={k}: {d:e}"))?;
                }
            }
        }
    }
    Ok(format!("max |dsigma_aa + dP_(n+1)| {worst:.1e}"))
}

fn free_channel() -> Check {
    let mut cases = 0;
    for l in LENGTHS {
        for (name, profile) in profiles(l) {
            let s = solver(&profile);
            for k in [0.01, 0.1, 1.0, 5.0] {
                let rep = report(
                    InitialState::Pure(PureStateSpec::ground(0)),
                    &s,
                    WavePacketSpec::monochromatic(k),
                )?;
                ensure(rep.transmission == 1.0 && rep.delta_sigma_aa == 0.0, || {
                    format!(
                        "{name} L={l} k={k}: T={}, dsigma={}",
                        rep.transmission, rep.delta_sigma_aa
                    )
                })?;
                cases += 1;
            }
        }
    }
    Ok(format!(
        "{cases} cases with T = 1 and dsigma_aa = 0 exactly"
    ))
}

fn barrier_opacity() -> Check {
    let a = scatter_mesa_analytic(Channel::new(0, Branch::Plus), 0.01, 10.0)
        .map_err(|e| e.to_string())?;
    let t2 = a.transmission();
    ensure(t2 < 1e-8, || format!("|t|^2 = {t2:e}"))?;
    Ok(format!("|t_0+|^2 = {t2:.2e}"))
}

fn wavepacket_consistency() -> Check {
    let s = solver(&ModeProfile::mesa(10.0).unwrap());
    let packet = WavePacketSpec::Gaussian {
        k0: 0.1,
        sigma_k: 1e-4,
    };
    let mut worst = 0.0f64;
    for state in [
        PureStateSpec::excited(0),
        PureStateSpec::excited(2),
        PureStateSpec::superposed_atom(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8), 1),
    ] {
        let mono = report(
            InitialState::Pure(state.clone()),
            &s,
            WavePacketSpec::monochromatic(0.1),
        )?;
        let wide = report(InitialState::Pure(state), &s, packet.clone())?;
        let d = (mono.delta_sigma_aa - wide.delta_sigma_aa).abs();
        worst = worst.max(d);
        ensure(d <= 1e-6, || format!("dsigma differs by {d:e}"))?;
    }
    Ok(format!(
        "max |dsigma_aa(packet) - dsigma_aa(k0)| {worst:.1e}"
    ))
}

fn random_state(rng: &mut StdRng) -> PureStateSpec {
    let levels = rng.random_range(1..6);
    let mut draw = |len: usize| -> Vec<Complex64> {
        (0..len)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    };
    let (mut a, mut b) = (draw(levels), draw(levels + 1));
    let norm = a.iter().chain(&b).map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    a.iter_mut().chain(b.iter_mut()).for_each(|c| *c /= norm);
    PureStateSpec::Joint { a, b }
}

fn chi_invariance() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for (name, profile) in profiles(10.0) {
        let s = solver(&profile);
        for _ in 0..10 {
            let state = random_state(&mut rng);
            let k = rng.random_range(0.05..2.0);
            let base = report(
                InitialState::Pure(state.clone()),
                &s,
                WavePacketSpec::monochromatic(k),
            )?;
            let mut coords = to_dressed_coordinates(&state).map_err(|e| e.to_string())?;
            for e in &mut coords.entries {
                e.chi = rng.random_range(0.0..2.0 * PI);
            }
            let shuffled = from_dressed_coordinates(&coords).map_err(|e| e.to_string())?;
            let other = report(
                InitialState::Pure(shuffled),
                &s,
                WavePacketSpec::monochromatic(k),
            )?;
            let mut diffs = vec![
                base.sigma_aa_initial - other.sigma_aa_initial,
                base.delta_sigma_aa - other.delta_sigma_aa,
                base.reflection - other.reflection,
                base.transmission - other.transmission,
            ];
            ensure(base.per_n.len() == other.per_n.len(), || {
                "level count changed".into()
            })?;
            for (x, y) in base.per_n.iter().zip(&other.per_n) {
                diffs.extend([x.delta - y.delta, x.delta_p - y.delta_p]);
            }
            let d = diffs.iter().map(|d| d.abs()).fold(0.0, f64::max);
            worst = worst.max(d);
            ensure(d <= 1e-12, || {
                format!("{name} k={k}: observable moved by {d:e}")
            })?;
            cases += 1;
        }
    }
    Ok(format!("{cases} random states, max change {worst:.1e}"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("flux conservation", flux_conservation),
        ("analytic vs transfer-matrix mesa", method_agreement),
        ("perfect trapping", perfect_trapping),
        ("ultracold closed form", ultracold_closed_form),
        (
            "reflection curve endpoints and golden data",
            figure1_endpoints,
        ),
        ("single-level special case", special_case_recovery),
        ("population conservation", population_conservation),
        ("free channel", free_channel),
        ("ultracold barrier opacity", barrier_opacity),
        ("wave-packet consistency", wavepacket_consistency),
        ("chi-phase invariance", chi_invariance),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {:>2} [{tag}] {name}: {detail} ({:.2}s)",
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
