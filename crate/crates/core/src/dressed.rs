//! Dressed-state coordinates of pure atom-field states.
//!
//! The dressed basis is |b,0⟩ and |±,n⟩ = (|a,n⟩ ± |b,n+1⟩)/√2. A pure state
//! is written as w₋₁|b,0⟩ + Σ w_n e^{iχ_n}[cos(θ_n/2)|+,n⟩ + e^{−iφ_n} sin(θ_n/2)|−,n⟩],
//! with the global phase chosen so the |b,0⟩ amplitude is real and non-negative.
//!
//! Angles that the state leaves undefined are pinned to zero: θ_n = χ_n = φ_n = 0
//! when w_n = 0, and φ_n = 0 when θ_n ∈ {0, π}. Phases live in [0, 2π).

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scattering::Branch;

pub const NORM_TOL: f64 = 1e-12;

/// Initial pure state in the usual (bare) coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum PureStateSpec {
    /// (c_a|a⟩ + c_b|b⟩) ⊗ Σ f_n|n⟩; atom and field each normalized.
    Product {
        atom: [Complex64; 2],
        field: Vec<Complex64>,
    },
    /// Σ d_{a,n}|a,n⟩ + d_{b,n}|b,n⟩.
    Joint {
        a: Vec<Complex64>,
        b: Vec<Complex64>,
    },
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

fn fock(n: usize) -> Vec<Complex64> {
    let mut f = vec![Complex64::new(0.0, 0.0); n + 1];
    f[n] = Complex64::new(1.0, 0.0);
    f
}

impl PureStateSpec {
    /// |a,n⟩
    pub fn excited(n: usize) -> Self {
        PureStateSpec::Product {
            atom: [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            field: fock(n),
        }
    }

    /// |b,n⟩
    pub fn ground(n: usize) -> Self {
        PureStateSpec::Product {
            atom: [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            field: fock(n),
        }
    }

    /// (c_a|a⟩ + c_b|b⟩) ⊗ |n⟩
    pub fn superposed_atom(c_a: Complex64, c_b: Complex64, n: usize) -> Self {
        PureStateSpec::Product {
            atom: [c_a, c_b],
            field: fock(n),
        }
    }

    /// Bare-basis form of |γ±⟩, with the coherent-like field truncated to `terms` levels.
    pub fn trapping_product(gamma: Complex64, branch: Branch, terms: usize) -> Self {
        let g2 = gamma.norm_sqr();
        let atom_norm = (1.0 + g2).sqrt();
        let field_norm = (1.0 - g2).sqrt();
        let mut field = Vec::with_capacity(terms);
        let mut power = Complex64::new(1.0, 0.0);
        for _ in 0..terms {
            field.push(power * field_norm);
            power *= gamma;
        }
        PureStateSpec::Product {
            atom: [
                gamma / atom_norm,
                Complex64::new(branch.sign() / atom_norm, 0.0),
            ],
            field,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        match self {
            PureStateSpec::Product { atom, field } => norm_sqr(atom) * norm_sqr(field),
            PureStateSpec::Joint { a, b } => norm_sqr(a) + norm_sqr(b),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let parts: Vec<f64> = match self {
            PureStateSpec::Product { atom, field } => vec![norm_sqr(atom), norm_sqr(field)],
            PureStateSpec::Joint { a, b } => vec![norm_sqr(a) + norm_sqr(b)],
        };
        for n2 in parts {
            if !((n2 - 1.0).abs() <= NORM_TOL) {
                return Err(Error::NotNormalized { norm: n2.sqrt() });
            }
        }
        Ok(())
    }

    /// (d_{a,n}, d_{b,n}) for n = 0, 1, ...
    pub fn joint_coefficients(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        match self {
            PureStateSpec::Product { atom, field } => (
                field.iter().map(|f| atom[0] * f).collect(),
                field.iter().map(|f| atom[1] * f).collect(),
            ),
            PureStateSpec::Joint { a, b } => (a.clone(), b.clone()),
        }
    }
}

/// Coordinates (w_n, θ_n, χ_n, φ_n) of one dressed pair |±,n⟩.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DressedEntry {
    pub w: f64,
    pub theta: f64,
    pub chi: f64,
    pub phi: f64,
}

impl DressedEntry {
    /// sin θ, exactly zero at θ ∈ {0, π}.
    pub fn sin_theta(&self) -> f64 {
        if self.theta == 0.0 || self.theta == PI {
            0.0
        } else {
            self.theta.sin()
        }
    }

    /// (cos²(θ/2), sin²(θ/2)), exact at the endpoints.
    pub fn half_angle_weights(&self) -> (f64, f64) {
        if self.theta == 0.0 {
            return (1.0, 0.0);
        }
        if self.theta == PI {
            return (0.0, 1.0);
        }
        let c = self.theta.cos();
        (0.5 * (1.0 + c), 0.5 * (1.0 - c))
    }

    /// Amplitudes (c_n⁺, c_n⁻) on |+,n⟩ and |−,n⟩.
    pub fn dressed_amplitudes(&self) -> (Complex64, Complex64) {
        let half = 0.5 * self.theta;
        let (cos_h, sin_h) = if self.theta == PI {
            (0.0, 1.0)
        } else {
            (half.cos(), half.sin())
        };
        (
            Complex64::from_polar(self.w * cos_h, self.chi),
            Complex64::from_polar(self.w * sin_h, self.chi - self.phi),
        )
    }

    fn from_dressed_amplitudes(c_plus: Complex64, c_minus: Complex64) -> Self {
        let (p, m) = (c_plus.norm(), c_minus.norm());
        let w = p.hypot(m);
        if w == 0.0 {
            return DressedEntry::default();
        }
        let theta = 2.0 * m.atan2(p);
        let chi = if p > 0.0 { c_plus.arg() } else { c_minus.arg() };
        let phi = if p > 0.0 && m > 0.0 {
            c_plus.arg() - c_minus.arg()
        } else {
            0.0
        };
        DressedEntry {
            w,
            theta,
            chi: canonical_phase(chi),
            phi: canonical_phase(phi),
        }
    }
}

/// Maps an angle into [0, 2π).
pub fn canonical_phase(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y >= TAU {
        0.0
    } else {
        y
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DressedCoordinates {
    pub w_minus1: f64,
    /// Entry n describes the pair |±,n⟩.
    pub entries: Vec<DressedEntry>,
}

/// Dressed weights at or below this are treated as unoccupied.
pub const OCCUPIED_CUTOFF: f64 = 1e-14;

impl DressedCoordinates {
    pub fn n_max(&self) -> usize {
        self.entries.len().saturating_sub(1)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.w_minus1 * self.w_minus1 + self.entries.iter().map(|e| e.w * e.w).sum::<f64>()
    }

    /// Highest n with w_n above [`OCCUPIED_CUTOFF`].
    pub fn highest_occupied(&self) -> Option<usize> {
        self.entries.iter().rposition(|e| e.w > OCCUPIED_CUTOFF)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::validation(msg));
        if !(0.0..=1.0).contains(&self.w_minus1) {
            return bad(format!("w_-1 = {} outside [0, 1]", self.w_minus1));
        }
        for (n, e) in self.entries.iter().enumerate() {
            if !(0.0..=1.0).contains(&e.w) {
                return bad(format!("w_{n} = {} outside [0, 1]", e.w));
            }
            if !(0.0..=PI).contains(&e.theta) {
                return bad(format!("theta_{n} = {} outside [0, pi]", e.theta));
            }
            for (name, v) in [("chi", e.chi), ("phi", e.phi)] {
                if !(0.0..TAU).contains(&v) {
                    return bad(format!("{name}_{n} = {v} outside [0, 2pi)"));
                }
            }
            if e.w == 0.0 && (e.theta != 0.0 || e.chi != 0.0 || e.phi != 0.0) {
                return bad(format!("angles of empty level {n} must be zero"));
            }
            if (e.theta == 0.0 || e.theta == PI) && e.phi != 0.0 {
                return bad(format!("phi_{n} must be zero when theta_{n} is 0 or pi"));
            }
        }
        let norm = self.norm_sqr();
        if !((norm - 1.0).abs() <= NORM_TOL) {
            return Err(Error::NotNormalized { norm: norm.sqrt() });
        }
        Ok(())
    }
}

pub fn to_dressed_coordinates(state: &PureStateSpec) -> Result<DressedCoordinates> {
    state.validate()?;
    let (mut a, mut b) = state.joint_coefficients();
    // χ₋₁ = 0: rotate so the |b,0⟩ amplitude is real and non-negative
    if let Some(&b0) = b.first() {
        if b0.norm() > 0.0 {
            let rot = b0.conj() / b0.norm();
            a.iter_mut().chain(b.iter_mut()).for_each(|c| *c *= rot);
            b[0] = Complex64::new(b0.norm(), 0.0);
        }
    }
    let zero = Complex64::new(0.0, 0.0);
    let levels = a.len().max(b.len().saturating_sub(1)).max(1);
    let entries = (0..levels)
        .map(|n| {
            let an = a.get(n).copied().unwrap_or(zero);
            let bn1 = b.get(n + 1).copied().unwrap_or(zero);
            DressedEntry::from_dressed_amplitudes(
                (an + bn1) * FRAC_1_SQRT_2,
                (an - bn1) * FRAC_1_SQRT_2,
            )
        })
        .collect();
    Ok(DressedCoordinates {
        w_minus1: b.first().map_or(0.0, |c| c.re),
        entries,
    })
}

/// Inverse transform; returns the Joint form.
pub fn from_dressed_coordinates(coords: &DressedCoordinates) -> Result<PureStateSpec> {
    coords.validate()?;
    let mut a = Vec::with_capacity(coords.entries.len());
    let mut b = Vec::with_capacity(coords.entries.len() + 1);
    b.push(Complex64::new(coords.w_minus1, 0.0));
    for e in &coords.entries {
        let (cp, cm) = e.dressed_amplitudes();
        a.push((cp + cm) * FRAC_1_SQRT_2);
        b.push((cp - cm) * FRAC_1_SQRT_2);
    }
    Ok(PureStateSpec::Joint { a, b })
}

/// Parameter of the perfect trapping states |γ±⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrappingParam {
    gamma: Complex64,
    branch: Branch,
}

impl TrappingParam {
    pub fn new(gamma: Complex64, branch: Branch) -> Result<Self> {
        if !(gamma.norm() < 1.0) {
            return Err(Error::validation(format!(
                "trapping parameter needs |gamma| < 1, got {}",
                gamma.norm()
            )));
        }
        Ok(TrappingParam { gamma, branch })
    }

    pub fn gamma(&self) -> Complex64 {
        self.gamma
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }
}

/// Smallest n_max with Σ_{n>n_max} w_n² < `epsilon_tail` for |γ±⟩, using the
/// closed geometric tail 2|γ|^{2(n_max+2)}/(1+|γ|²).
pub fn truncation_level(gamma_abs: f64, epsilon_tail: f64) -> usize {
    let g2 = gamma_abs * gamma_abs;
    let scale = 2.0 / (1.0 + g2);
    let mut n = 0usize;
    let mut power = g2 * g2; // |γ|^{2(n+2)}
    while scale * power >= epsilon_tail {
        n += 1;
        power *= g2;
    }
    n
}

/// Dressed coordinates of |γ±⟩ = √((1−|γ|²)/(1+|γ|²)) (Σ √2 γ^{n+1}|±,n⟩ ± |b,0⟩),
/// truncated at [`truncation_level`] and renormalized.
pub fn trapping_state(p: &TrappingParam, epsilon_tail: f64) -> Result<DressedCoordinates> {
    if !(epsilon_tail > 0.0 && epsilon_tail < 1.0) {
        return Err(Error::validation(format!(
            "epsilon_tail must lie in (0, 1), got {epsilon_tail}"
        )));
    }
    let g = p.gamma.norm();
    let g2 = g * g;
    let n_max = truncation_level(g, epsilon_tail);
    let base = ((1.0 - g2) / (1.0 + g2)).sqrt();
    let mut weights = Vec::with_capacity(n_max + 1);
    let mut power = g;
    for _ in 0..=n_max {
        weights.push(base * std::f64::consts::SQRT_2 * power);
        power *= g;
    }
    let total = base * base + weights.iter().map(|w| w * w).sum::<f64>();
    let renorm = total.sqrt();

    // after fixing χ₋₁ = 0 the |−,n⟩ amplitudes pick up the overall sign −1
    let (theta, offset) = match p.branch {
        Branch::Plus => (0.0, 0.0),
        Branch::Minus => (PI, PI),
    };
    let arg = p.gamma.arg();
    let entries = weights
        .into_iter()
        .enumerate()
        .map(|(n, w)| {
            if w == 0.0 {
                return DressedEntry::default();
            }
            DressedEntry {
                w: w / renorm,
                theta,
                chi: canonical_phase(offset + (n + 1) as f64 * arg),
                phi: 0.0,
            }
        })
        .collect();
    Ok(DressedCoordinates {
        w_minus1: base / renorm,
        entries,
    })
}
