//! Quantum theory of the one-photon mazer in dressed-state coordinates.
//!
//! A two-level atom crossing a resonant cavity decouples into independent
//! scattering problems on the barrier/well potentials ±κ_n² u(z). This crate
//! solves those channels ([`scattering`]), expresses arbitrary pure initial
//! states in dressed coordinates ([`dressed`]) and combines the two into
//! population changes, photon statistics and reflection/transmission
//! probabilities ([`observables`]).
//!
//! All lengths are in units of 1/κ and wave numbers in units of κ, with
//! κ = √(2Mg/ħ).

// `!(x <= tol)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dressed;
pub mod error;
pub mod expr;
pub mod io;
pub mod observables;
pub mod profile;
pub mod scattering;
pub mod wavepacket;

pub use dressed::{
    from_dressed_coordinates, to_dressed_coordinates, trapping_state, truncation_level,
    DressedCoordinates, DressedEntry, PureStateSpec, TrappingParam,
};
pub use error::{Error, Result};
pub use observables::{
    delta_n, delta_p, delta_sigma_aa, full_report, kernel_k, reflection_transmission,
    sigma_aa_initial, trapping_rt, ultracold_rt_plus, InitialState, KernelMap, ObservablesReport,
    DEFAULT_EPSILON_TAIL,
};
pub use profile::{ModeProfile, ProfileDescriptor, ProfileShape};
pub use scattering::{
    amplitude_table, kappa_n_ratio, scatter, scatter_mesa_analytic, scatter_transfer_matrix,
    unitarity_defect, AmplitudeSource, AmplitudeTable, Amplitudes, Branch, Channel, Solver,
    SolverConfig,
};
pub use wavepacket::{wavepacket_average, WavePacketSpec};
