//! Classical capacities of bosonic Gaussian channels with stationary,
//! frequency-dependent gain and noise.
//!
//! The scalar solvers are generic over [`scalar::Real`] (`f32`/`f64`); the
//! aliases at the crate root fix `f64`, and [`single`] holds the `f32`
//! ones. The matrix code (multimode optimiser, symplectic spectra) is
//! `f64` only.

// `!(x > 0)` deliberately rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bandpass;
pub mod broadband;
pub mod channel_models;
pub mod error;
pub mod io;
mod levels;
pub mod quadrature;
pub mod scalar;
pub mod special_fn;
pub mod spectra;
pub mod symplectic;
pub mod waterfill;

pub use error::{CapacityError, ErrorCategory, Result};
pub use scalar::Real;

pub use bandpass::{
    concavity_lower_bound_check, infinite_capacity_probe_classical, infinite_capacity_probe_quantum, ConcaveFn,
    ProbeBand,
};
pub use broadband::{capacity_broadband, BroadbandModel};
pub use channel_models::{
    capacity_single_mode, chi_capacity_multimode, chi_objective, classical_capacity, MultimodeChannel,
    SingleModeModel,
};
pub use spectra::{load_profile, Domain};
pub use symplectic::{
    kernel_symplectic_spectrum, williamson_eigenvalues, CovarianceForm, StationaryKernel, SymplecticSpectrum,
};
pub use waterfill::waterfill_discrete;

pub type NonnegReal = special_fn::NonnegReal<f64>;
pub type SpectralProfile = spectra::SpectralProfile<f64>;
pub type CutoffSchedule = spectra::CutoffSchedule<f64>;
pub type ModeGrid = spectra::ModeGrid<f64>;
pub type ModeSpec = waterfill::ModeSpec<f64>;
pub type WaterfillSolution = waterfill::WaterfillSolution<f64>;
pub type SingleModeChannel = channel_models::SingleModeChannel<f64>;
pub type CapacityResult = broadband::CapacityResult<f64>;
pub type ConvergenceTrace = broadband::ConvergenceTrace<f64>;
pub type ErrorBounds = broadband::ErrorBounds<f64>;
pub type BandpassProblem = bandpass::BandpassProblem<f64>;
pub type ProbeResult = bandpass::ProbeResult<f64>;

/// `f32` instantiations of the generic types.
pub mod single {
    pub type NonnegReal = crate::special_fn::NonnegReal<f32>;
    pub type SpectralProfile = crate::spectra::SpectralProfile<f32>;
    pub type CutoffSchedule = crate::spectra::CutoffSchedule<f32>;
    pub type ModeGrid = crate::spectra::ModeGrid<f32>;
    pub type ModeSpec = crate::waterfill::ModeSpec<f32>;
    pub type WaterfillSolution = crate::waterfill::WaterfillSolution<f32>;
    pub type SingleModeChannel = crate::channel_models::SingleModeChannel<f32>;
    pub type CapacityResult = crate::broadband::CapacityResult<f32>;
    pub type BandpassProblem = crate::bandpass::BandpassProblem<f32>;
}
