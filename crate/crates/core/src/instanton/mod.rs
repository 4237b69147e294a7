//! Frequency fields from the instanton-gas Gibbs measure and their
//! correlations.

pub mod correlation;
pub mod filter;
pub mod fit;
pub mod fourier;
pub mod gibbs;
pub mod lattice;
pub mod mcmc;
pub mod noninteracting;
pub mod saddle;

pub use correlation::{
    analytic_correlation, correlation_from_realizations, default_max_separation,
    estimate_correlation, estimate_correlation_grouped, field_autocorrelation,
    realization_correlation, CorrelationEstimate,
};
pub use filter::{apply_mode_filter, saddle_filter, synchronized_filter};
pub use fit::{fit_r0, R0Fit};
pub use fourier::{fourier_forward, fourier_forward_2d, fourier_inverse, FourierField};
pub use gibbs::{gibbs_energy, GibbsEnergy};
pub use lattice::Lattice;
pub use mcmc::{sample_mcmc, ChainOptions, McmcRun, ProposalRecord};
pub use noninteracting::sample_noninteracting;
pub use saddle::{
    closed_form_r0, closed_form_r0_2d, closed_form_y0, solve_saddle, solve_saddle_2d,
    solve_saddle_with, ModeSpectrum, SaddleSolution, SaddleWarning,
};
