//! Parameter sweeps, persistence and plotting.
//!
//! A run directory looks like
//!
//! ```text
//! point_000/disorder/r0000.csv              disorder realizations (+ .json sidecar)
//! point_000/fields/r0000_saddle_filter.csv   per-realization fields (+ .json sidecar)
//! point_000/correlation_saddle_filter.csv    disorder-averaged R(x) per estimator, ≥ 20 realizations
//! point_000/spectra/r0000.csv                transmission spectra
//! point_000/spinon/r0000.csv                 spinon energies, IPRs, localization lengths
//! scaling.csv, scaling.json                  fitted r₀ per point, ≥ 2 fitted points
//! drop_counts.csv                            mean drop count per point
//! localization.csv                           band-centre localization length per point
//! plots/                                     optional SVG figures
//! manifest.json                              written last, SHA-256 of every other file
//! ```
//!
//! Numbers in CSV files carry 17 significant digits.

pub mod io;
mod manifest;
mod plots;
mod sweep;

pub use manifest::{
    read_manifest, verify_manifest, write_manifest, FailureRecord, FileRecord, PointRecord,
    RunManifest, Timings, MANIFEST_FILE, MANIFEST_SCHEMA_VERSION,
};
pub use plots::{emit_plots, PlotReport, PLOT_DIR};
pub use sweep::{
    run_sweep, Pipeline, PointSummary, RunOutcome, ScalingRow, ScalingSummary, SweepParameter,
    SweepPlan, COUNT_THRESHOLD_UNITS, DENSE_CHECK_SITES, FULL_SPINON_SITES, THERMAL_MEAN_LABEL,
};
