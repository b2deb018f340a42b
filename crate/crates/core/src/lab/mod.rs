//! Convergence experiments: delta-concentration on toric manifolds, the GC toric subvariety
//! for `n = 3`, schedules `t(s)`, and experiments backed by the gradient-Hamiltonian flow.

mod combined;
mod concentration;
mod gc_toric;
mod report;
mod schedule;

pub use combined::{
    combined_experiment, gc_vs_torus_moment_check, gc_vs_torus_trend, CombinedReport, CombinedRow,
    ExperimentConfig, GcTorusCheck, QuadratureConfig,
};
pub use concentration::{
    concentration_constants, concentration_report, concentration_sup, deformer_eigen_range,
    delta_pairing, fit_log_slope, outside_mass_options, slope_target, ConcentrationReport,
    ConcentrationRow, SupEstimate,
};
pub use gc_toric::{GcToric, SlicePoint, SLICE_TOL};
pub use report::{write_combined_csv, write_concentration_csv};
pub use schedule::{calibrate_adaptive, Calibration, Schedule};
