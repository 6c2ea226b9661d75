//! Post-processing of run logs: steady-state detection, error metrics,
//! controller comparison and the identification fits.

mod compare;
mod fit;
mod steady;

pub use compare::{
    compare_controllers, lambda_compare, lyapunov_check, summarize, tidy_channels, Comparison,
    ComparisonReport, FinalState, LyapunovCheck, PhaseSummary, RunSummary, TidyRow,
};
pub use fit::{fit_drag_quadratic, fit_thrust_curve, fit_tow_drag, DragFit, ThrustFit, TowFit};
pub use steady::{
    detect_steady_state, intersect_windows, steady_errors, SteadyConfig, SteadyErrors, SteadyWindow,
};
