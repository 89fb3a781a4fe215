//! Time evolution of a measured qubit: unmeasured reference, ensemble mean,
//! conditioned trajectories with their measurement record, the quantum
//! filter, and the nonstochastic ensemble filter.

mod config;
mod run;
mod step;
mod superop;
mod wiener;

pub use config::{SimConfig, MAX_PHASE_PER_STEP};
pub use run::{
    ideal_state, run_ensemble_filter, run_ensemble_filter_at, run_ideal, run_lindblad,
    run_trajectory, run_trajectory_indexed, EnsembleFilterRun, StateSeries, TrajectoryRecord,
};
pub use step::{
    propagator, record_increment, step_ensemble_filter, step_filter, step_sme,
};
pub use superop::{dissipator, meas_superop, sz_expectation};
pub use wiener::WienerStream;
