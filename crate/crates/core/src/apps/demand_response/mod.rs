//! Regulation-signal tracking with a fleet of air-conditioning loads.

mod experiment;
mod objective;
mod tcl;

pub use experiment::{
    random_fleet, run_dr_experiment, DrExperimentConfig, DrPolicy, DrRow, DrRun, TclSpec,
};
pub use objective::{
    dr_objective, dr_objective_literal, dr_value, round_optimum, subset_sums, uniform_feasible,
    DrRound, LITERAL_LIMIT,
};
pub use tcl::{classify, tcl_step, Control, TclParams, TclState};
