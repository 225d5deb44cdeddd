//! Online update rules, the causal driver loop and dynamic regret accounting.

mod bounds;
mod driver;
mod greedy;
mod ospgd;
mod regret;

pub use bounds::{
    generic_greedy_bound, greedy_bound, ospgd_bound, ospgd_expected_bound,
    ospgd_high_probability_bound,
};
pub use driver::{
    run_online, sweep_seeds, write_trace_csv, BruteForceOracle, OnlineAlgorithm, ProblemStream,
    Round, RoundOracle, RunConfig, RunOutput, TraceRow, VecStream,
};
pub use greedy::{
    brute_force_unconstrained, osga_step, osga_unconstrained_step, osgga_step, ApproxSpec,
    ExactMinimizer, GenericApproxSpec, Osga, Osgga,
};
pub use ospgd::{box_project, ospgd_step, BoxProjector, Ospgd, OspgdConfig, Projector};
pub use regret::RegretLedger;
