//! Online reconfiguration of a distribution network: power flow on the
//! fully meshed network ranks lines by current, and a maximum-current
//! spanning tree picks the next radial topology.

mod graph;
mod network;
mod powerflow;
mod reconfig;

pub use graph::{
    enumerate_spanning_trees, is_radial, prim_mst, reachable_from_feeders, WeightedEdge,
};
pub use network::{BusKind, BusSpec, LineSpec, Network, NetworkSpec};
pub use powerflow::{active_losses, energy_imbalance, newton_raphson_pf, PfOptions, PfSolution};
pub use reconfig::{
    algorithm1_step, radial_family, run_reconfiguration, wm_objective, LoadNoise, NrPolicy, NrRow,
    NrRun, StepOutcome,
};
