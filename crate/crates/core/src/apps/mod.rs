//! Power-system applications of the online algorithms.

pub mod demand_response;
pub mod network_reconfig;
