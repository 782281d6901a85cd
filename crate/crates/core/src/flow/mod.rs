//! Integer flow machinery: layered networks, shortest augmenting path max
//! flow, residual graphs, minimum mean cycles and cycle-cancelling min-cost
//! max flow.

mod howard;
mod karp;
mod maxflow;
mod mcmf;
mod network;
mod residual;

pub use howard::howard_min_mean_cycle;
pub use karp::{karp_min_mean_cycle, MeanCycle};
pub use maxflow::{augment_once, has_augmenting_path, max_flow, Augment};
pub use mcmf::{cancel, is_cost_optimal, min_cost_max_flow, min_cost_max_flow_with, CycleFinder, MinCostFlow};
pub use network::{Arc, ArcId, FlowError, FlowNetwork, NodeId, NodeKind};
pub use residual::{ResidualArc, ResidualGraph};
