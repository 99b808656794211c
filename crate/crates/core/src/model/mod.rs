//! Networked auction instances, reported profiles, valuations and feasibility.

mod agent;
mod instance;
mod profile;
mod valuation;

pub use agent::{AgentId, Coalition, Order, MAX_AGENTS};
pub use instance::{AuctionInstance, BuyerType};
pub use profile::{feasible_set, reported_graph, ReportedGraph, ReportedProfile, ReportedType};
pub use valuation::{
    evaluate, Bundle, CombinatorialValuation, Holding, HomogeneousValuation, ItemKind, Items,
    Valuation, MAX_ITEMS,
};
