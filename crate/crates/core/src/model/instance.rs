use std::collections::{BTreeMap, BTreeSet};

use super::agent::AgentId;
use super::profile::{reported_graph, ReportedGraph, ReportedProfile};
use super::valuation::{Items, Valuation};
use crate::{Error, Result};

/// A buyer's type: valuation plus neighbor set. Also used for reports.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BuyerType {
    pub valuation: Valuation,
    pub neighbors: BTreeSet<AgentId>,
}

impl BuyerType {
    pub fn new(valuation: Valuation, neighbors: impl IntoIterator<Item = AgentId>) -> BuyerType {
        BuyerType { valuation, neighbors: neighbors.into_iter().collect() }
    }
}

/// Ground truth of one auction: true buyer types, the seller's neighbors
/// and the items on sale.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuctionInstance {
    pub items: Items,
    pub seller_neighbors: BTreeSet<AgentId>,
    pub buyers: BTreeMap<AgentId, BuyerType>,
}

impl AuctionInstance {
    /// Builds an instance from an undirected edge list; neighbor sets are
    /// derived symmetrically.
    pub fn from_edges(
        items: Items,
        valuations: impl IntoIterator<Item = (AgentId, Valuation)>,
        edges: &[(AgentId, AgentId)],
    ) -> AuctionInstance {
        let mut buyers: BTreeMap<AgentId, BuyerType> = valuations
            .into_iter()
            .map(|(id, v)| (id, BuyerType::new(v, [])))
            .collect();
        let mut seller_neighbors = BTreeSet::new();
        for (a, b) in edges {
            for (x, y) in [(a, b), (b, a)] {
                match x {
                    AgentId::Seller => {
                        seller_neighbors.insert(y.clone());
                    }
                    buyer => {
                        if let Some(t) = buyers.get_mut(buyer) {
                            t.neighbors.insert(y.clone());
                        }
                    }
                }
            }
        }
        AuctionInstance { items, seller_neighbors, buyers }
    }

    pub fn buyer_count(&self) -> usize {
        self.buyers.len()
    }

    /// Checks id sanity, neighbor symmetry and valuation shape. Never aborts;
    /// an empty list means the instance is well formed.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.buyers.contains_key(&AgentId::Seller) {
            out.push("the seller id is used by a buyer".to_string());
        }
        let known = |a: &AgentId| a.is_seller() || self.buyers.contains_key(a);
        for n in &self.seller_neighbors {
            if !known(n) || n.is_seller() {
                out.push(format!("seller neighbor {n} is not a buyer"));
            } else if !self.buyers[n].neighbors.contains(&AgentId::Seller) {
                out.push(format!("neighbors not symmetric: s lists {n} but {n} does not list s"));
            }
        }
        match &self.items {
            Items::Homogeneous { k } if *k == 0 => out.push("k must be positive".to_string()),
            Items::Combinatorial { names } if names.is_empty() => {
                out.push("no items declared".to_string())
            }
            _ => {}
        }
        for (id, t) in &self.buyers {
            for n in &t.neighbors {
                if n == id {
                    out.push(format!("buyer {id} lists itself as a neighbor"));
                } else if !known(n) {
                    out.push(format!("buyer {id} lists unknown neighbor {n}"));
                } else if n.is_seller() {
                    if !self.seller_neighbors.contains(id) {
                        out.push(format!(
                            "neighbors not symmetric: {id} lists s but s does not list {id}"
                        ));
                    }
                } else if !self.buyers[n].neighbors.contains(id) {
                    out.push(format!(
                        "neighbors not symmetric: {id} lists {n} but {n} does not list {id}"
                    ));
                }
            }
            match (&t.valuation, &self.items) {
                (Valuation::Homogeneous(v), Items::Homogeneous { k }) => {
                    if v.units() != *k as usize {
                        out.push(format!("buyer {id}: {} marginals for {k} units", v.units()));
                    }
                }
                (Valuation::Combinatorial(v), Items::Combinatorial { names }) => {
                    if v.items() != names.len() {
                        out.push(format!(
                            "buyer {id}: valuation over {} items, {} declared",
                            v.items(),
                            names.len()
                        ));
                    }
                }
                _ => out.push(format!("buyer {id}: valuation kind does not match the items")),
            }
            out.extend(t.valuation.violations().into_iter().map(|v| format!("buyer {id}: {v}")));
        }
        out
    }

    pub fn validated(self) -> Result<AuctionInstance> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidInstance(violations))
        }
    }

    /// Everyone reports their true type.
    pub fn truthful_profile(&self) -> Result<ReportedProfile> {
        ReportedProfile::new(self.items.clone(), self.seller_neighbors.clone(), self.buyers.clone())
    }

    /// Truthful profile except for `buyer`, who reports `report`. Buyers can
    /// only hide neighbors, never invent them.
    pub fn deviate(&self, buyer: &AgentId, report: BuyerType) -> Result<ReportedProfile> {
        let truth = self
            .buyers
            .get(buyer)
            .ok_or_else(|| Error::MalformedProfile(format!("unknown buyer {buyer}")))?;
        if !report.neighbors.is_subset(&truth.neighbors) {
            return Err(Error::MalformedProfile(format!(
                "buyer {buyer} reports neighbors it does not have"
            )));
        }
        let mut reports = self.buyers.clone();
        reports.insert(buyer.clone(), report);
        ReportedProfile::new(self.items.clone(), self.seller_neighbors.clone(), reports)
    }

    /// The underlying (true) network.
    pub fn graph(&self) -> Result<ReportedGraph> {
        Ok(reported_graph(&self.truthful_profile()?))
    }
}
