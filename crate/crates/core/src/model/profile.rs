use std::collections::{BTreeMap, BTreeSet};

use super::agent::{AgentId, Coalition, MAX_AGENTS};
use super::instance::BuyerType;
use super::valuation::{Bundle, Items, Valuation, MAX_ITEMS};
use crate::rational::{Rational, Scale};
use crate::{Error, Result};

/// A buyer's reported valuation and reported neighbor set.
pub type ReportedType = BuyerType;

/// Everything a mechanism sees: each buyer's report, the seller's
/// (non-strategic) neighbor set, and the items on sale.
///
/// Agents are indexed with the seller at 0 and buyers after it in id order;
/// [`Coalition`]s refer to these indices.
#[derive(Clone, Debug)]
pub struct ReportedProfile {
    items: Items,
    agents: Vec<AgentId>,
    index: BTreeMap<AgentId, usize>,
    seller_neighbors: BTreeSet<AgentId>,
    reports: Vec<ReportedType>,
    adjacency: Vec<u32>,
    scale: Scale,
    // Scaled valuation tables: prefix sums by quantity, or values by bundle mask.
    tables: Vec<Vec<i128>>,
}

impl ReportedProfile {
    pub fn new(
        items: Items,
        seller_neighbors: BTreeSet<AgentId>,
        reports: BTreeMap<AgentId, ReportedType>,
    ) -> Result<ReportedProfile> {
        let malformed = |msg: String| Error::MalformedProfile(msg);
        match &items {
            Items::Homogeneous { k } if *k == 0 => {
                return Err(malformed("k must be positive".into()))
            }
            Items::Combinatorial { names } => {
                if names.is_empty() || names.len() > MAX_ITEMS {
                    return Err(malformed(format!(
                        "combinatorial auctions need 1..={MAX_ITEMS} items, got {}",
                        names.len()
                    )));
                }
                if names.iter().collect::<BTreeSet<_>>().len() != names.len() {
                    return Err(malformed("duplicate item names".into()));
                }
            }
            _ => {}
        }
        if reports.contains_key(&AgentId::Seller) {
            return Err(malformed("the seller cannot submit a buyer report".into()));
        }
        if reports.len() + 1 > MAX_AGENTS {
            return Err(malformed(format!(
                "{} agents exceed the supported maximum of {MAX_AGENTS}",
                reports.len() + 1
            )));
        }

        let agents: Vec<AgentId> = std::iter::once(AgentId::Seller)
            .chain(reports.keys().cloned())
            .collect();
        let index: BTreeMap<AgentId, usize> =
            agents.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();

        let mut adjacency = vec![0u32; agents.len()];
        let mut link = |a: usize, b: usize| {
            adjacency[a] |= 1 << b;
            adjacency[b] |= 1 << a;
        };
        for n in &seller_neighbors {
            match index.get(n) {
                Some(&j) if j != 0 => link(0, j),
                _ => return Err(malformed(format!("seller neighbor {n} is not a buyer"))),
            }
        }
        for (i, (id, report)) in reports.iter().enumerate() {
            let i = i + 1;
            for n in &report.neighbors {
                let j = *index
                    .get(n)
                    .ok_or_else(|| malformed(format!("buyer {id} reports unknown neighbor {n}")))?;
                if j == i {
                    return Err(malformed(format!("buyer {id} lists itself as a neighbor")));
                }
                link(i, j);
            }
            check_valuation(id, &report.valuation, &items)?;
        }

        let scale = Scale::for_values(reports.values().flat_map(|r| valuation_values(&r.valuation)));
        let mut tables = vec![Vec::new()];
        for report in reports.values() {
            tables.push(scaled_table(&report.valuation, &items, &scale)?);
        }

        Ok(ReportedProfile {
            items,
            agents,
            index,
            seller_neighbors,
            reports: reports.into_values().collect(),
            adjacency,
            scale,
            tables,
        })
    }

    /// The same profile with one buyer's report replaced.
    pub fn with_report(&self, buyer: &AgentId, report: ReportedType) -> Result<ReportedProfile> {
        let mut reports = self.report_map();
        match reports.get_mut(buyer) {
            Some(slot) => *slot = report,
            None => return Err(Error::MalformedProfile(format!("unknown buyer {buyer}"))),
        }
        ReportedProfile::new(self.items.clone(), self.seller_neighbors.clone(), reports)
    }

    pub fn report_map(&self) -> BTreeMap<AgentId, ReportedType> {
        self.agents[1..].iter().cloned().zip(self.reports.iter().cloned()).collect()
    }

    pub fn items(&self) -> &Items {
        &self.items
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    pub fn buyers(&self) -> &[AgentId] {
        &self.agents[1..]
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn seller_neighbors(&self) -> &BTreeSet<AgentId> {
        &self.seller_neighbors
    }

    pub fn index_of(&self, agent: &AgentId) -> Option<usize> {
        self.index.get(agent).copied()
    }

    pub fn agent(&self, index: usize) -> &AgentId {
        &self.agents[index]
    }

    pub fn report(&self, buyer: &AgentId) -> Option<&ReportedType> {
        match self.index_of(buyer) {
            Some(i) if i > 0 => Some(&self.reports[i - 1]),
            _ => None,
        }
    }

    pub fn coalition<'a>(&self, members: impl IntoIterator<Item = &'a AgentId>) -> Result<Coalition> {
        members.into_iter().try_fold(Coalition::EMPTY, |c, a| {
            self.index_of(a)
                .map(|i| c.with(i))
                .ok_or_else(|| Error::MalformedProfile(format!("unknown agent {a}")))
        })
    }

    pub fn everyone(&self) -> Coalition {
        Coalition::full(self.agents.len())
    }

    pub fn members(&self, coalition: Coalition) -> Vec<AgentId> {
        coalition.indices().map(|i| self.agents[i].clone()).collect()
    }

    pub(crate) fn scale(&self) -> &Scale {
        &self.scale
    }

    pub(crate) fn table(&self, index: usize) -> &[i128] {
        &self.tables[index]
    }

    /// Resolves an order into agent indices, checking it is a permutation.
    pub(crate) fn order_indices(&self, order: &super::Order) -> Result<Vec<usize>> {
        let mut seen = Coalition::EMPTY;
        let mut out = Vec::with_capacity(order.0.len());
        for a in &order.0 {
            let i = self
                .index_of(a)
                .ok_or_else(|| Error::MalformedOrder(format!("unknown agent {a}")))?;
            if seen.contains_index(i) {
                return Err(Error::MalformedOrder(format!("agent {a} appears twice")));
            }
            seen = seen.with(i);
            out.push(i);
        }
        if out.len() != self.agents.len() {
            return Err(Error::MalformedOrder(format!(
                "order has {} agents, the profile has {}",
                out.len(),
                self.agents.len()
            )));
        }
        Ok(out)
    }

    pub(crate) fn feasible(&self, coalition: Coalition) -> Coalition {
        if !coalition.contains_seller() {
            return Coalition::EMPTY;
        }
        let mut reached = 1u32;
        let mut frontier = 1u32;
        while frontier != 0 {
            let mut next = 0u32;
            for i in Coalition(frontier).indices() {
                next |= self.adjacency[i];
            }
            next &= coalition.0 & !reached;
            reached |= next;
            frontier = next;
        }
        Coalition(reached).without(0)
    }
}

fn check_valuation(id: &AgentId, valuation: &Valuation, items: &Items) -> Result<()> {
    let malformed = |msg: String| Err(Error::MalformedProfile(format!("buyer {id}: {msg}")));
    match (valuation, items) {
        (Valuation::Homogeneous(v), Items::Homogeneous { k }) => {
            if v.units() != *k as usize {
                return malformed(format!("{} marginals for {k} units", v.units()));
            }
        }
        (Valuation::Combinatorial(v), Items::Combinatorial { names }) => {
            if v.items() != names.len() {
                return malformed(format!("valuation over {} items, {} on sale", v.items(), names.len()));
            }
        }
        _ => return malformed("valuation kind does not match the items on sale".into()),
    }
    let violations = valuation.violations();
    if !violations.is_empty() {
        return malformed(violations.join(", "));
    }
    Ok(())
}

fn valuation_values(valuation: &Valuation) -> Vec<&Rational> {
    match valuation {
        Valuation::Homogeneous(v) => v.marginals().iter().collect(),
        Valuation::Combinatorial(v) => v.entries().values().collect(),
    }
}

fn scaled_table(valuation: &Valuation, items: &Items, scale: &Scale) -> Result<Vec<i128>> {
    match valuation {
        Valuation::Homogeneous(v) => {
            let mut table = Vec::with_capacity(v.units() + 1);
            let mut acc = 0i128;
            table.push(0);
            for m in v.marginals() {
                acc += scale.to_scaled(m)?;
                table.push(acc);
            }
            Ok(table)
        }
        Valuation::Combinatorial(v) => {
            let bundles = 1usize << items.budget();
            let mut table = vec![0i128; bundles];
            for (b, value) in v.entries() {
                table[b.0 as usize] = scale.to_scaled(value)?;
            }
            debug_assert_eq!(table[Bundle::EMPTY.0 as usize], 0);
            Ok(table)
        }
    }
}

/// Undirected graph induced by a reported profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportedGraph {
    pub agents: Vec<AgentId>,
    /// Each edge once, endpoints in increasing order.
    pub edges: BTreeSet<(AgentId, AgentId)>,
}

impl ReportedGraph {
    pub fn has_edge(&self, a: &AgentId, b: &AgentId) -> bool {
        let key = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
        self.edges.contains(&key)
    }

    /// Agents connected to the seller, seller excluded.
    pub fn seller_component(&self) -> BTreeSet<AgentId> {
        let mut seen = BTreeSet::from([AgentId::Seller]);
        let mut stack = vec![AgentId::Seller];
        while let Some(a) = stack.pop() {
            for (x, y) in &self.edges {
                let other = if *x == a { y } else if *y == a { x } else { continue };
                if seen.insert(other.clone()) {
                    stack.push(other.clone());
                }
            }
        }
        seen.remove(&AgentId::Seller);
        seen
    }
}

/// Edge `{i, j}` is present when either endpoint reports the other, or when
/// the seller lists the buyer.
pub fn reported_graph(profile: &ReportedProfile) -> ReportedGraph {
    let mut edges = BTreeSet::new();
    for (i, row) in profile.adjacency.iter().enumerate() {
        for j in Coalition(*row).indices().filter(|&j| j > i) {
            edges.insert((profile.agents[i].clone(), profile.agents[j].clone()));
        }
    }
    ReportedGraph { agents: profile.agents.clone(), edges }
}

/// Buyers reachable from the seller through reported edges using only
/// members of `coalition`. Empty when the seller is not a member.
pub fn feasible_set(profile: &ReportedProfile, coalition: Coalition) -> Coalition {
    profile.feasible(coalition)
}
