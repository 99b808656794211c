//! Welfare maximization restricted to a coalition's feasible buyers, with
//! holdings already committed to earlier buyers acting as lower bounds.
//!
//! Homogeneous units are handed out greedily, one at a time, to the feasible
//! buyer with the highest next marginal value (lowest id on ties; a unit is
//! never given away at zero marginal value). Concave marginals make this
//! optimal. Heterogeneous items are assigned exhaustively; among the
//! maximizers the lexicographically smallest owner vector wins, where
//! "unassigned" sorts before every buyer.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use num::Zero;

use crate::model::{
    evaluate, reported_graph, AgentId, Bundle, Coalition, Holding, ItemKind, Items,
    ReportedProfile,
};
use crate::rational::Rational;
use crate::{Error, Result};

/// Largest exhaustive search `max_welfare` runs for heterogeneous items.
pub const SEARCH_LIMIT: u128 = 1 << 24;

/// Largest candidate count [`brute_force_welfare`] enumerates.
pub const ORACLE_LIMIT: u128 = 1_000_000;

/// Holdings per buyer. Buyers absent from the map hold nothing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Allocation {
    kind: ItemKind,
    holdings: BTreeMap<AgentId, Holding>,
}

/// Holdings already irrevocably assigned to traversed buyers.
pub type CommittedAllocation = Allocation;

impl Allocation {
    pub fn empty(kind: ItemKind) -> Allocation {
        Allocation { kind, holdings: BTreeMap::new() }
    }

    pub fn kind(&self) -> ItemKind {
        self.kind
    }

    pub fn with(mut self, agent: AgentId, holding: Holding) -> Allocation {
        self.set(agent, holding);
        self
    }

    pub fn set(&mut self, agent: AgentId, holding: Holding) {
        assert_eq!(holding.kind(), self.kind, "holding kind mismatch");
        if holding.is_nothing() {
            self.holdings.remove(&agent);
        } else {
            self.holdings.insert(agent, holding);
        }
    }

    pub fn get(&self, agent: &AgentId) -> Holding {
        self.holdings
            .get(agent)
            .copied()
            .unwrap_or_else(|| Holding::from_slot(self.kind, 0))
    }

    /// Buyers holding something, in id order.
    pub fn holdings(&self) -> &BTreeMap<AgentId, Holding> {
        &self.holdings
    }

    pub fn is_empty(&self) -> bool {
        self.holdings.is_empty()
    }

    /// Units handed out, or items handed out.
    pub fn allocated(&self) -> u32 {
        self.holdings
            .values()
            .map(|h| match h {
                Holding::Units(q) => *q,
                Holding::Bundle(b) => b.len() as u32,
            })
            .sum()
    }

    /// Social welfare under the profile's reported valuations.
    pub fn welfare(&self, profile: &ReportedProfile) -> Result<Rational> {
        let mut total = Rational::zero();
        for (agent, holding) in &self.holdings {
            let report = profile
                .report(agent)
                .ok_or_else(|| Error::MalformedProfile(format!("allocation names unknown buyer {agent}")))?;
            total += evaluate(&report.valuation, *holding)?;
        }
        Ok(total)
    }

    pub(crate) fn to_slots(&self, profile: &ReportedProfile) -> Result<Vec<u32>> {
        if self.kind != profile.items().kind() {
            return Err(Error::MalformedProfile(
                "allocation kind does not match the items on sale".into(),
            ));
        }
        let mut slots = vec![0u32; profile.agent_count()];
        for (agent, holding) in &self.holdings {
            match profile.index_of(agent) {
                Some(i) if i > 0 => slots[i] = holding.slot(),
                _ => {
                    return Err(Error::MalformedProfile(format!(
                        "allocation names unknown buyer {agent}"
                    )))
                }
            }
        }
        Ok(slots)
    }

    pub(crate) fn from_slots(profile: &ReportedProfile, slots: &[u32]) -> Allocation {
        let kind = profile.items().kind();
        let holdings = slots
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &s)| s != 0)
            .map(|(i, &s)| (profile.agent(i).clone(), Holding::from_slot(kind, s)))
            .collect();
        Allocation { kind, holdings }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WelfareResult {
    pub allocation: Allocation,
    pub welfare: Rational,
}

/// Optimal allocation among `coalition`'s feasible buyers that keeps every
/// committed holding.
pub fn max_welfare(
    profile: &ReportedProfile,
    coalition: Coalition,
    committed: &CommittedAllocation,
) -> Result<WelfareResult> {
    let slots = committed.to_slots(profile)?;
    let solution = WelfareSolver::new(profile).solve(coalition, &slots)?;
    Ok(WelfareResult {
        allocation: Allocation::from_slots(profile, &solution.slots),
        welfare: profile.scale().to_rational(solution.welfare),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Solution {
    pub welfare: i128,
    pub slots: Vec<u32>,
}

/// Memoizing solver over one profile's scaled valuation tables. Results are
/// keyed by (feasible set, committed holdings), which determine them.
pub(crate) struct WelfareSolver<'p> {
    profile: &'p ReportedProfile,
    cache: HashMap<(Coalition, Vec<u32>), Rc<Solution>>,
}

impl<'p> WelfareSolver<'p> {
    pub fn new(profile: &'p ReportedProfile) -> Self {
        WelfareSolver { profile, cache: HashMap::new() }
    }

    pub fn profile(&self) -> &'p ReportedProfile {
        self.profile
    }

    pub fn solve(&mut self, coalition: Coalition, committed: &[u32]) -> Result<Rc<Solution>> {
        let feasible = self.profile.feasible(coalition);
        if let Some(hit) = self.cache.get(&(feasible, committed.to_vec())) {
            return Ok(hit.clone());
        }
        let solution = Rc::new(match self.profile.items() {
            Items::Homogeneous { k } => greedy(self.profile, feasible, committed, *k)?,
            Items::Combinatorial { names } => {
                exhaustive(self.profile, feasible, committed, names.len())?
            }
        });
        self.cache.insert((feasible, committed.to_vec()), solution.clone());
        Ok(solution)
    }

    pub fn welfare(&mut self, coalition: Coalition, committed: &[u32]) -> Result<i128> {
        Ok(self.solve(coalition, committed)?.welfare)
    }

    /// Welfare of an allocation given as slots, under reported valuations.
    pub fn value_of(&self, slots: &[u32]) -> i128 {
        slots
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &s)| self.profile.table(i)[s as usize])
            .sum()
    }
}

fn check_holders(profile: &ReportedProfile, feasible: Coalition, committed: &[u32]) -> Result<()> {
    if committed.len() != profile.agent_count() || committed[0] != 0 {
        return Err(Error::InfeasibleCommitted("the seller cannot hold items".into()));
    }
    for (i, &s) in committed.iter().enumerate().skip(1) {
        if s != 0 && !feasible.contains_index(i) {
            return Err(Error::InfeasibleCommitted(format!(
                "{} holds items but is not feasible in the coalition",
                profile.agent(i)
            )));
        }
    }
    Ok(())
}

fn greedy(profile: &ReportedProfile, feasible: Coalition, committed: &[u32], k: u32) -> Result<Solution> {
    check_holders(profile, feasible, committed)?;
    let used: u32 = committed.iter().sum();
    if used > k {
        return Err(Error::InfeasibleCommitted(format!("{used} units committed, only {k} exist")));
    }
    let mut slots = committed.to_vec();
    for _ in used..k {
        let mut best: Option<(usize, i128)> = None;
        for i in feasible.indices() {
            let table = profile.table(i);
            let held = slots[i] as usize;
            if held + 1 >= table.len() {
                continue;
            }
            let marginal = table[held + 1] - table[held];
            if marginal > best.map_or(0, |(_, m)| m) {
                best = Some((i, marginal));
            }
        }
        match best {
            Some((i, _)) => slots[i] += 1,
            None => break,
        }
    }
    let welfare = slots
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &q)| profile.table(i)[q as usize])
        .sum();
    Ok(Solution { welfare, slots })
}

fn exhaustive(
    profile: &ReportedProfile,
    feasible: Coalition,
    committed: &[u32],
    items: usize,
) -> Result<Solution> {
    check_holders(profile, feasible, committed)?;
    let mut taken = 0u32;
    for &b in committed {
        if b & taken != 0 {
            return Err(Error::InfeasibleCommitted("an item is committed twice".into()));
        }
        taken |= b;
    }
    if !Bundle(taken).is_subset_of(Bundle::full(items)) {
        return Err(Error::InfeasibleCommitted("committed item outside the item set".into()));
    }

    let free: Vec<usize> = (0..items).filter(|&j| taken >> j & 1 == 0).collect();
    let owners: Vec<usize> = feasible.indices().collect();
    let radix = owners.len() + 1;
    let size = (radix as u128).saturating_pow(free.len() as u32);
    if size > SEARCH_LIMIT {
        return Err(Error::TooLarge { size, limit: SEARCH_LIMIT });
    }

    // digits[d] = 0 leaves free[d] unassigned, otherwise gives it to owners[digit - 1].
    let mut digits = vec![0usize; free.len()];
    let mut slots = committed.to_vec();
    let mut best: Option<(i128, Vec<u32>)> = None;
    loop {
        slots.copy_from_slice(committed);
        for (d, &digit) in digits.iter().enumerate() {
            if digit > 0 {
                slots[owners[digit - 1]] |= 1 << free[d];
            }
        }
        let welfare: i128 = owners
            .iter()
            .map(|&i| profile.table(i)[slots[i] as usize])
            .sum();
        if best.as_ref().is_none_or(|(w, _)| welfare > *w) {
            best = Some((welfare, slots.clone()));
        }
        // Odometer increment, last digit fastest.
        let mut pos = digits.len();
        loop {
            if pos == 0 {
                let (welfare, slots) = best.expect("at least one assignment is enumerated");
                return Ok(Solution { welfare, slots });
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < radix {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Exhaustive reference for [`max_welfare`]: enumerates every allocation
/// that respects the committed holdings, using its own reachability and the
/// valuations' rational values.
pub fn brute_force_welfare(
    profile: &ReportedProfile,
    coalition: Coalition,
    committed: &CommittedAllocation,
) -> Result<WelfareResult> {
    let kind = profile.items().kind();
    let members = profile.members(coalition);
    let feasible = reachable_within(profile, &members);
    for (agent, holding) in committed.holdings() {
        if !holding.is_nothing() && !feasible.contains(agent) {
            return Err(Error::InfeasibleCommitted(format!("{agent} is not feasible")));
        }
    }
    let budget = profile.items().budget();
    let lower: Vec<Holding> = feasible.iter().map(|a| committed.get(a)).collect();

    let size = match kind {
        ItemKind::Homogeneous => (budget as u128 + 1).saturating_pow(feasible.len() as u32),
        ItemKind::Combinatorial => {
            (feasible.len() as u128 + 1).saturating_pow(budget.saturating_sub(committed.allocated()))
        }
    };
    if size > ORACLE_LIMIT {
        return Err(Error::TooLarge { size, limit: ORACLE_LIMIT });
    }

    let mut best: Option<(Rational, Vec<Holding>)> = None;
    let mut current = Vec::with_capacity(feasible.len());
    enumerate(profile, &feasible, &lower, budget, &mut current, &mut best)?;

    let mut allocation = Allocation::empty(kind);
    let (welfare, holdings) = match best {
        Some(found) => found,
        None => {
            return Err(Error::InfeasibleCommitted(
                "committed holdings exceed the items on sale".into(),
            ))
        }
    };
    for (agent, holding) in feasible.iter().zip(holdings) {
        allocation.set(agent.clone(), holding);
    }
    Ok(WelfareResult { allocation, welfare })
}

fn enumerate(
    profile: &ReportedProfile,
    buyers: &[AgentId],
    lower: &[Holding],
    budget: u32,
    current: &mut Vec<Holding>,
    best: &mut Option<(Rational, Vec<Holding>)>,
) -> Result<()> {
    let depth = current.len();
    if depth == buyers.len() {
        let mut total = Rational::zero();
        for (agent, holding) in buyers.iter().zip(current.iter()) {
            let report = profile.report(agent).expect("feasible buyers have reports");
            total += evaluate(&report.valuation, *holding)?;
        }
        if best.as_ref().is_none_or(|(w, _)| total > *w) {
            *best = Some((total, current.clone()));
        }
        return Ok(());
    }
    let candidates: Vec<Holding> = match lower[depth] {
        Holding::Units(min) => {
            let used: u32 = current
                .iter()
                .map(|h| match h {
                    Holding::Units(q) => *q,
                    Holding::Bundle(_) => 0,
                })
                .sum();
            let reserved: u32 = lower[depth + 1..]
                .iter()
                .map(|h| match h {
                    Holding::Units(q) => *q,
                    Holding::Bundle(_) => 0,
                })
                .sum();
            (min..=budget.saturating_sub(used + reserved)).map(Holding::Units).collect()
        }
        Holding::Bundle(min) => {
            let mut used = 0u32;
            for h in current.iter().chain(&lower[depth + 1..]) {
                if let Holding::Bundle(b) = h {
                    used |= b.0;
                }
            }
            let full = Bundle::full(budget as usize).0;
            if used & min.0 != 0 {
                Vec::new()
            } else {
                (0..=full)
                    .filter(|&b| b & min.0 == min.0 && b & used == 0)
                    .map(|b| Holding::Bundle(Bundle(b)))
                    .collect()
            }
        }
    };
    for holding in candidates {
        current.push(holding);
        enumerate(profile, buyers, lower, budget, current, best)?;
        current.pop();
    }
    Ok(())
}

fn reachable_within(profile: &ReportedProfile, members: &[AgentId]) -> Vec<AgentId> {
    if !members.contains(&AgentId::Seller) {
        return Vec::new();
    }
    let graph = reported_graph(profile);
    let mut reached = vec![AgentId::Seller];
    let mut i = 0;
    while i < reached.len() {
        let a = reached[i].clone();
        for m in members {
            if !reached.contains(m) && graph.has_edge(&a, m) {
                reached.push(m.clone());
            }
        }
        i += 1;
    }
    reached.retain(|a| !a.is_seller());
    reached.sort();
    reached
}
