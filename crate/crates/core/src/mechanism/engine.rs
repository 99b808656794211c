use rayon::prelude::*;

use crate::model::{Coalition, ItemKind, Order, ReportedProfile};
use crate::rational;
use crate::welfare::{Allocation, WelfareSolver};
use crate::{Error, Result};

use super::Outcome;

/// State of a PDA/CPDA run after traversing a prefix of the order.
#[derive(Clone, Debug)]
pub(crate) struct RunState {
    pub prefix: Vec<usize>,
    pub placed: Coalition,
    /// Irrevocable holdings, by agent index (units or bundle mask).
    pub committed: Vec<u32>,
    /// Scaled payments, by agent index.
    pub payments: Vec<i128>,
    /// Units or items not yet handed out.
    pub remaining: u32,
    kind: ItemKind,
}

impl RunState {
    pub fn new(profile: &ReportedProfile) -> RunState {
        let n = profile.agent_count();
        RunState {
            prefix: Vec::with_capacity(n),
            placed: Coalition::EMPTY,
            committed: vec![0; n],
            payments: vec![0; n],
            remaining: profile.items().budget(),
            kind: profile.items().kind(),
        }
    }

    pub fn stopped(&self) -> bool {
        self.remaining == 0
    }

    pub fn sold_nothing(&self) -> bool {
        self.committed.iter().all(|&s| s == 0)
    }

    /// Traverses `agent`. The seller and every agent after the stop are
    /// placed without any allocation or payment.
    pub fn advance(&mut self, solver: &mut WelfareSolver<'_>, agent: usize) -> Result<()> {
        let before_set = self.placed;
        self.prefix.push(agent);
        self.placed = self.placed.with(agent);
        if agent == 0 || self.stopped() {
            return Ok(());
        }
        let before = solver.welfare(before_set, &self.committed)?;
        let optimum = solver.solve(self.placed, &self.committed)?;
        let slot = optimum.slots[agent];
        let own = solver.profile().table(agent)[slot as usize];
        self.payments[agent] = before - optimum.welfare + own;
        self.committed[agent] = slot;
        self.remaining -= match self.kind {
            ItemKind::Homogeneous => slot,
            ItemKind::Combinatorial => slot.count_ones(),
        };
        Ok(())
    }

    pub fn outcome(&self, profile: &ReportedProfile, order: Option<Order>) -> Outcome {
        let scale = profile.scale();
        Outcome {
            order,
            allocation: Allocation::from_slots(profile, &self.committed),
            payments: profile
                .buyers()
                .iter()
                .enumerate()
                .map(|(i, b)| (b.clone(), scale.to_rational(self.payments[i + 1])))
                .collect(),
        }
    }
}

/// Walks every order of the profile's agents in lexicographic index order,
/// sharing work across common prefixes. `visit` sees each terminal state
/// once, with the number of orders that end in it: a run that stopped after
/// `m` of `n` agents stands for `(n - m)!` orders.
///
/// Subtrees under each first agent are evaluated in parallel, one
/// accumulator each, returned in first-agent order.
pub(crate) fn sweep<A, Init, Visit>(
    profile: &ReportedProfile,
    limit: usize,
    init: Init,
    visit: Visit,
) -> Result<Vec<A>>
where
    A: Send,
    Init: Fn() -> A + Sync,
    Visit: Fn(&mut A, &mut WelfareSolver<'_>, &RunState, u64) -> Result<()> + Sync,
{
    let n = profile.agent_count();
    if n > limit {
        return Err(Error::ExactLimit { what: "exact order enumeration", agents: n, limit });
    }
    let factorials: Vec<u64> = (0..=n)
        .map(|m| (1..=m as u64).product())
        .collect();
    (0..n)
        .into_par_iter()
        .map(|first| {
            let mut solver = WelfareSolver::new(profile);
            let mut acc = init();
            let mut state = RunState::new(profile);
            state.advance(&mut solver, first)?;
            descend(&mut solver, state, n, &factorials, &mut acc, &visit)?;
            Ok(acc)
        })
        .collect()
}

fn descend<A, Visit>(
    solver: &mut WelfareSolver<'_>,
    state: RunState,
    n: usize,
    factorials: &[u64],
    acc: &mut A,
    visit: &Visit,
) -> Result<()>
where
    Visit: Fn(&mut A, &mut WelfareSolver<'_>, &RunState, u64) -> Result<()>,
{
    let depth = state.prefix.len();
    if state.stopped() || depth == n {
        return visit(acc, solver, &state, factorials[n - depth]);
    }
    for next in 0..n {
        if state.placed.contains_index(next) {
            continue;
        }
        let mut child = state.clone();
        child.advance(solver, next)?;
        descend(solver, child, n, factorials, acc, visit)?;
    }
    Ok(())
}

/// Total number of orders, as a rational.
pub(crate) fn order_count(n: usize) -> rational::Rational {
    rational::Rational::from_integer(rational::factorial(n))
}
