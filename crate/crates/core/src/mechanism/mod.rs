//! Permutation diffusion auctions (PDA for homogeneous units, CPDA for
//! heterogeneous items) and a Clarke-pivot VCG baseline.
//!
//! One PDA/CPDA run walks a join order. At each buyer `i` the welfare
//! optimum over the traversed agents is recomputed, keeping everything
//! already handed out; `i` receives what that optimum assigns to `i` and pays
//!
//! ```text
//! p_i = SW*(o_<i, committed) - SW*(o_<=i, committed) + v'_i(pi_i)
//! ```
//!
//! so a buyer who wins nothing is paid her marginal welfare contribution.
//! The run stops once everything is sold; later buyers get nothing and pay
//! nothing. The randomized mechanism draws the order uniformly.

mod engine;
mod expected;
mod json;
mod vcg;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num::Zero;

use crate::model::{AgentId, ItemKind, Order, ReportedProfile, Valuation};
use crate::rational::Rational;
use crate::welfare::Allocation;
use crate::{Error, Result};

pub(crate) use engine::{sweep, RunState};
pub use expected::{
    expected_exact_with_limit, expected_outcome, pda_expected_exact, pda_expected_sampled,
    BuyerExpectation, EvalMode, ExpectedOutcome,
};
pub use json::holding_json;
pub use vcg::vcg;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mechanism {
    Pda,
    Cpda,
    Vcg,
}

impl Mechanism {
    /// The randomized mechanism matching the profile's items.
    pub fn permutation_for(kind: ItemKind) -> Mechanism {
        match kind {
            ItemKind::Homogeneous => Mechanism::Pda,
            ItemKind::Combinatorial => Mechanism::Cpda,
        }
    }

    pub(crate) fn check(self, profile: &ReportedProfile) -> Result<()> {
        match (self, profile.items().kind()) {
            (Mechanism::Pda, ItemKind::Combinatorial) => {
                Err(Error::Unsupported("PDA sells homogeneous units; use CPDA".into()))
            }
            (Mechanism::Cpda, ItemKind::Homogeneous) => Err(Error::Unsupported(
                "CPDA sells heterogeneous items; use PDA".into(),
            )),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mechanism::Pda => "pda",
            Mechanism::Cpda => "cpda",
            Mechanism::Vcg => "vcg",
        })
    }
}

impl FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mechanism> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pda" => Ok(Mechanism::Pda),
            "cpda" => Ok(Mechanism::Cpda),
            "vcg" => Ok(Mechanism::Vcg),
            other => Err(Error::Parse(format!("unknown mechanism {other:?}"))),
        }
    }
}

/// Result of one deterministic run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    /// The join order used; `None` for VCG.
    pub order: Option<Order>,
    pub allocation: Allocation,
    /// Payment of every buyer; negative means the seller pays the buyer.
    pub payments: BTreeMap<AgentId, Rational>,
}

impl Outcome {
    pub fn payment(&self, buyer: &AgentId) -> Rational {
        self.payments.get(buyer).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn revenue(&self) -> Rational {
        self.payments.values().sum()
    }

    /// Units or items handed out.
    pub fn sold(&self) -> u32 {
        self.allocation.allocated()
    }

    /// `v(pi_i) - p_i` for a buyer whose true valuation is `valuation`.
    pub fn utility(&self, buyer: &AgentId, valuation: &Valuation) -> Result<Rational> {
        Ok(valuation.value(self.allocation.get(buyer))? - self.payment(buyer))
    }

    /// Utilities of every buyer, taking reports as true types.
    pub fn utilities(&self, profile: &ReportedProfile) -> Result<BTreeMap<AgentId, Rational>> {
        profile
            .buyers()
            .iter()
            .map(|b| {
                let v = &profile.report(b).expect("buyer of this profile").valuation;
                Ok((b.clone(), self.utility(b, v)?))
            })
            .collect()
    }
}

/// Every join order of the profile's agents, in lexicographic index order
/// (seller first, then buyers by id).
pub fn all_orders(profile: &ReportedProfile) -> impl Iterator<Item = Order> + '_ {
    let mut next: Option<Vec<usize>> = Some((0..profile.agent_count()).collect());
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut following = current.clone();
        if crate::orders::next_permutation(&mut following) {
            next = Some(following);
        }
        Some(Order::new(current.iter().map(|&i| profile.agent(i).clone())))
    })
}

/// PDA along a fixed order (homogeneous units).
pub fn pda_run_order(profile: &ReportedProfile, order: &Order) -> Result<Outcome> {
    Mechanism::Pda.check(profile)?;
    run_order(profile, order)
}

/// CPDA along a fixed order (heterogeneous items).
pub fn cpda_run_order(profile: &ReportedProfile, order: &Order) -> Result<Outcome> {
    Mechanism::Cpda.check(profile)?;
    run_order(profile, order)
}

/// PDA or CPDA along a fixed order, whichever matches the profile's items.
pub fn run_order(profile: &ReportedProfile, order: &Order) -> Result<Outcome> {
    let indices = profile.order_indices(order)?;
    let mut solver = crate::welfare::WelfareSolver::new(profile);
    let mut state = RunState::new(profile);
    for &i in &indices {
        state.advance(&mut solver, i)?;
    }
    Ok(state.outcome(profile, Some(order.clone())))
}
