use rayon::prelude::*;

use crate::mechanism::{pda_expected_exact, sweep, vcg, EvalMode, Mechanism, RunState};
use crate::model::{AgentId, AuctionInstance, Order, ReportedProfile};
use crate::orders::draw_orders;
use crate::rational::{self, Rational};
use crate::shapley::shapley_exact;
use crate::welfare::WelfareSolver;
use crate::{Result, EXACT_ORDER_LIMIT};

/// A buyer left worse off than by staying home.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrViolation {
    /// First order (in enumeration order) of the affected class; `None`
    /// for VCG.
    pub order: Option<Order>,
    /// Number of orders sharing this outcome.
    pub orders: u64,
    pub buyer: AgentId,
    pub utility: Rational,
}

/// Checks `u_i >= 0` for every truthful buyer in every order (exact) or in
/// every drawn order (sampled).
pub fn ir_audit(
    instance: &AuctionInstance,
    mechanism: Mechanism,
    mode: EvalMode,
) -> Result<Vec<IrViolation>> {
    let profile = instance.truthful_profile()?;
    mechanism.check(&profile)?;
    if mechanism == Mechanism::Vcg {
        let outcome = vcg(&profile)?;
        return Ok(outcome
            .utilities(&profile)?
            .into_iter()
            .filter(|(_, u)| rational::is_negative(u))
            .map(|(buyer, utility)| IrViolation { order: None, orders: 1, buyer, utility })
            .collect());
    }
    match mode {
        EvalMode::Sampled { samples, seed } => {
            let found: Vec<Vec<IrViolation>> = draw_orders(profile.agent_count(), samples, seed)
                .par_iter()
                .map_init(
                    || WelfareSolver::new(&profile),
                    |solver, order| {
                        let mut state = RunState::new(&profile);
                        for &i in order {
                            state.advance(solver, i)?;
                        }
                        Ok(violations(&profile, &state, 1))
                    },
                )
                .collect::<Result<_>>()?;
            Ok(found.into_iter().flatten().collect())
        }
        _ => {
            let found = sweep(&profile, EXACT_ORDER_LIMIT, Vec::new, |acc, _, state, weight| {
                acc.extend(violations(&profile, state, weight));
                Ok(())
            })?;
            Ok(found.into_iter().flatten().collect())
        }
    }
}

fn violations(profile: &ReportedProfile, state: &RunState, weight: u64) -> Vec<IrViolation> {
    let mut out = Vec::new();
    for i in 1..profile.agent_count() {
        let utility = profile.table(i)[state.committed[i] as usize] - state.payments[i];
        if utility < 0 {
            let mut order: Vec<AgentId> = state.prefix.iter().map(|&j| profile.agent(j).clone()).collect();
            order.extend(
                (0..profile.agent_count())
                    .filter(|&j| !state.placed.contains_index(j))
                    .map(|j| profile.agent(j).clone()),
            );
            out.push(IrViolation {
                order: Some(Order::new(order)),
                orders: weight,
                buyer: profile.agent(i).clone(),
                utility: profile.scale().to_rational(utility),
            });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnsoldReport {
    /// Probability that PDA sells nothing.
    pub mu: Rational,
    /// `1/(k+1)`.
    pub bound: Rational,
    pub pass: bool,
}

/// PDA leaves everything unsold with probability at least `1/(k+1)`.
pub fn unsold_rate_audit(instance: &AuctionInstance) -> Result<UnsoldReport> {
    let profile = instance.truthful_profile()?;
    Mechanism::Pda.check(&profile)?;
    let mu = pda_expected_exact(&profile)?.unsold_rate;
    let bound = rational::ratio(1, instance.items.budget() as i64 + 1);
    Ok(UnsoldReport { pass: mu >= bound, mu, bound })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RevenueReport {
    /// Expected sum of payments.
    pub revenue: Rational,
    /// The seller's Shapley contribution.
    pub seller_phi: Rational,
    /// Expected gap between the best completion of the final allocation
    /// and the final allocation itself.
    pub expected_loss: Rational,
    /// `revenue == seller_phi - expected_loss`.
    pub holds: bool,
}

/// Checks that expected revenue equals the seller's Shapley contribution
/// minus the expected welfare left on the table. Revenue comes from the
/// payments; the right side from coalition values and post-hoc completion.
pub fn revenue_audit(instance: &AuctionInstance) -> Result<RevenueReport> {
    let profile = instance.truthful_profile()?;
    let n = profile.agent_count();
    let everyone = profile.everyone();
    let sums = sweep(&profile, EXACT_ORDER_LIMIT, || (0i128, 0i128), |acc, solver, state, weight| {
        let paid: i128 = state.payments.iter().sum();
        let completed = solver.welfare(everyone, &state.committed)?;
        let loss = completed - solver.value_of(&state.committed);
        acc.0 += weight as i128 * paid;
        acc.1 += weight as i128 * loss;
        Ok(())
    })?;
    let (paid, loss) = sums.into_iter().fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let orders = Rational::from_integer(rational::factorial(n));
    let scale = profile.scale();
    let revenue = scale.to_rational(paid) / &orders;
    let expected_loss = scale.to_rational(loss) / &orders;
    let seller_phi = shapley_exact(&profile)?.seller().clone();
    Ok(RevenueReport {
        holds: revenue == &seller_phi - &expected_loss,
        revenue,
        seller_phi,
        expected_loss,
    })
}
