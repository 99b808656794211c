use std::collections::{BTreeMap, HashMap};

use num::{BigInt, Zero};
use rayon::prelude::*;

use crate::model::{AgentId, Holding, ReportedProfile, Valuation};
use crate::orders::{draw_orders, mean_and_std_error};
use crate::rational::{self, Rational};
use crate::welfare::WelfareSolver;
use crate::{Error, Result, EXACT_ORDER_LIMIT};

use super::engine::{order_count, sweep, RunState};
use super::{vcg, Mechanism, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    /// Average over all `|V|!` orders.
    Exact,
    /// Average over orders drawn from `seed`.
    Sampled { samples: usize, seed: u64 },
    /// A single deterministic outcome (VCG).
    Deterministic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BuyerExpectation {
    pub agent: AgentId,
    pub payment: Rational,
    /// Expected utility, taking the report as the true valuation.
    pub utility: Rational,
    /// Probability of each holding the buyer can end up with.
    pub lottery: BTreeMap<Holding, Rational>,
    pub payment_std_error: Option<f64>,
    pub utility_std_error: Option<f64>,
}

impl BuyerExpectation {
    /// Expected utility if the buyer's true valuation is `valuation`.
    pub fn utility_under(&self, valuation: &Valuation) -> Result<Rational> {
        let mut value = Rational::zero();
        for (holding, p) in &self.lottery {
            value += valuation.value(*holding)? * p;
        }
        Ok(value - &self.payment)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpectedOutcome {
    pub mechanism: Mechanism,
    pub mode: EvalMode,
    /// Buyers in id order.
    pub buyers: Vec<BuyerExpectation>,
    pub revenue: Rational,
    pub revenue_std_error: Option<f64>,
    /// Probability that nothing at all is sold.
    pub unsold_rate: Rational,
}

impl ExpectedOutcome {
    pub fn get(&self, buyer: &AgentId) -> Option<&BuyerExpectation> {
        self.buyers.iter().find(|b| &b.agent == buyer)
    }

    pub fn utility(&self, buyer: &AgentId) -> Option<&Rational> {
        self.get(buyer).map(|b| &b.utility)
    }

    pub fn utility_under(&self, buyer: &AgentId, valuation: &Valuation) -> Result<Rational> {
        self.get(buyer)
            .ok_or_else(|| Error::MalformedProfile(format!("unknown buyer {buyer}")))?
            .utility_under(valuation)
    }

    /// Point-mass expectation of a deterministic outcome.
    pub fn deterministic(
        profile: &ReportedProfile,
        mechanism: Mechanism,
        outcome: &Outcome,
    ) -> Result<ExpectedOutcome> {
        let utilities = outcome.utilities(profile)?;
        let buyers = profile
            .buyers()
            .iter()
            .map(|b| BuyerExpectation {
                agent: b.clone(),
                payment: outcome.payment(b),
                utility: utilities[b].clone(),
                lottery: BTreeMap::from([(outcome.allocation.get(b), rational::int(1))]),
                payment_std_error: None,
                utility_std_error: None,
            })
            .collect();
        Ok(ExpectedOutcome {
            mechanism,
            mode: EvalMode::Deterministic,
            buyers,
            revenue: outcome.revenue(),
            revenue_std_error: None,
            unsold_rate: rational::int(if outcome.sold() == 0 { 1 } else { 0 }),
        })
    }
}

/// Evaluates `mechanism` on the profile. VCG ignores `mode`.
pub fn expected_outcome(
    profile: &ReportedProfile,
    mechanism: Mechanism,
    mode: EvalMode,
) -> Result<ExpectedOutcome> {
    mechanism.check(profile)?;
    match (mechanism, mode) {
        (Mechanism::Vcg, _) => ExpectedOutcome::deterministic(profile, mechanism, &vcg(profile)?),
        (_, EvalMode::Exact) => pda_expected_exact(profile),
        (_, EvalMode::Sampled { samples, seed }) => pda_expected_sampled(profile, samples, seed),
        (_, EvalMode::Deterministic) => Err(Error::Unsupported(format!(
            "{mechanism} is randomized; choose exact or sampled evaluation"
        ))),
    }
}

/// Exact expectation of PDA (or CPDA for heterogeneous items) over all
/// join orders.
pub fn pda_expected_exact(profile: &ReportedProfile) -> Result<ExpectedOutcome> {
    expected_exact_with_limit(profile, EXACT_ORDER_LIMIT)
}

struct Tally {
    payments: Vec<i128>,
    holdings: Vec<HashMap<u32, u64>>,
    unsold: u64,
}

impl Tally {
    fn new(n: usize) -> Tally {
        Tally { payments: vec![0; n], holdings: vec![HashMap::new(); n], unsold: 0 }
    }

    fn record(&mut self, state: &RunState, weight: u64) {
        for i in 1..self.payments.len() {
            self.payments[i] += weight as i128 * state.payments[i];
            *self.holdings[i].entry(state.committed[i]).or_default() += weight;
        }
        if state.sold_nothing() {
            self.unsold += weight;
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for i in 0..self.payments.len() {
            self.payments[i] += other.payments[i];
            for (slot, count) in &other.holdings[i] {
                *self.holdings[i].entry(*slot).or_default() += count;
            }
        }
        self.unsold += other.unsold;
        self
    }
}

pub fn expected_exact_with_limit(profile: &ReportedProfile, limit: usize) -> Result<ExpectedOutcome> {
    let n = profile.agent_count();
    let tally = sweep(profile, limit, || Tally::new(n), |tally, _, state, weight| {
        tally.record(state, weight);
        Ok(())
    })?
    .into_iter()
    .fold(Tally::new(n), Tally::merge);

    let orders = order_count(n);
    let scale = profile.scale();
    let kind = profile.items().kind();
    let mut revenue = Rational::zero();
    let mut buyers = Vec::with_capacity(n - 1);
    for i in 1..n {
        let agent = profile.agent(i).clone();
        let payment = scale.to_rational(tally.payments[i]) / &orders;
        let lottery: BTreeMap<Holding, Rational> = tally.holdings[i]
            .iter()
            .map(|(&slot, &count)| {
                (Holding::from_slot(kind, slot), Rational::from_integer(BigInt::from(count)) / &orders)
            })
            .collect();
        let valuation = &profile.report(&agent).expect("buyer of this profile").valuation;
        let mut expectation = BuyerExpectation {
            agent,
            payment,
            utility: Rational::zero(),
            lottery,
            payment_std_error: None,
            utility_std_error: None,
        };
        expectation.utility = expectation.utility_under(valuation)?;
        revenue += &expectation.payment;
        buyers.push(expectation);
    }
    Ok(ExpectedOutcome {
        mechanism: Mechanism::permutation_for(kind),
        mode: EvalMode::Exact,
        buyers,
        revenue,
        revenue_std_error: None,
        unsold_rate: Rational::from_integer(BigInt::from(tally.unsold)) / &orders,
    })
}

/// Monte Carlo expectation over `samples` orders drawn from `seed`.
pub fn pda_expected_sampled(profile: &ReportedProfile, samples: usize, seed: u64) -> Result<ExpectedOutcome> {
    if samples == 0 {
        return Err(Error::Range("at least one sample is required".into()));
    }
    let n = profile.agent_count();
    let runs: Vec<RunState> = draw_orders(n, samples, seed)
        .par_iter()
        .map_init(
            || WelfareSolver::new(profile),
            |solver, order| {
                let mut state = RunState::new(profile);
                for &i in order {
                    state.advance(solver, i)?;
                }
                Ok(state)
            },
        )
        .collect::<Result<_>>()?;

    let mut tally = Tally::new(n);
    for run in &runs {
        tally.record(run, 1);
    }
    let scale = profile.scale();
    let kind = profile.items().kind();
    let count = rational::int(samples as i64);
    let f = |scaled: i128| rational::to_f64(&scale.to_rational(scaled));

    let mut buyers = Vec::with_capacity(n - 1);
    for i in 1..n {
        let agent = profile.agent(i).clone();
        let table = profile.table(i);
        let payments: Vec<f64> = runs.iter().map(|r| f(r.payments[i])).collect();
        let utilities: Vec<f64> = runs
            .iter()
            .map(|r| f(table[r.committed[i] as usize] - r.payments[i]))
            .collect();
        let lottery = tally.holdings[i]
            .iter()
            .map(|(&slot, &c)| (Holding::from_slot(kind, slot), rational::int(c as i64) / &count))
            .collect();
        let mut expectation = BuyerExpectation {
            agent: agent.clone(),
            payment: scale.to_rational(tally.payments[i]) / &count,
            utility: Rational::zero(),
            lottery,
            payment_std_error: Some(mean_and_std_error(&payments).1),
            utility_std_error: Some(mean_and_std_error(&utilities).1),
        };
        let valuation = &profile.report(&agent).expect("buyer of this profile").valuation;
        expectation.utility = expectation.utility_under(valuation)?;
        buyers.push(expectation);
    }
    let revenues: Vec<f64> = runs.iter().map(|r| f(r.payments.iter().sum())).collect();
    Ok(ExpectedOutcome {
        mechanism: Mechanism::permutation_for(kind),
        mode: EvalMode::Sampled { samples, seed },
        revenue: buyers.iter().map(|b| &b.payment).sum(),
        buyers,
        revenue_std_error: Some(mean_and_std_error(&revenues).1),
        unsold_rate: rational::int(tally.unsold as i64) / count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::Order;
    use crate::orders::next_permutation;
    use crate::rational::{int, ratio};

    fn naive(profile: &ReportedProfile) -> (BTreeMap<AgentId, Rational>, Rational, Rational) {
        let n = profile.agent_count();
        let mut order: Vec<usize> = (0..n).collect();
        let mut utilities: BTreeMap<AgentId, Rational> = BTreeMap::new();
        let mut revenue = Rational::zero();
        let mut unsold = 0i64;
        let mut count = 0i64;
        loop {
            let ids = Order::new(order.iter().map(|&i| profile.agent(i).clone()));
            let outcome = super::super::run_order(profile, &ids).unwrap();
            for (b, u) in outcome.utilities(profile).unwrap() {
                *utilities.entry(b).or_insert_with(Rational::zero) += u;
            }
            revenue += outcome.revenue();
            unsold += (outcome.sold() == 0) as i64;
            count += 1;
            if !next_permutation(&mut order) {
                break;
            }
        }
        for u in utilities.values_mut() {
            *u /= int(count);
        }
        (utilities, revenue / int(count), ratio(unsold, count))
    }

    #[test]
    fn chain3_expectation() {
        let p = fixtures::chain3().truthful_profile().unwrap();
        let e = pda_expected_exact(&p).unwrap();
        assert_eq!(e.utility(&AgentId::buyer("A")).unwrap(), &ratio(7, 2));
        assert_eq!(e.utility(&AgentId::buyer("B")).unwrap(), &ratio(3, 2));
        assert_eq!(e.revenue, ratio(-19, 6));
        assert_eq!(e.unsold_rate, ratio(2, 3));
    }

    #[test]
    fn single_buyer_pays_nothing() {
        let p = fixtures::single().truthful_profile().unwrap();
        let e = pda_expected_exact(&p).unwrap();
        assert_eq!(e.utility(&AgentId::buyer("A")).unwrap(), &int(5));
        assert_eq!(e.unsold_rate, ratio(1, 2));
    }

    #[test]
    fn sweep_agrees_with_naive_loop() {
        for inst in [
            fixtures::chain3(),
            fixtures::twins(),
            fixtures::clique_two_buyers_three_units(),
            fixtures::two_items_split(),
            fixtures::pair_lover(),
            fixtures::chain3_combinatorial(),
        ] {
            let p = inst.truthful_profile().unwrap();
            let e = pda_expected_exact(&p).unwrap();
            let (utilities, revenue, unsold) = naive(&p);
            for b in &e.buyers {
                assert_eq!(&b.utility, &utilities[&b.agent]);
            }
            assert_eq!(e.revenue, revenue);
            assert_eq!(e.unsold_rate, unsold);
        }
    }

    #[test]
    fn lotteries_are_distributions() {
        let p = fixtures::clique_two_buyers_three_units().truthful_profile().unwrap();
        let e = pda_expected_exact(&p).unwrap();
        for b in &e.buyers {
            assert_eq!(b.lottery.values().sum::<Rational>(), int(1));
        }
    }

    #[test]
    fn exact_limit_is_explicit() {
        let p = fixtures::fig2().truthful_profile().unwrap();
        assert!(matches!(pda_expected_exact(&p), Err(Error::ExactLimit { agents: 11, .. })));
    }

    #[test]
    fn sampling_is_deterministic_and_close() {
        let p = fixtures::chain3().truthful_profile().unwrap();
        let a = pda_expected_sampled(&p, 3000, 5).unwrap();
        assert_eq!(a, pda_expected_sampled(&p, 3000, 5).unwrap());
        let b = a.get(&AgentId::buyer("A")).unwrap();
        let gap = (rational::to_f64(&b.utility) - 3.5).abs();
        assert!(gap < 4.0 * b.utility_std_error.unwrap() + 1e-9);
    }

    #[test]
    fn mechanism_must_match_items() {
        let p = fixtures::two_items_split().truthful_profile().unwrap();
        assert!(expected_outcome(&p, Mechanism::Pda, EvalMode::Exact).is_err());
        assert!(expected_outcome(&p, Mechanism::Cpda, EvalMode::Exact).is_ok());
        assert!(expected_outcome(&p, Mechanism::Vcg, EvalMode::Exact).is_ok());
    }
}
