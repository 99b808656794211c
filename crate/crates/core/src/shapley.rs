//! Shapley contributions of every agent, seller included, to the maximum
//! social welfare of the network game.
//!
//! The coalition value is `SW*(B)`: the best welfare reachable by buyers
//! connected to the seller through members of `B` only.

use std::collections::HashMap;

use num::{BigInt, Zero};
use rayon::prelude::*;
use serde_json::json;

use crate::model::{AgentId, Coalition, Order, ReportedProfile};
use crate::orders::{draw_orders, mean_and_std_error};
use crate::rational::{self, Rational};
use crate::welfare::WelfareSolver;
use crate::{Error, Result, EXACT_COALITION_LIMIT};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateMode {
    Exact,
    Sampled { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShapleyEntry {
    pub agent: AgentId,
    /// Exact contribution, or the exact mean over the sampled orders.
    pub value: Rational,
    /// Standard error of the mean; `None` in exact mode.
    pub std_error: Option<f64>,
}

impl ShapleyEntry {
    pub fn estimate(&self) -> f64 {
        rational::to_f64(&self.value)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShapleyReport {
    pub mode: EstimateMode,
    /// `SW*(V)`, the welfare of the grand coalition.
    pub total_welfare: Rational,
    /// One entry per agent, seller first, buyers in id order.
    pub entries: Vec<ShapleyEntry>,
}

impl ShapleyReport {
    pub fn get(&self, agent: &AgentId) -> Option<&ShapleyEntry> {
        self.entries.iter().find(|e| &e.agent == agent)
    }

    pub fn value(&self, agent: &AgentId) -> Option<&Rational> {
        self.get(agent).map(|e| &e.value)
    }

    pub fn seller(&self) -> &Rational {
        &self.entries[0].value
    }

    pub fn sum(&self) -> Rational {
        self.entries.iter().map(|e| &e.value).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mode = match self.mode {
            EstimateMode::Exact => json!("exact"),
            EstimateMode::Sampled { samples, seed } => json!({ "samples": samples, "seed": seed }),
        };
        let entries: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|e| {
                json!({
                    "agent": e.agent.to_string(),
                    "phi": rational::to_json(&e.value),
                    "estimate": e.estimate(),
                    "std_error": e.std_error,
                })
            })
            .collect();
        json!({
            "mode": mode,
            "total_welfare": rational::to_json(&self.total_welfare),
            "contributions": entries,
        })
    }
}

/// `SW*(o_{<=i}) - SW*(o_{<i})` with nothing committed.
pub fn marginal_contribution(
    profile: &ReportedProfile,
    order: &Order,
    agent: &AgentId,
) -> Result<Rational> {
    let indices = profile.order_indices(order)?;
    let target = profile
        .index_of(agent)
        .ok_or_else(|| Error::MalformedOrder(format!("unknown agent {agent}")))?;
    let position = indices.iter().position(|&i| i == target).expect("order covers every agent");
    let before = Coalition(indices[..position].iter().fold(0, |acc, &i| acc | 1 << i));
    let mut solver = WelfareSolver::new(profile);
    let empty = vec![0; profile.agent_count()];
    let delta = solver.welfare(before.with(target), &empty)? - solver.welfare(before, &empty)?;
    Ok(profile.scale().to_rational(delta))
}

pub fn shapley_exact(profile: &ReportedProfile) -> Result<ShapleyReport> {
    shapley_exact_with_limit(profile, EXACT_COALITION_LIMIT)
}

/// Coalition form: `phi_i = sum over B not containing i of
/// |B|! (|V|-|B|-1)! / |V|! * (SW*(B + i) - SW*(B))`.
pub fn shapley_exact_with_limit(profile: &ReportedProfile, limit: usize) -> Result<ShapleyReport> {
    let n = profile.agent_count();
    if n > limit {
        return Err(Error::ExactLimit { what: "exact Shapley computation", agents: n, limit });
    }
    let mut solver = WelfareSolver::new(profile);
    let empty = vec![0; n];
    // Coalitions sharing a feasible set share a welfare value.
    let mut by_feasible: HashMap<Coalition, i128> = HashMap::new();
    let mut welfare = Vec::with_capacity(1 << n);
    for bits in 0..(1u32 << n) {
        let feasible = profile.feasible(Coalition(bits));
        let w = match by_feasible.get(&feasible) {
            Some(&w) => w,
            None => {
                let w = solver.welfare(Coalition(bits), &empty)?;
                by_feasible.insert(feasible, w);
                w
            }
        };
        welfare.push(w);
    }

    let weights: Vec<BigInt> = (0..n)
        .map(|size| rational::factorial(size) * rational::factorial(n - size - 1))
        .collect();
    let total_orders = rational::factorial(n);
    let entries = (0..n)
        .map(|i| {
            let mut acc = BigInt::zero();
            for bits in 0..(1u32 << n) {
                if bits >> i & 1 == 1 {
                    continue;
                }
                let delta = welfare[(bits | 1 << i) as usize] - welfare[bits as usize];
                if delta != 0 {
                    acc += &weights[bits.count_ones() as usize] * BigInt::from(delta);
                }
            }
            ShapleyEntry {
                agent: profile.agent(i).clone(),
                value: profile.scale().big_to_rational(acc) / Rational::from_integer(total_orders.clone()),
                std_error: None,
            }
        })
        .collect();

    Ok(ShapleyReport {
        mode: EstimateMode::Exact,
        total_welfare: profile.scale().to_rational(welfare[(1usize << n) - 1]),
        entries,
    })
}

/// Monte Carlo over uniformly drawn join orders. Orders are drawn up front
/// from `seed`, so the report depends only on `(samples, seed)`.
pub fn shapley_sampled(profile: &ReportedProfile, samples: usize, seed: u64) -> Result<ShapleyReport> {
    if samples == 0 {
        return Err(Error::Range("at least one sample is required".into()));
    }
    let n = profile.agent_count();
    let orders = draw_orders(n, samples, seed);
    let contributions: Vec<Vec<i128>> = orders
        .par_iter()
        .map_init(
            || WelfareSolver::new(profile),
            |solver, order| order_contributions(solver, order),
        )
        .collect::<Result<_>>()?;

    let scale = profile.scale();
    let mut solver = WelfareSolver::new(profile);
    let total = solver.welfare(profile.everyone(), &vec![0; n])?;
    let entries = (0..n)
        .map(|i| {
            let sum: i128 = contributions.iter().map(|mc| mc[i]).sum();
            let floats: Vec<f64> = contributions
                .iter()
                .map(|mc| rational::to_f64(&scale.to_rational(mc[i])))
                .collect();
            let (_, se) = mean_and_std_error(&floats);
            ShapleyEntry {
                agent: profile.agent(i).clone(),
                value: scale.to_rational(sum) / rational::int(samples as i64),
                std_error: Some(se),
            }
        })
        .collect();

    Ok(ShapleyReport {
        mode: EstimateMode::Sampled { samples, seed },
        total_welfare: scale.to_rational(total),
        entries,
    })
}

// Scaled marginal contribution of every agent along one order.
fn order_contributions(solver: &mut WelfareSolver<'_>, order: &[usize]) -> Result<Vec<i128>> {
    let n = order.len();
    let empty = vec![0; n];
    let mut out = vec![0i128; n];
    let mut prefix = Coalition::EMPTY;
    let mut before = 0i128;
    for &i in order {
        prefix = prefix.with(i);
        let after = solver.welfare(prefix, &empty)?;
        out[i] = after - before;
        before = after;
    }
    Ok(out)
}
