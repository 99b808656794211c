use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::Zero;
use rayon::prelude::*;

use crate::mechanism::{expected_outcome, EvalMode, Mechanism};
use crate::model::{
    AgentId, AuctionInstance, Bundle, BuyerType, CombinatorialValuation, HomogeneousValuation,
    Valuation,
};
use crate::rational::{self, Rational};
use crate::{Error, Result};

/// Finite set of misreports tried for each buyer: every subset of true
/// neighbors, crossed with every combination of per-value transforms.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviationGrid {
    /// Each reported value may be scaled by one of these...
    pub multipliers: Vec<Rational>,
    /// ...or shifted up by one of these.
    pub additive: Vec<Rational>,
    /// Try hiding subsets of neighbors.
    pub hide_neighbors: bool,
    /// Refuse grids with more deviations per buyer than this.
    pub limit: usize,
}

impl Default for DeviationGrid {
    fn default() -> DeviationGrid {
        DeviationGrid {
            multipliers: vec![rational::int(0), rational::ratio(1, 2), rational::int(1), rational::int(2)],
            additive: vec![rational::int(1)],
            hide_neighbors: true,
            limit: 1 << 16,
        }
    }
}

impl DeviationGrid {
    fn transforms(&self, value: &Rational) -> Vec<Rational> {
        self.multipliers
            .iter()
            .map(|m| m * value)
            .chain(self.additive.iter().map(|a| a + value))
            .collect()
    }

    fn options(&self) -> usize {
        self.multipliers.len() + self.additive.len()
    }
}

/// One misreport: a reported valuation plus the neighbors left out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deviation {
    pub valuation: Valuation,
    pub hidden: BTreeSet<AgentId>,
}

impl fmt::Display for Deviation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.valuation {
            Valuation::Homogeneous(v) => {
                let m: Vec<String> = v.marginals().iter().map(rational::format).collect();
                write!(f, "marginals [{}]", m.join(", "))?;
            }
            Valuation::Combinatorial(v) => {
                let m: Vec<String> = v
                    .entries()
                    .iter()
                    .map(|(b, x)| format!("{}: {}", b.to_bits(v.items()), rational::format(x)))
                    .collect();
                write!(f, "bundles {{{}}}", m.join(", "))?;
            }
        }
        if !self.hidden.is_empty() {
            let h: Vec<String> = self.hidden.iter().map(|a| a.to_string()).collect();
            write!(f, ", hiding {}", h.join(","))?;
        }
        Ok(())
    }
}

/// A misreport that strictly beats truth-telling in expectation.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviationFinding {
    pub buyer: AgentId,
    pub deviation: Deviation,
    pub truthful_utility: Rational,
    pub deviant_utility: Rational,
    pub gain: Rational,
}

/// Every distinct misreport of `buyer` on the grid, truth excluded, in a
/// fixed order.
pub fn deviations_for(
    instance: &AuctionInstance,
    buyer: &AgentId,
    grid: &DeviationGrid,
) -> Result<Vec<Deviation>> {
    let truth = instance
        .buyers
        .get(buyer)
        .ok_or_else(|| Error::MalformedProfile(format!("unknown buyer {buyer}")))?;
    let valuations = valuation_grid(&truth.valuation, grid)?;
    let neighbors: Vec<&AgentId> = truth.neighbors.iter().collect();
    let subsets = if grid.hide_neighbors { 1usize << neighbors.len() } else { 1 };
    let total = valuations.len().saturating_mul(subsets);
    if neighbors.len() >= usize::BITS as usize - 1 || total > grid.limit {
        return Err(Error::TooLarge { size: total as u128, limit: grid.limit as u128 });
    }
    let mut out = Vec::with_capacity(total);
    for mask in 0..subsets {
        let hidden: BTreeSet<AgentId> = neighbors
            .iter()
            .enumerate()
            .filter(|(j, _)| mask >> j & 1 == 1)
            .map(|(_, a)| (*a).clone())
            .collect();
        for valuation in &valuations {
            if hidden.is_empty() && valuation == &truth.valuation {
                continue;
            }
            out.push(Deviation { valuation: valuation.clone(), hidden: hidden.clone() });
        }
    }
    Ok(out)
}

// Distinct reported valuations: every per-value combination of transforms,
// marginals clamped to stay non-increasing.
fn valuation_grid(truth: &Valuation, grid: &DeviationGrid) -> Result<Vec<Valuation>> {
    let values: Vec<Rational> = match truth {
        Valuation::Homogeneous(v) => v.marginals().to_vec(),
        Valuation::Combinatorial(v) => {
            let items = v.items();
            (1..1u32 << items).map(|b| v.value(Bundle(b))).collect::<Result<_>>()?
        }
    };
    let options = grid.options();
    let combos = (options as u128).checked_pow(values.len() as u32).unwrap_or(u128::MAX);
    if combos > grid.limit as u128 {
        return Err(Error::TooLarge { size: combos, limit: grid.limit as u128 });
    }
    let choices: Vec<Vec<Rational>> = values.iter().map(|x| grid.transforms(x)).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut digits = vec![0usize; values.len()];
    loop {
        let picked: Vec<Rational> = digits.iter().zip(&choices).map(|(&d, c)| c[d].clone()).collect();
        let valuation = match truth {
            Valuation::Homogeneous(_) => {
                let mut marginals = picked;
                for j in 1..marginals.len() {
                    if marginals[j] > marginals[j - 1] {
                        marginals[j] = marginals[j - 1].clone();
                    }
                }
                Valuation::Homogeneous(HomogeneousValuation::new(marginals))
            }
            Valuation::Combinatorial(v) => {
                let table: BTreeMap<Bundle, Rational> = picked
                    .into_iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(j, x)| (Bundle(j as u32 + 1), x))
                    .collect();
                Valuation::Combinatorial(CombinatorialValuation::new(v.items(), table))
            }
        };
        if seen.insert(format!("{valuation:?}")) {
            out.push(valuation);
        }
        // Odometer over the per-value choices.
        let mut j = 0;
        loop {
            if j == digits.len() {
                return Ok(out);
            }
            digits[j] += 1;
            if digits[j] < options {
                break;
            }
            digits[j] = 0;
            j += 1;
        }
    }
}

/// Compares each buyer's exact expected utility (under her true valuation)
/// when truthful and when misreporting, over the whole grid. Returns the
/// strictly profitable misreports ordered by buyer, then grid position.
pub fn ic_audit(
    instance: &AuctionInstance,
    mechanism: Mechanism,
    grid: &DeviationGrid,
) -> Result<Vec<DeviationFinding>> {
    let truthful = expected_outcome(&instance.truthful_profile()?, mechanism, EvalMode::Exact)?;
    let mut jobs = Vec::new();
    for (buyer, truth) in &instance.buyers {
        for deviation in deviations_for(instance, buyer, grid)? {
            jobs.push((buyer, truth, deviation));
        }
    }
    let results: Vec<Option<DeviationFinding>> = jobs
        .into_par_iter()
        .map(|(buyer, truth, deviation)| {
            let neighbors = truth.neighbors.difference(&deviation.hidden).cloned();
            let report = BuyerType::new(deviation.valuation.clone(), neighbors);
            let profile = instance.deviate(buyer, report)?;
            let outcome = expected_outcome(&profile, mechanism, EvalMode::Exact)?;
            let deviant_utility = outcome.utility_under(buyer, &truth.valuation)?;
            let truthful_utility = truthful.utility_under(buyer, &truth.valuation)?;
            let gain = &deviant_utility - &truthful_utility;
            Ok((gain > Rational::zero()).then(|| DeviationFinding {
                buyer: buyer.clone(),
                deviation,
                truthful_utility,
                deviant_utility,
                gain,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(results.into_iter().flatten().collect())
}
