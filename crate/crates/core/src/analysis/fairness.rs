use num::{Signed, Zero};

use crate::mechanism::{expected_outcome, EvalMode, Mechanism};
use crate::model::{AgentId, AuctionInstance};
use crate::rational::{self, Rational};
use crate::shapley::shapley_exact;
use crate::Result;

/// Standard errors of slack allowed around each bound in sampled mode.
pub const SF_SIGMAS: f64 = 3.0;

#[derive(Clone, Debug, PartialEq)]
pub struct FairnessEntry {
    pub agent: AgentId,
    pub phi: Rational,
    pub expected_utility: Rational,
    pub utility_std_error: Option<f64>,
    /// `E[u]/phi`; `None` for null players (`phi = 0`).
    pub ratio: Option<Rational>,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

impl FairnessEntry {
    pub fn is_null_player(&self) -> bool {
        self.ratio.is_none()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FairnessReport {
    pub mechanism: Mechanism,
    pub mode: EvalMode,
    pub entries: Vec<FairnessEntry>,
    /// Smallest ratio over buyers with `phi > 0`.
    pub epsilon_min: Option<Rational>,
    /// Guaranteed fraction; `None` when the mechanism promises none.
    pub bound: Option<Rational>,
    /// Every ratio at least the bound (vacuous without a bound).
    pub lower_pass: bool,
    /// Every ratio at most 1. PDA guarantees this; CPDA does not, since a
    /// committed bundle can strand items for later arrivals.
    pub upper_pass: bool,
    /// Null players get exactly nothing in expectation. Same caveat for CPDA.
    pub null_pass: bool,
}

impl FairnessReport {
    pub fn pass(&self) -> bool {
        self.lower_pass && self.upper_pass && self.null_pass
    }

    pub fn get(&self, buyer: &AgentId) -> Option<&FairnessEntry> {
        self.entries.iter().find(|e| &e.agent == buyer)
    }
}

/// Guaranteed share of the Shapley contribution: `max(1/(k+1), 1/n)` for
/// PDA with `k` units and `n` buyers, `1/n` for CPDA, none for VCG.
pub fn fairness_bound(instance: &AuctionInstance, mechanism: Mechanism) -> Option<Rational> {
    let n = instance.buyer_count().max(1) as i64;
    match mechanism {
        Mechanism::Pda => {
            let k = instance.items.budget() as i64;
            Some(rational::ratio(1, k + 1).max(rational::ratio(1, n)))
        }
        Mechanism::Cpda => Some(rational::ratio(1, n)),
        Mechanism::Vcg => None,
    }
}

/// Compares truthful expected utilities with exact Shapley contributions.
///
/// In exact mode the comparison is exact. In sampled mode the expected
/// utility is an estimate and each bound gets [`SF_SIGMAS`] standard errors
/// of slack.
pub fn sf_audit(
    instance: &AuctionInstance,
    mechanism: Mechanism,
    mode: EvalMode,
) -> Result<FairnessReport> {
    let profile = instance.truthful_profile()?;
    let shapley = shapley_exact(&profile)?;
    let expected = expected_outcome(&profile, mechanism, mode)?;
    let bound = fairness_bound(instance, mechanism);

    let mut entries = Vec::new();
    for b in &expected.buyers {
        let phi = shapley.value(&b.agent).expect("same agents").clone();
        let u = b.utility.clone();
        let slack = Rational::from_float(SF_SIGMAS * b.utility_std_error.unwrap_or(0.0))
            .unwrap_or_else(Rational::zero);
        let (ratio, lower_ok, upper_ok) = if phi.is_zero() {
            let ok = u.abs() <= slack;
            (None, ok, ok)
        } else {
            let lower = bound.clone().unwrap_or_else(Rational::zero) * &phi;
            let lower_ok = bound.is_none() || &u + &slack >= lower;
            (Some(&u / &phi), lower_ok, u <= &phi + &slack)
        };
        entries.push(FairnessEntry {
            agent: b.agent.clone(),
            phi,
            expected_utility: u,
            utility_std_error: b.utility_std_error,
            ratio,
            lower_ok,
            upper_ok,
        });
    }
    let epsilon_min = entries.iter().filter_map(|e| e.ratio.clone()).min();
    let positive = |e: &&FairnessEntry| !e.is_null_player();
    Ok(FairnessReport {
        mechanism,
        mode: expected.mode,
        lower_pass: entries.iter().filter(positive).all(|e| e.lower_ok),
        upper_pass: entries.iter().filter(positive).all(|e| e.upper_ok),
        null_pass: entries.iter().filter(|e| e.is_null_player()).all(|e| e.lower_ok),
        entries,
        epsilon_min,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::{int, ratio};

    #[test]
    fn chain3_is_tight() {
        let r = sf_audit(&fixtures::chain3(), Mechanism::Pda, EvalMode::Exact).unwrap();
        assert_eq!(r.get(&AgentId::buyer("A")).unwrap().ratio, Some(int(1)));
        assert_eq!(r.get(&AgentId::buyer("B")).unwrap().ratio, Some(ratio(1, 2)));
        assert_eq!(r.epsilon_min, Some(ratio(1, 2)));
        assert_eq!(r.bound, Some(ratio(1, 2)));
        assert!(r.pass());
    }

    #[test]
    fn single_gets_full_share() {
        let r = sf_audit(&fixtures::single(), Mechanism::Pda, EvalMode::Exact).unwrap();
        assert_eq!(r.epsilon_min, Some(int(1)));
        assert!(r.pass());
    }

    #[test]
    fn vcg_overpays_the_connector() {
        let r = sf_audit(&fixtures::chain3(), Mechanism::Vcg, EvalMode::Exact).unwrap();
        let a = r.get(&AgentId::buyer("A")).unwrap();
        assert_eq!(a.expected_utility, int(10));
        assert_eq!(a.phi, ratio(7, 2));
        assert!(!a.upper_ok);
        assert!(!r.pass());
        assert_eq!(r.bound, None);
    }

    #[test]
    fn sampled_mode_allows_noise() {
        let r = sf_audit(
            &fixtures::fig2(),
            Mechanism::Pda,
            EvalMode::Sampled { samples: 4000, seed: 1 },
        )
        .unwrap();
        assert!(r.pass(), "{r:?}");
    }

    #[test]
    fn cpda_bound_is_one_over_n() {
        let r = sf_audit(&fixtures::two_items_split(), Mechanism::Cpda, EvalMode::Exact).unwrap();
        assert_eq!(r.bound, Some(ratio(1, 2)));
        assert!(r.pass());
    }
}
