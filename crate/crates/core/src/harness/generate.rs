use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mechanism::{EvalMode, Mechanism};
use crate::model::{
    AgentId, AuctionInstance, Bundle, CombinatorialValuation, HomogeneousValuation, Items, Valuation,
    MAX_AGENTS, MAX_ITEMS,
};
use crate::rational;
use crate::{Error, Result};

/// Random-network experiment: `count` Erdős–Rényi networks over the seller
/// and `n` buyers, each pair linked with probability `p`, integer values
/// drawn uniformly from `lo..=hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub count: usize,
    pub n: usize,
    pub p: f64,
    pub lo: i64,
    pub hi: i64,
    /// Units on sale (homogeneous).
    pub k: u32,
    /// Distinct items on sale instead of `k` units (combinatorial).
    pub items: Option<usize>,
    pub seed: u64,
    pub mode: EvalMode,
}

impl Default for ExperimentConfig {
    fn default() -> ExperimentConfig {
        ExperimentConfig {
            count: 1000,
            n: 6,
            p: 0.3,
            lo: 1,
            hi: 100,
            k: 1,
            items: None,
            seed: 0,
            mode: EvalMode::Exact,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(0.0..=1.0).contains(&self.p) {
            problems.push(format!("edge probability {} outside [0, 1]", self.p));
        }
        if self.lo > self.hi {
            problems.push(format!("empty value range [{}, {}]", self.lo, self.hi));
        }
        if self.lo < 0 {
            problems.push("values must be non-negative".to_string());
        }
        if self.n == 0 || self.n >= MAX_AGENTS {
            problems.push(format!("buyer count must be in 1..{MAX_AGENTS}"));
        }
        match self.items {
            None if self.k == 0 => problems.push("k must be positive".to_string()),
            Some(m) if m == 0 || m > MAX_ITEMS => problems.push(format!("item count must be in 1..={MAX_ITEMS}")),
            _ => {}
        }
        if matches!(self.mode, EvalMode::Deterministic) {
            problems.push("experiments evaluate PDA/CPDA exactly or by sampling".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInstance(problems))
        }
    }

    pub fn mechanism(&self) -> Mechanism {
        if self.items.is_some() {
            Mechanism::Cpda
        } else {
            Mechanism::Pda
        }
    }

    /// Units for PDA, items for CPDA.
    pub fn budget(&self) -> u32 {
        self.items.map_or(self.k, |m| m as u32)
    }
}

/// Instance `index` of the experiment; depends only on `(seed, index)` and
/// the shape parameters.
pub fn gen_instance(config: &ExperimentConfig, index: u64) -> Result<AuctionInstance> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index);

    let width = config.n.to_string().len();
    let buyers: Vec<AgentId> = (1..=config.n).map(|i| AgentId::buyer(format!("b{i:0width$}"))).collect();
    let agents: Vec<AgentId> = std::iter::once(AgentId::Seller).chain(buyers.iter().cloned()).collect();
    let mut edges = Vec::new();
    for a in 0..agents.len() {
        for b in a + 1..agents.len() {
            if rng.gen_bool(config.p) {
                edges.push((agents[a].clone(), agents[b].clone()));
            }
        }
    }

    let (items, valuations): (Items, Vec<(AgentId, Valuation)>) = match config.items {
        None => {
            let items = Items::Homogeneous { k: config.k };
            let vals = buyers
                .iter()
                .map(|b| {
                    let mut m: Vec<i64> = (0..config.k).map(|_| rng.gen_range(config.lo..=config.hi)).collect();
                    m.sort_unstable_by(|x, y| y.cmp(x));
                    (b.clone(), Valuation::Homogeneous(HomogeneousValuation::from_integers(&m)))
                })
                .collect();
            (items, vals)
        }
        Some(m) => {
            let names: Vec<String> = (1..=m).map(|j| format!("x{j}")).collect();
            let vals = buyers
                .iter()
                .map(|b| {
                    let table: BTreeMap<Bundle, _> = (1..1u32 << m)
                        .map(|bits| (Bundle(bits), rational::int(rng.gen_range(config.lo..=config.hi))))
                        .collect();
                    (b.clone(), Valuation::Combinatorial(CombinatorialValuation::new(m, table)))
                })
                .collect();
            (Items::Combinatorial { names }, vals)
        }
    };
    AuctionInstance::from_edges(items, valuations, &edges).validated()
}
