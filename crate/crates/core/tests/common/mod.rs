#![allow(dead_code)]

use diffusion_auction::harness::{gen_instance, ExperimentConfig};
use diffusion_auction::mechanism::EvalMode;
use diffusion_auction::model::{
    feasible_set, AgentId, AuctionInstance, Bundle, Coalition, Holding, Items, ReportedProfile,
};
use diffusion_auction::welfare::Allocation;
use rand::seq::SliceRandom;
use rand::Rng;

/// Small random homogeneous instance.
pub fn homogeneous(seed: u64, index: u64, n: usize, k: u32, p: f64, hi: i64) -> AuctionInstance {
    let config = ExperimentConfig { n, k, p, lo: 0, hi, seed, count: 1, items: None, mode: EvalMode::Exact };
    gen_instance(&config, index).expect("valid config")
}

/// Small random combinatorial instance.
pub fn combinatorial(seed: u64, index: u64, n: usize, items: usize, p: f64, hi: i64) -> AuctionInstance {
    let config =
        ExperimentConfig { n, k: 1, p, lo: 0, hi, seed, count: 1, items: Some(items), mode: EvalMode::Exact };
    gen_instance(&config, index).expect("valid config")
}

pub fn random_coalition(profile: &ReportedProfile, rng: &mut impl Rng) -> Coalition {
    let members: Vec<&AgentId> = profile.agents().iter().filter(|_| rng.gen_bool(0.7)).collect();
    profile.coalition(members).expect("known agents")
}

/// Random holdings for buyers feasible in `coalition`, within the budget.
pub fn random_committed(profile: &ReportedProfile, coalition: Coalition, rng: &mut impl Rng) -> Allocation {
    let mut feasible: Vec<AgentId> = profile.members(feasible_set(profile, coalition));
    feasible.retain(|a| !a.is_seller());
    feasible.shuffle(rng);
    let mut allocation = Allocation::empty(profile.items().kind());
    match profile.items() {
        Items::Homogeneous { k } => {
            let mut left = *k;
            for a in feasible {
                if left == 0 || rng.gen_bool(0.5) {
                    continue;
                }
                let q = rng.gen_range(1..=left);
                left -= q;
                allocation.set(a, Holding::Units(q));
            }
        }
        Items::Combinatorial { names } => {
            let mut free: u32 = (1 << names.len()) - 1;
            for a in feasible {
                let bundle = free & rng.gen_range(0..1u32 << names.len());
                if bundle != 0 && rng.gen_bool(0.5) {
                    free &= !bundle;
                    allocation.set(a, Holding::Bundle(Bundle(bundle)));
                }
            }
        }
    }
    allocation
}
