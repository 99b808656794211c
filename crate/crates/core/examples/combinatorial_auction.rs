//! CPDA selling two distinct items, with bundle valuations.
//!
//!     cargo run --example combinatorial_auction

use diffusion_auction::analysis::sf_audit;
use diffusion_auction::mechanism::{cpda_run_order, holding_json, EvalMode, Mechanism};
use diffusion_auction::model::{AgentId, AuctionInstance, Bundle, CombinatorialValuation, Items, Order, Valuation};
use diffusion_auction::rational::format;

fn main() -> diffusion_auction::Result<()> {
    let items = Items::Combinatorial { names: vec!["x".into(), "y".into()] };
    let (p, q, r) = (AgentId::buyer("P"), AgentId::buyer("Q"), AgentId::buyer("R"));
    let table = |entries: &[(u32, i64)]| {
        let entries: Vec<(Bundle, i64)> = entries.iter().map(|&(b, v)| (Bundle(b), v)).collect();
        Valuation::Combinatorial(CombinatorialValuation::from_integers(2, &entries))
    };
    // P wants x, Q wants y, R (behind Q) wants the pair.
    let instance = AuctionInstance::from_edges(
        items,
        [
            (p.clone(), table(&[(0b01, 5)])),
            (q.clone(), table(&[(0b10, 4)])),
            (r.clone(), table(&[(0b11, 12), (0b01, 2)])),
        ],
        &[(AgentId::Seller, p), (AgentId::Seller, q.clone()), (q, r)],
    )
    .validated()?;
    let profile = instance.truthful_profile()?;

    for text in ["s,P,Q,R", "s,R,Q,P", "Q,R,s,P"] {
        let outcome = cpda_run_order(&profile, &Order::parse(text)?)?;
        let held: Vec<String> = outcome
            .allocation
            .holdings()
            .iter()
            .map(|(a, h)| match holding_json(*h, profile.items()) {
                serde_json::Value::String(bits) => format!("{a} {bits}"),
                other => format!("{a} {other}"),
            })
            .collect();
        println!("{text:<8} allocation [{}] revenue {}", held.join(", "), format(&outcome.revenue()));
    }

    let fairness = sf_audit(&instance, Mechanism::Cpda, EvalMode::Exact)?;
    for e in &fairness.entries {
        let ratio = e.ratio.as_ref().map_or("null player".into(), format);
        println!("{}: phi {} E[u] {} ratio {ratio}", e.agent, format(&e.phi), format(&e.expected_utility));
    }
    println!("guaranteed share {}", fairness.bound.as_ref().map_or("-".into(), format));
    Ok(())
}
