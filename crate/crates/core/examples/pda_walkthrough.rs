//! Steps through one PDA run on an 11-agent network, printing every
//! buyer's allocation and payment as the join order is traversed.
//!
//!     cargo run --example pda_walkthrough

use diffusion_auction::fixtures;
use diffusion_auction::mechanism::pda_run_order;
use diffusion_auction::model::{AgentId, Order};
use diffusion_auction::rational::format;

fn main() -> diffusion_auction::Result<()> {
    let instance = fixtures::fig2();
    let profile = instance.truthful_profile()?;

    for next in ["G", "H"] {
        let mut agents = fixtures::fig2_prefix();
        agents.push(AgentId::buyer(next));
        agents.extend(profile.agents().iter().filter(|a| !agents.contains(a)).cloned().collect::<Vec<_>>());
        let order = Order::new(agents);
        let outcome = pda_run_order(&profile, &order)?;

        println!("order {order}");
        for agent in order.agents().iter().filter(|a| !a.is_seller()) {
            println!(
                "  {agent:>2}: holds {} pays {:>3}",
                outcome.allocation.get(agent),
                format(&outcome.payment(agent))
            );
        }
        println!("  sold {} unit(s), revenue {}\n", outcome.sold(), format(&outcome.revenue()));
    }
    Ok(())
}
