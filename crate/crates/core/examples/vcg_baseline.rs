//! VCG against PDA on a three-agent chain: VCG hands the connector far
//! more than her Shapley contribution, PDA stays inside the bounds.
//!
//!     cargo run --example vcg_baseline

use diffusion_auction::analysis::sf_audit;
use diffusion_auction::fixtures;
use diffusion_auction::mechanism::{EvalMode, Mechanism};
use diffusion_auction::rational::format;

fn main() -> diffusion_auction::Result<()> {
    let instance = fixtures::chain3();
    for mechanism in [Mechanism::Vcg, Mechanism::Pda] {
        let r = sf_audit(&instance, mechanism, EvalMode::Exact)?;
        println!("{mechanism}:");
        for e in &r.entries {
            println!(
                "  {}: utility {:>5}  phi {:>4}  within [bound, 1]: {}",
                e.agent,
                format(&e.expected_utility),
                format(&e.phi),
                e.lower_ok && e.upper_ok
            );
        }
        println!("  Shapley fair: {}", r.pass());
    }
    Ok(())
}
