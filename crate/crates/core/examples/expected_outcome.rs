//! Exact expected utilities, payments, lotteries and unsold rate of PDA,
//! averaged over every join order.
//!
//!     cargo run --example expected_outcome

use diffusion_auction::fixtures;
use diffusion_auction::mechanism::{all_orders, pda_expected_exact, run_order};
use diffusion_auction::rational::format;

fn main() -> diffusion_auction::Result<()> {
    let profile = fixtures::chain3().truthful_profile()?;

    for order in all_orders(&profile) {
        let o = run_order(&profile, &order)?;
        let pays: Vec<String> = o.payments.iter().map(|(b, p)| format!("{b} {}", format(p))).collect();
        println!("{order:<8} sold {}  payments: {}", o.sold(), pays.join(", "));
    }

    let e = pda_expected_exact(&profile)?;
    println!();
    for b in &e.buyers {
        let lottery: Vec<String> = b.lottery.iter().map(|(h, p)| format!("{h} w.p. {}", format(p))).collect();
        println!(
            "{}: E[u] = {}, E[p] = {}, holds {}",
            b.agent,
            format(&b.utility),
            format(&b.payment),
            lottery.join(", ")
        );
    }
    println!("E[revenue] = {}, unsold rate = {}", format(&e.revenue), format(&e.unsold_rate));
    Ok(())
}
