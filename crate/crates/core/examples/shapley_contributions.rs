//! Exact Shapley contributions next to a seeded Monte Carlo estimate.
//!
//!     cargo run --release --example shapley_contributions

use diffusion_auction::fixtures;
use diffusion_auction::rational::format;
use diffusion_auction::shapley::{shapley_exact, shapley_sampled};

fn main() -> diffusion_auction::Result<()> {
    let profile = fixtures::fig2().truthful_profile()?;
    let exact = shapley_exact(&profile)?;
    let sampled = shapley_sampled(&profile, 20_000, 7)?;

    println!("max welfare {}", format(&exact.total_welfare));
    println!("{:>5} {:>10} {:>9} {:>7}", "agent", "exact", "sampled", "s.e.");
    for (e, s) in exact.entries.iter().zip(&sampled.entries) {
        println!(
            "{:>5} {:>10} {:>9.4} {:>7.4}",
            e.agent,
            format(&e.value),
            s.estimate(),
            s.std_error.unwrap_or(0.0)
        );
    }
    println!("sum of contributions {}", format(&exact.sum()));
    Ok(())
}
