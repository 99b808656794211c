//! Random-network experiment: expected PDA utility against Shapley
//! contribution for every buyer, written as CSV.
//!
//!     cargo run --release --example fairness_experiment -- [k] [count]

use diffusion_auction::harness::{run_experiment, write_csv, ExperimentConfig};
use diffusion_auction::rational::format;

fn main() -> diffusion_auction::Result<()> {
    let mut args = std::env::args().skip(1);
    let k = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);
    let count = args.next().and_then(|a| a.parse().ok()).unwrap_or(100);
    let config = ExperimentConfig { k, count, seed: 2024, ..ExperimentConfig::default() };

    let result = run_experiment(&config)?;
    let path = std::env::temp_dir().join(format!("pda-fairness-k{k}.csv"));
    write_csv(&result.rows, std::fs::File::create(&path)?)?;

    let s = &result.summary;
    let show = |r: &Option<_>| r.as_ref().map_or("-".to_string(), format);
    println!("{} instances, {} buyers", s.instances, s.rows);
    println!("ratio E[u]/phi in [{}, {}]", show(&s.min_ratio), show(&s.max_ratio));
    println!("all ratios above 2/5: {}", s.all_above_two_fifths);
    println!("bound failures: {}", s.fairness_failures + s.unsold_failures + s.revenue_failures);
    println!("rows written to {}", path.display());
    Ok(())
}
