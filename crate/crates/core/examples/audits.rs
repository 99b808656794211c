//! The full audit battery as a JSON report, plus a look inside the
//! incentive-compatibility scan.
//!
//!     cargo run --example audits

use diffusion_auction::analysis::{deviations_for, ic_audit, run_audit, CheckKind, DeviationGrid};
use diffusion_auction::fixtures;
use diffusion_auction::mechanism::{EvalMode, Mechanism};
use diffusion_auction::model::AgentId;

fn main() -> diffusion_auction::Result<()> {
    let instance = fixtures::clique_two_buyers_three_units();
    let report = run_audit(&instance, "clique", Mechanism::Pda, &CheckKind::ALL, EvalMode::Exact)?;
    println!("{}", serde_json::to_string_pretty(&report.to_json()).unwrap());

    let grid = DeviationGrid::default();
    let tried = deviations_for(&instance, &AgentId::buyer("A"), &grid)?;
    println!("\nA could misreport in {} ways on the grid, e.g.", tried.len());
    for d in tried.iter().take(4) {
        println!("  {d}");
    }
    let findings = ic_audit(&instance, Mechanism::Pda, &grid)?;
    println!("profitable misreports found: {}", findings.len());
    Ok(())
}
