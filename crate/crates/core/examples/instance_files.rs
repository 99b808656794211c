//! Building an instance by hand, writing it as JSON, reading it back, and
//! generating random ones.
//!
//!     cargo run --example instance_files

use diffusion_auction::harness::{gen_instance, instance_to_json, load_instance, save_instance, ExperimentConfig};
use diffusion_auction::model::{AgentId, AuctionInstance, HomogeneousValuation, Items, Valuation};

fn main() -> diffusion_auction::Result<()> {
    let units = |m: &[i64]| Valuation::Homogeneous(HomogeneousValuation::from_integers(m));
    let (a, b) = (AgentId::buyer("alice"), AgentId::buyer("bob"));
    let instance = AuctionInstance::from_edges(
        Items::Homogeneous { k: 2 },
        [(a.clone(), units(&[9, 4])), (b.clone(), units(&[7, 7]))],
        &[(AgentId::Seller, a.clone()), (a, b)],
    )
    .validated()?;

    let path = std::env::temp_dir().join("pda-example-instance.json");
    save_instance(&instance, &path)?;
    println!("{}", std::fs::read_to_string(&path)?);
    assert_eq!(load_instance(&path)?, instance);

    let config = ExperimentConfig { n: 4, k: 2, p: 0.5, seed: 42, ..ExperimentConfig::default() };
    let generated = gen_instance(&config, 7)?;
    println!("{}", serde_json::to_string(&instance_to_json(&generated)).unwrap());
    Ok(())
}
