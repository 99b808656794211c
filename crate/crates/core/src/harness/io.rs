use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::model::{
    AgentId, AuctionInstance, Bundle, BuyerType, CombinatorialValuation, HomogeneousValuation, Items,
    Valuation,
};
use crate::rational::{self, Rational};
use crate::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Homogeneous,
    Combinatorial,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    items: Option<Vec<String>>,
    seller_neighbors: Vec<String>,
    buyers: Vec<BuyerFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BuyerFile {
    id: String,
    neighbors: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    marginals: Option<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bundles: Option<BTreeMap<String, Value>>,
}

/// Reads and validates an instance file.
pub fn load_instance(path: impl AsRef<Path>) -> Result<AuctionInstance> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Writes an instance file (pretty-printed, trailing newline).
pub fn save_instance(instance: &AuctionInstance, path: impl AsRef<Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&instance_to_json(instance))
        .map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Parses and validates instance JSON. Syntax errors carry line, column
/// and field path.
pub fn parse_instance(text: &str) -> Result<AuctionInstance> {
    let mut de = serde_json::Deserializer::from_str(text);
    let file: InstanceFile = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Parse(format!("line {} column {} at `{path}`: {inner}", inner.line(), inner.column()))
    })?;
    de.end().map_err(|e| Error::Parse(e.to_string()))?;
    from_file(file)?.validated()
}

pub fn instance_from_json(value: &Value) -> Result<AuctionInstance> {
    let file: InstanceFile = serde_path_to_error::deserialize(value)
        .map_err(|e| Error::Parse(format!("at `{}`: {}", e.path(), e.inner())))?;
    from_file(file)?.validated()
}

fn agent(id: &str) -> Result<AgentId> {
    id.parse().map_err(|_| Error::Parse(format!("bad agent id {id:?}")))
}

fn from_file(file: InstanceFile) -> Result<AuctionInstance> {
    let items = match (&file.kind, file.k, &file.items) {
        (Kind::Homogeneous, Some(k), None) => Items::Homogeneous { k },
        (Kind::Combinatorial, None, Some(names)) => Items::Combinatorial { names: names.clone() },
        (Kind::Homogeneous, _, _) => {
            return Err(Error::Parse("homogeneous instances need \"k\" and no \"items\"".into()))
        }
        (Kind::Combinatorial, _, _) => {
            return Err(Error::Parse("combinatorial instances need \"items\" and no \"k\"".into()))
        }
    };
    let seller_neighbors = file.seller_neighbors.iter().map(|s| agent(s)).collect::<Result<_>>()?;
    let mut buyers = BTreeMap::new();
    for (index, b) in file.buyers.into_iter().enumerate() {
        let context = |msg: String| Error::Parse(format!("buyers[{index}] ({}): {msg}", b.id));
        let id = agent(&b.id)?;
        if id.is_seller() {
            return Err(context("the seller cannot be a buyer".into()));
        }
        let valuation = match (&items, b.marginals, b.bundles) {
            (Items::Homogeneous { .. }, Some(m), None) => Valuation::Homogeneous(HomogeneousValuation::new(
                m.iter().map(rational::from_json).collect::<Result<_>>().map_err(|e| context(e.to_string()))?,
            )),
            (Items::Combinatorial { names }, None, Some(table)) => {
                let mut values = BTreeMap::new();
                for (bits, v) in &table {
                    let bundle = Bundle::from_bits(bits, names.len()).map_err(|e| context(e.to_string()))?;
                    let v: Rational = rational::from_json(v).map_err(|e| context(e.to_string()))?;
                    values.insert(bundle, v);
                }
                Valuation::Combinatorial(CombinatorialValuation::new(names.len(), values))
            }
            (Items::Homogeneous { .. }, _, _) => return Err(context("expected \"marginals\" only".into())),
            (Items::Combinatorial { .. }, _, _) => return Err(context("expected \"bundles\" only".into())),
        };
        let neighbors = b.neighbors.iter().map(|s| agent(s)).collect::<Result<Vec<_>>>()?;
        if buyers.insert(id, BuyerType::new(valuation, neighbors)).is_some() {
            return Err(context("duplicate buyer id".into()));
        }
    }
    Ok(AuctionInstance { items, seller_neighbors, buyers })
}

pub fn instance_to_json(instance: &AuctionInstance) -> Value {
    let (kind, k, names) = match &instance.items {
        Items::Homogeneous { k } => (Kind::Homogeneous, Some(*k), None),
        Items::Combinatorial { names } => (Kind::Combinatorial, None, Some(names.clone())),
    };
    let buyers = instance
        .buyers
        .iter()
        .map(|(id, t)| {
            let (marginals, bundles) = match &t.valuation {
                Valuation::Homogeneous(v) => (Some(v.marginals().iter().map(rational::to_json).collect()), None),
                Valuation::Combinatorial(v) => (
                    None,
                    Some(
                        v.entries()
                            .iter()
                            .map(|(b, x)| (b.to_bits(v.items()), rational::to_json(x)))
                            .collect(),
                    ),
                ),
            };
            BuyerFile {
                id: id.to_string(),
                neighbors: t.neighbors.iter().map(|a| a.to_string()).collect(),
                marginals,
                bundles,
            }
        })
        .collect();
    let file = InstanceFile {
        kind,
        k,
        items: names,
        seller_neighbors: instance.seller_neighbors.iter().map(|a| a.to_string()).collect(),
        buyers,
    };
    serde_json::to_value(file).expect("instance serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn round_trips() {
        let dir = tempfile::tempdir().unwrap();
        for inst in [fixtures::chain3(), fixtures::fig2(), fixtures::two_items_split(), fixtures::pair_lover()] {
            let path = dir.path().join("i.json");
            save_instance(&inst, &path).unwrap();
            assert_eq!(load_instance(&path).unwrap(), inst);
        }
    }

    #[test]
    fn chain3_text() {
        let text = r#"{"kind":"homogeneous","k":1,"seller_neighbors":["A"],
            "buyers":[{"id":"A","neighbors":["s","B"],"marginals":[1]},
                      {"id":"B","neighbors":["A"],"marginals":["10"]}]}"#;
        assert_eq!(parse_instance(text).unwrap(), fixtures::chain3());
    }

    #[test]
    fn increasing_marginals_are_rejected() {
        let text = r#"{"kind":"homogeneous","k":2,"seller_neighbors":["A"],
            "buyers":[{"id":"A","neighbors":["s"],"marginals":[3,5]}]}"#;
        assert!(matches!(parse_instance(text), Err(Error::InvalidInstance(_))));
    }

    #[test]
    fn bundle_key_length_is_checked() {
        let text = r#"{"kind":"combinatorial","items":["x","y"],"seller_neighbors":["P"],
            "buyers":[{"id":"P","neighbors":["s"],"bundles":{"100":5}}]}"#;
        assert!(matches!(parse_instance(text), Err(Error::Parse(_))));
    }

    #[test]
    fn unknown_fields_are_rejected_with_context() {
        let text = r#"{"kind":"homogeneous","k":1,"seller_neighbors":[],
            "buyers":[{"id":"A","neighbors":[],"marginals":[1],"colour":"red"}]}"#;
        let Err(Error::Parse(msg)) = parse_instance(text) else { panic!("expected a parse error") };
        assert!(msg.contains("buyers[0]") && msg.contains("line"), "{msg}");
    }

    #[test]
    fn fractions_are_strings() {
        let text = r#"{"kind":"homogeneous","k":1,"seller_neighbors":["A"],
            "buyers":[{"id":"A","neighbors":["s"],"marginals":["7/2"]}]}"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(instance_to_json(&inst)["buyers"][0]["marginals"][0], "7/2");
        let bad = text.replace("\"7/2\"", "3.5");
        assert!(parse_instance(&bad).is_err());
    }
}
