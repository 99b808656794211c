use serde_json::{json, Map, Value};

use crate::model::{Holding, Items};
use crate::rational::to_json;

use super::{EvalMode, ExpectedOutcome, Outcome};

/// Units as a number, bundles as a bitstring over the item order.
pub fn holding_json(holding: Holding, items: &Items) -> Value {
    match (holding, items) {
        (Holding::Units(q), _) => json!(q),
        (Holding::Bundle(b), Items::Combinatorial { names }) => json!(b.to_bits(names.len())),
        (Holding::Bundle(b), _) => json!(b.0),
    }
}

pub(crate) fn mode_json(mode: EvalMode) -> Value {
    match mode {
        EvalMode::Exact => json!("exact"),
        EvalMode::Deterministic => json!("deterministic"),
        EvalMode::Sampled { samples, seed } => json!({ "samples": samples, "seed": seed }),
    }
}

impl Outcome {
    pub fn to_json(&self, items: &Items) -> Value {
        let allocation: Map<String, Value> = self
            .allocation
            .holdings()
            .iter()
            .map(|(a, h)| (a.to_string(), holding_json(*h, items)))
            .collect();
        let payments: Map<String, Value> =
            self.payments.iter().map(|(a, p)| (a.to_string(), to_json(p))).collect();
        json!({
            "order": self.order.as_ref().map(|o| o.to_string()),
            "allocation": allocation,
            "payments": payments,
            "revenue": to_json(&self.revenue()),
            "sold": self.sold(),
        })
    }
}

impl ExpectedOutcome {
    pub fn to_json(&self, items: &Items) -> Value {
        let buyers: Vec<Value> = self
            .buyers
            .iter()
            .map(|b| {
                let lottery: Vec<Value> = b
                    .lottery
                    .iter()
                    .map(|(h, p)| json!({ "holding": holding_json(*h, items), "probability": to_json(p) }))
                    .collect();
                json!({
                    "agent": b.agent.to_string(),
                    "payment": to_json(&b.payment),
                    "utility": to_json(&b.utility),
                    "payment_std_error": b.payment_std_error,
                    "utility_std_error": b.utility_std_error,
                    "lottery": lottery,
                })
            })
            .collect();
        json!({
            "mechanism": self.mechanism.to_string(),
            "mode": mode_json(self.mode),
            "buyers": buyers,
            "revenue": to_json(&self.revenue),
            "revenue_std_error": self.revenue_std_error,
            "unsold_rate": to_json(&self.unsold_rate),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::mechanism::{pda_expected_exact, run_order};
    use crate::model::Order;

    #[test]
    fn outcome_json() {
        let p = fixtures::chain3().truthful_profile().unwrap();
        let o = run_order(&p, &Order::parse("A,s,B").unwrap()).unwrap();
        let v = o.to_json(p.items());
        assert_eq!(v["allocation"]["B"], json!(1));
        assert_eq!(v["payments"]["B"], json!(1));
        assert_eq!(v["order"], json!("A,s,B"));
    }

    #[test]
    fn expected_json_uses_fractions() {
        let p = fixtures::chain3().truthful_profile().unwrap();
        let v = pda_expected_exact(&p).unwrap().to_json(p.items());
        assert_eq!(v["revenue"], json!("-19/6"));
        assert_eq!(v["unsold_rate"], json!("2/3"));
    }

    #[test]
    fn bundles_are_bitstrings() {
        let p = fixtures::two_items_split().truthful_profile().unwrap();
        let o = run_order(&p, &Order::parse("s,P,Q").unwrap()).unwrap();
        let v = o.to_json(p.items());
        assert_eq!(v["allocation"]["P"], json!("10"));
        assert_eq!(v["allocation"]["Q"], json!("01"));
    }
}
