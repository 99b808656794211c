use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::mechanism::{EvalMode, Mechanism};
use crate::model::AuctionInstance;
use crate::rational::to_json;
use crate::{Error, Result};

use super::{ic_audit, ir_audit, revenue_audit, sf_audit, unsold_rate_audit, DeviationGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CheckKind {
    Sf,
    Ic,
    Ir,
    Unsold,
    Revenue,
}

impl CheckKind {
    pub const ALL: [CheckKind; 5] =
        [CheckKind::Sf, CheckKind::Ic, CheckKind::Ir, CheckKind::Unsold, CheckKind::Revenue];

    /// Parses a comma-separated list such as `sf,ic,ir`.
    pub fn parse_list(text: &str) -> Result<Vec<CheckKind>> {
        text.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect()
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckKind::Sf => "sf",
            CheckKind::Ic => "ic",
            CheckKind::Ir => "ir",
            CheckKind::Unsold => "unsold",
            CheckKind::Revenue => "revenue",
        })
    }
}

impl FromStr for CheckKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<CheckKind> {
        CheckKind::ALL
            .into_iter()
            .find(|c| c.to_string() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Parse(format!("unknown check {s:?} (expected sf, ic, ir, unsold, revenue)")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub details: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub instance: String,
    pub mechanism: String,
    pub checks: Vec<Check>,
}

impl AuditReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Runs the requested checks against the truthful profile of `instance`.
/// `mode` applies to the fairness and IR checks; the others are always
/// exact.
pub fn run_audit(
    instance: &AuctionInstance,
    label: &str,
    mechanism: Mechanism,
    checks: &[CheckKind],
    mode: EvalMode,
) -> Result<AuditReport> {
    let mut out = Vec::with_capacity(checks.len());
    for &kind in checks {
        let (pass, details) = match kind {
            CheckKind::Sf => {
                let r = sf_audit(instance, mechanism, mode)?;
                let buyers: Vec<Value> = r
                    .entries
                    .iter()
                    .map(|e| {
                        json!({
                            "agent": e.agent.to_string(),
                            "phi": to_json(&e.phi),
                            "expected_utility": to_json(&e.expected_utility),
                            "std_error": e.utility_std_error,
                            "ratio": e.ratio.as_ref().map_or(json!("null-player"), to_json),
                            "lower_ok": e.lower_ok,
                            "upper_ok": e.upper_ok,
                        })
                    })
                    .collect();
                let details = json!({
                    "bound": r.bound.as_ref().map(to_json),
                    "epsilon_min": r.epsilon_min.as_ref().map(to_json),
                    "lower_pass": r.lower_pass,
                    "upper_pass": r.upper_pass,
                    "null_pass": r.null_pass,
                    "buyers": buyers,
                });
                (r.pass(), details)
            }
            CheckKind::Ic => {
                let findings = ic_audit(instance, mechanism, &DeviationGrid::default())?;
                let list: Vec<Value> = findings
                    .iter()
                    .map(|f| {
                        json!({
                            "buyer": f.buyer.to_string(),
                            "deviation": f.deviation.to_string(),
                            "truthful_utility": to_json(&f.truthful_utility),
                            "deviant_utility": to_json(&f.deviant_utility),
                            "gain": to_json(&f.gain),
                        })
                    })
                    .collect();
                (findings.is_empty(), json!({ "findings": list }))
            }
            CheckKind::Ir => {
                let violations = ir_audit(instance, mechanism, mode)?;
                let list: Vec<Value> = violations
                    .iter()
                    .map(|v| {
                        json!({
                            "order": v.order.as_ref().map(|o| o.to_string()),
                            "orders": v.orders,
                            "buyer": v.buyer.to_string(),
                            "utility": to_json(&v.utility),
                        })
                    })
                    .collect();
                (violations.is_empty(), json!({ "violations": list }))
            }
            CheckKind::Unsold => {
                require(mechanism, Mechanism::Pda, kind)?;
                let r = unsold_rate_audit(instance)?;
                (r.pass, json!({ "mu": to_json(&r.mu), "bound": to_json(&r.bound) }))
            }
            CheckKind::Revenue => {
                if mechanism == Mechanism::Vcg {
                    return Err(Error::Unsupported("the revenue identity concerns PDA/CPDA".into()));
                }
                let r = revenue_audit(instance)?;
                let details = json!({
                    "revenue": to_json(&r.revenue),
                    "seller_phi": to_json(&r.seller_phi),
                    "expected_loss": to_json(&r.expected_loss),
                });
                (r.holds, details)
            }
        };
        out.push(Check { name: kind.to_string(), pass, details });
    }
    Ok(AuditReport { instance: label.to_string(), mechanism: mechanism.to_string(), checks: out })
}

fn require(mechanism: Mechanism, wanted: Mechanism, kind: CheckKind) -> Result<()> {
    if mechanism == wanted {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("check {kind} applies to {wanted} only")))
    }
}
