//! Executable checks of the mechanism's guarantees: Shapley-fairness
//! ratios, incentive-compatibility deviation scans, per-order individual
//! rationality, the unsold-rate bound and the revenue identity.

mod deviations;
mod fairness;
mod report;
mod scans;

pub use deviations::{deviations_for, ic_audit, Deviation, DeviationFinding, DeviationGrid};
pub use fairness::{sf_audit, FairnessEntry, FairnessReport, SF_SIGMAS};
pub use report::{run_audit, AuditReport, Check, CheckKind};
pub use scans::{ir_audit, revenue_audit, unsold_rate_audit, IrViolation, RevenueReport, UnsoldReport};
