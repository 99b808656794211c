use std::io::Write;

use num::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{revenue_audit, sf_audit, unsold_rate_audit};
use crate::mechanism::{EvalMode, Mechanism};
use crate::rational::{self, Rational};
use crate::{Error, Result};

use super::generate::{gen_instance, ExperimentConfig};

pub const CSV_HEADER: [&str; 11] =
    ["instance", "seed", "agent", "phi", "phi_exact", "eu", "eu_exact", "ratio", "k", "bound", "pass"];

/// One buyer of one generated instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub instance: u64,
    pub seed: u64,
    pub agent: String,
    pub phi: f64,
    pub phi_exact: String,
    pub eu: f64,
    pub eu_exact: String,
    /// Blank for null players.
    pub ratio: Option<f64>,
    pub k: u32,
    pub bound: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSummary {
    pub instances: usize,
    pub rows: usize,
    pub min_ratio: Option<Rational>,
    pub max_ratio: Option<Rational>,
    /// Rows breaking the fairness bounds.
    pub fairness_failures: usize,
    /// Instances with `mu < 1/(k+1)` (PDA, exact mode).
    pub unsold_failures: usize,
    /// Instances where the revenue identity fails (exact mode).
    pub revenue_failures: usize,
    /// Instances that could not be evaluated, with the reason.
    pub errors: Vec<(u64, String)>,
    /// Whether every ratio exceeds 2/5.
    pub all_above_two_fifths: bool,
}

impl ExperimentSummary {
    pub fn pass(&self) -> bool {
        self.fairness_failures == 0 && self.unsold_failures == 0 && self.revenue_failures == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub rows: Vec<ExperimentRow>,
    pub summary: ExperimentSummary,
}

struct InstanceResult {
    rows: Vec<ExperimentRow>,
    ratios: Vec<Rational>,
    unsold_ok: bool,
    revenue_ok: bool,
}

/// Generates and audits every instance. Instances run in parallel; rows
/// come back in instance order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let results: Vec<(u64, Result<InstanceResult>)> = (0..config.count as u64)
        .into_par_iter()
        .map(|index| (index, audit_instance(config, index)))
        .collect();

    let mut rows = Vec::new();
    let mut ratios: Vec<Rational> = Vec::new();
    let mut summary = ExperimentSummary {
        instances: config.count,
        rows: 0,
        min_ratio: None,
        max_ratio: None,
        fairness_failures: 0,
        unsold_failures: 0,
        revenue_failures: 0,
        errors: Vec::new(),
        all_above_two_fifths: true,
    };
    for (index, result) in results {
        match result {
            Ok(r) => {
                summary.fairness_failures += r.rows.iter().filter(|row| !row.pass).count();
                summary.unsold_failures += !r.unsold_ok as usize;
                summary.revenue_failures += !r.revenue_ok as usize;
                ratios.extend(r.ratios);
                rows.extend(r.rows);
            }
            Err(e) => summary.errors.push((index, e.to_string())),
        }
    }
    summary.rows = rows.len();
    summary.min_ratio = ratios.iter().min().cloned();
    summary.max_ratio = ratios.iter().max().cloned();
    summary.all_above_two_fifths = ratios.iter().all(|r| *r > rational::ratio(2, 5));
    Ok(ExperimentResult { rows, summary })
}

fn audit_instance(config: &ExperimentConfig, index: u64) -> Result<InstanceResult> {
    let instance = gen_instance(config, index)?;
    let mechanism = config.mechanism();
    let mode = match config.mode {
        EvalMode::Sampled { samples, seed } => EvalMode::Sampled { samples, seed: seed.wrapping_add(index) },
        other => other,
    };
    let fairness = sf_audit(&instance, mechanism, mode)?;
    let bound = fairness.bound.clone().unwrap_or_else(Rational::zero);
    let rows = fairness
        .entries
        .iter()
        .map(|e| ExperimentRow {
            instance: index,
            seed: config.seed,
            agent: e.agent.to_string(),
            phi: rational::to_f64(&e.phi),
            phi_exact: rational::format(&e.phi),
            eu: rational::to_f64(&e.expected_utility),
            eu_exact: rational::format(&e.expected_utility),
            ratio: e.ratio.as_ref().map(rational::to_f64),
            k: config.budget(),
            bound: rational::format(&bound),
            pass: e.lower_ok && e.upper_ok,
        })
        .collect();
    let ratios = fairness.entries.iter().filter_map(|e| e.ratio.clone()).collect();
    let exact = config.mode == EvalMode::Exact;
    let unsold_ok = !(exact && mechanism == Mechanism::Pda) || unsold_rate_audit(&instance)?.pass;
    let revenue_ok = !exact || revenue_audit(&instance)?.holds;
    Ok(InstanceResult { rows, ratios, unsold_ok, revenue_ok })
}

/// Writes the rows as CSV with [`CSV_HEADER`].
pub fn write_csv<W: Write>(rows: &[ExperimentRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row).map_err(|e| Error::Parse(e.to_string()))?;
    }
    if rows.is_empty() {
        writer.write_record(CSV_HEADER).map_err(|e| Error::Parse(e.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}
