//! Acceptance suite: one PASS/FAIL line per criterion, exact arithmetic
//! wherever the check is exact. Exits nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use diffusion_auction::analysis::{
    ic_audit, ir_audit, revenue_audit, sf_audit, unsold_rate_audit, DeviationGrid,
};
use diffusion_auction::fixtures;
use diffusion_auction::harness::{gen_instance, run_experiment, ExperimentConfig, ExperimentSummary};
use diffusion_auction::mechanism::{all_orders, run_order, vcg, EvalMode, Mechanism};
use diffusion_auction::model::{
    feasible_set, AgentId, AuctionInstance, BuyerType, HomogeneousValuation, Order, Valuation,
};
use diffusion_auction::rational::{format, int, ratio, to_f64, Rational};
use diffusion_auction::shapley::{marginal_contribution, shapley_exact, shapley_sampled};
use diffusion_auction::welfare::{brute_force_welfare, max_welfare};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn err(e: diffusion_auction::Error) -> String {
    e.to_string()
}

fn generated(k: u32, count: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig { count, n: 6, p: 0.3, lo: 1, hi: 100, k, items: None, seed, mode: EvalMode::Exact }
}

fn show(r: &Option<Rational>) -> String {
    r.as_ref().map_or("-".into(), format)
}

fn summary_clean(s: &ExperimentSummary) -> Result<(), String> {
    ensure(s.errors.is_empty(), || format!("{} instances failed to evaluate: {:?}", s.errors.len(), s.errors.first()))
}

// 1
fn sandwich_single_unit(summaries: &mut Vec<(u32, ExperimentSummary)>) -> Verdict {
    let result = run_experiment(&generated(1, 1000, 1)).map_err(err)?;
    let s = result.summary;
    summary_clean(&s)?;
    ensure(s.rows == 6000, || format!("expected 6000 rows, got {}", s.rows))?;
    ensure(s.fairness_failures == 0, || format!("{} buyers outside [1/2, 1] or null players paid", s.fairness_failures))?;
    let nulls = result.rows.iter().filter(|r| r.ratio.is_none()).count();
    let detail = format!(
        "1000 instances, ratios in [{}, {}], {} null players all with E[u]=0",
        show(&s.min_ratio),
        show(&s.max_ratio),
        nulls
    );
    summaries.push((1, s));
    Ok(detail)
}

// 2
fn sandwich_multi_unit(summaries: &mut Vec<(u32, ExperimentSummary)>) -> Verdict {
    let mut parts = Vec::new();
    for k in 2..=5u32 {
        let s = run_experiment(&generated(k, 200, 100 + k as u64)).map_err(err)?.summary;
        summary_clean(&s)?;
        ensure(s.fairness_failures == 0, || format!("k={k}: {} buyers outside [1/{}, 1]", s.fairness_failures, k + 1))?;
        parts.push(format!(
            "k={k} min {} (all > 2/5: {})",
            show(&s.min_ratio),
            s.all_above_two_fifths
        ));
        summaries.push((k, s));
    }
    Ok(parts.join("; "))
}

// 3
fn tightness() -> Verdict {
    let r = sf_audit(&fixtures::chain3(), Mechanism::Pda, EvalMode::Exact).map_err(err)?;
    let b = r.get(&AgentId::buyer("B")).ok_or("no buyer B")?;
    ensure(b.expected_utility == ratio(3, 2) && b.phi == int(3), || {
        format!("E[u_B]={} phi_B={}", format(&b.expected_utility), format(&b.phi))
    })?;
    ensure(b.ratio == Some(ratio(1, 2)), || format!("ratio {:?}", b.ratio))?;
    Ok("chain s-A-B: E[u_B]/phi_B = (3/2)/3 = 1/2".into())
}

fn ic_instances() -> (Vec<AuctionInstance>, Vec<AuctionInstance>) {
    let homogeneous = (0..50u64)
        .map(|i| common::homogeneous(400, i, 2 + (i % 3) as usize, 1 + (i % 2) as u32, 0.5, 8))
        .collect();
    let combinatorial = (0..20u64).map(|i| common::combinatorial(500, i, 2 + (i % 2) as usize, 2, 0.5, 8)).collect();
    (homogeneous, combinatorial)
}

// 4
fn incentive_compatibility() -> Verdict {
    let (homogeneous, combinatorial) = ic_instances();
    let grid = DeviationGrid::default();
    let mut checked = 0usize;
    for (label, mechanism, set) in
        [("PDA", Mechanism::Pda, &homogeneous), ("CPDA", Mechanism::Cpda, &combinatorial)]
    {
        for (i, inst) in set.iter().enumerate() {
            for b in inst.buyers.keys() {
                checked += diffusion_auction::analysis::deviations_for(inst, b, &grid).map_err(err)?.len();
            }
            let findings = ic_audit(inst, mechanism, &grid).map_err(err)?;
            ensure(findings.is_empty(), || {
                let f = &findings[0];
                format!(
                    "{label} instance {i}: {} gains {} by reporting {}",
                    f.buyer,
                    format(&f.gain),
                    f.deviation
                )
            })?;
        }
    }
    Ok(format!("50 PDA + 20 CPDA instances, {checked} deviations, no strict gain"))
}

// 5
fn individual_rationality() -> Verdict {
    let (homogeneous, combinatorial) = ic_instances();
    let mut instances: Vec<(Mechanism, AuctionInstance)> = Vec::new();
    for k in 1..=5u32 {
        let config = if k == 1 { generated(1, 1000, 1) } else { generated(k, 200, 100 + k as u64) };
        for i in 0..config.count as u64 {
            instances.push((Mechanism::Pda, gen_instance(&config, i).map_err(err)?));
        }
    }
    instances.extend(homogeneous.into_iter().map(|i| (Mechanism::Pda, i)));
    instances.extend(combinatorial.into_iter().map(|i| (Mechanism::Cpda, i)));
    for (m, inst) in [
        (Mechanism::Pda, fixtures::single()),
        (Mechanism::Pda, fixtures::chain3()),
        (Mechanism::Pda, fixtures::twins()),
        (Mechanism::Pda, fixtures::clique_two_buyers_three_units()),
        (Mechanism::Cpda, fixtures::two_items_split()),
        (Mechanism::Cpda, fixtures::pair_lover()),
    ] {
        instances.push((m, inst));
    }
    for (i, (mechanism, inst)) in instances.iter().enumerate() {
        let violations = ir_audit(inst, *mechanism, EvalMode::Exact).map_err(err)?;
        ensure(violations.is_empty(), || format!("instance {i}: {:?}", violations[0]))?;
    }
    Ok(format!("{} instances, every order, zero violations", instances.len()))
}

// 6
fn unsold_rate(summaries: &[(u32, ExperimentSummary)]) -> Verdict {
    for (k, s) in summaries {
        ensure(s.unsold_failures == 0, || format!("k={k}: {} instances with mu < 1/{}", s.unsold_failures, k + 1))?;
    }
    let clique = unsold_rate_audit(&fixtures::clique_two_buyers_three_units()).map_err(err)?;
    ensure(clique.mu >= ratio(1, 3) && clique.pass, || format!("clique mu = {}", format(&clique.mu)))?;
    Ok(format!(
        "{} generated instances pass; 2-buyer clique with k=3: mu = {} >= 1/3 >= 1/4",
        summaries.iter().map(|(_, s)| s.instances).sum::<usize>(),
        format(&clique.mu)
    ))
}

// 7
fn revenue_identity(summaries: &[(u32, ExperimentSummary)]) -> Verdict {
    for (k, s) in summaries {
        ensure(s.revenue_failures == 0, || format!("k={k}: identity fails on {} instances", s.revenue_failures))?;
    }
    let (homogeneous, combinatorial) = ic_instances();
    for inst in homogeneous.iter().chain(&combinatorial) {
        let r = revenue_audit(inst).map_err(err)?;
        ensure(r.holds, || format!("identity fails: {r:?}"))?;
    }
    let r = revenue_audit(&fixtures::chain3()).map_err(err)?;
    ensure(
        r.holds && r.revenue == ratio(-19, 6) && r.seller_phi == ratio(7, 2) && r.expected_loss == ratio(20, 3),
        || format!("chain: {r:?}"),
    )?;
    Ok("all exact instances; chain s-A-B: -19/6 = 7/2 - 20/3".into())
}

// 8
fn vcg_not_fair() -> Verdict {
    let inst = fixtures::chain3();
    let profile = inst.truthful_profile().map_err(err)?;
    let outcome = vcg(&profile).map_err(err)?;
    let a = AgentId::buyer("A");
    let u = outcome.utilities(&profile).map_err(err)?[&a].clone();
    let phi = shapley_exact(&profile).map_err(err)?.value(&a).cloned().ok_or("no phi")?;
    ensure(u == int(10) && phi == ratio(7, 2), || format!("u_A={} phi_A={}", format(&u), format(&phi)))?;
    let report = sf_audit(&inst, Mechanism::Vcg, EvalMode::Exact).map_err(err)?;
    ensure(!report.upper_pass, || "VCG upper bound unexpectedly respected".into())?;
    Ok("VCG on chain s-A-B: u_A = 10 > phi_A = 7/2, upper-bound violation recorded".into())
}

// 9
fn oracle_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for case in 0..500u64 {
        let n = rng.gen_range(1..=5);
        let k = rng.gen_range(1..=4);
        let inst = common::homogeneous(900, case, n, k, rng.gen_range(0.2..0.9), 6);
        let profile = inst.truthful_profile().map_err(err)?;
        let coalition = common::random_coalition(&profile, &mut rng);
        let committed = common::random_committed(&profile, coalition, &mut rng);
        let fast = max_welfare(&profile, coalition, &committed).map_err(err)?;
        let slow = brute_force_welfare(&profile, coalition, &committed).map_err(err)?;
        ensure(fast.welfare == slow.welfare, || {
            format!("homogeneous case {case}: {} vs {}", format(&fast.welfare), format(&slow.welfare))
        })?;
    }
    for case in 0..100u64 {
        let n = rng.gen_range(1..=4);
        let inst = common::combinatorial(901, case, n, 2, rng.gen_range(0.2..0.9), 6);
        let profile = inst.truthful_profile().map_err(err)?;
        let coalition = common::random_coalition(&profile, &mut rng);
        let committed = common::random_committed(&profile, coalition, &mut rng);
        let fast = max_welfare(&profile, coalition, &committed).map_err(err)?;
        let slow = brute_force_welfare(&profile, coalition, &committed).map_err(err)?;
        ensure(fast.welfare == slow.welfare, || {
            format!("combinatorial case {case}: {} vs {}", format(&fast.welfare), format(&slow.welfare))
        })?;
    }
    Ok("500 homogeneous + 100 two-item coalition/committed cases agree".into())
}

// 10
fn infeasible_independence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut mutations = 0;
    let mut index = 0u64;
    while mutations < 100 {
        index += 1;
        let inst = common::homogeneous(1000, index, 5, rng.gen_range(1..=3), 0.3, 20);
        let profile = inst.truthful_profile().map_err(err)?;
        let reachable = profile.members(feasible_set(&profile, profile.everyone()));
        let Some(outsider) = inst.buyers.keys().find(|b| !reachable.contains(b)).cloned() else {
            continue;
        };
        let mut marginals: Vec<i64> = (0..inst.items.budget()).map(|_| rng.gen_range(0..=50)).collect();
        marginals.sort_unstable_by(|a, b| b.cmp(a));
        let report = BuyerType::new(
            Valuation::Homogeneous(HomogeneousValuation::from_integers(&marginals)),
            inst.buyers[&outsider].neighbors.iter().cloned(),
        );
        let mutated = profile.with_report(&outsider, report).map_err(err)?;
        for order in all_orders(&profile) {
            let before = run_order(&profile, &order).map_err(err)?;
            let after = run_order(&mutated, &order).map_err(err)?;
            ensure(before == after, || format!("instance {index}: {outsider} changed the outcome of {order}"))?;
        }
        mutations += 1;
    }
    Ok("100 mutations of infeasible buyers' reports, every order bit-identical".into())
}

// 11
fn shapley_engine() -> Verdict {
    let mut instances = vec![
        fixtures::single(),
        fixtures::chain3(),
        fixtures::twins(),
        fixtures::clique_two_buyers_three_units(),
        fixtures::chain3_combinatorial(),
        fixtures::two_items_split(),
        fixtures::pair_lover(),
    ];
    for i in 0..60u64 {
        instances.push(common::homogeneous(1100, i, 1 + (i % 5) as usize, 1 + (i % 3) as u32, 0.4, 5));
    }
    for i in 0..20u64 {
        instances.push(common::combinatorial(1101, i, 1 + (i % 4) as usize, 2, 0.5, 5));
    }
    let (mut nulls, mut symmetric) = (0, 0);
    for (idx, inst) in instances.iter().enumerate() {
        let profile = inst.truthful_profile().map_err(err)?;
        let agents = profile.agents().to_vec();
        let report = shapley_exact(&profile).map_err(err)?;
        ensure(report.sum() == report.total_welfare, || format!("instance {idx}: efficiency fails"))?;

        // Permutation form.
        let orders: Vec<Order> = all_orders(&profile).collect();
        for a in &agents {
            let mut total = int(0);
            for o in &orders {
                total += marginal_contribution(&profile, o, a).map_err(err)?;
            }
            let by_orders = total / int(orders.len() as i64);
            ensure(&by_orders == report.value(a).unwrap(), || format!("instance {idx}: {a} orders vs coalitions"))?;
        }

        // Coalition values, for null players and symmetry.
        let n = agents.len();
        let empty = diffusion_auction::welfare::Allocation::empty(profile.items().kind());
        let mut value = Vec::with_capacity(1 << n);
        for bits in 0..1u32 << n {
            let members = (0..n).filter(|i| bits >> i & 1 == 1).map(|i| &agents[i]);
            let c = profile.coalition(members).map_err(err)?;
            value.push(max_welfare(&profile, c, &empty).map_err(err)?.welfare);
        }
        for i in 0..n {
            let null = (0..1u32 << n).all(|b| value[(b | 1 << i) as usize] == value[b as usize]);
            if null {
                nulls += 1;
                ensure(report.value(&agents[i]).unwrap() == &int(0), || format!("instance {idx}: null {} paid", agents[i]))?;
            }
            for j in i + 1..n {
                let swap = |b: u32| {
                    let (bi, bj) = (b >> i & 1, b >> j & 1);
                    (b & !(1 << i) & !(1 << j)) | bj << i | bi << j
                };
                if (0..1u32 << n).all(|b| value[b as usize] == value[swap(b) as usize]) {
                    symmetric += 1;
                    ensure(report.value(&agents[i]) == report.value(&agents[j]), || {
                        format!("instance {idx}: {} and {} symmetric but differ", agents[i], agents[j])
                    })?;
                }
            }
        }
    }

    // Sampling accuracy.
    let mut sampled = 0;
    for inst in [fixtures::chain3(), fixtures::fig2(), fixtures::clique_two_buyers_three_units()] {
        let profile = inst.truthful_profile().map_err(err)?;
        let exact = shapley_exact(&profile).map_err(err)?;
        let estimate = shapley_sampled(&profile, 10_000, 2024).map_err(err)?;
        for (e, s) in exact.entries.iter().zip(&estimate.entries) {
            let gap = (to_f64(&e.value) - to_f64(&s.value)).abs();
            let se = s.std_error.unwrap_or(0.0);
            ensure(gap <= 3.0 * se, || {
                format!("{}: |{} - {}| = {gap} > 3 x {se}", e.agent, to_f64(&e.value), to_f64(&s.value))
            })?;
            sampled += 1;
        }
    }
    Ok(format!(
        "{} instances: efficiency, orders = coalitions, {nulls} null players, {symmetric} symmetric pairs; {sampled} sampled estimates within 3 SE",
        instances.len()
    ))
}

// 12
fn worked_example() -> Verdict {
    let profile = fixtures::fig2().truthful_profile().map_err(err)?;
    let continuation = |next: &str| {
        let mut order = fixtures::fig2_prefix();
        order.push(AgentId::buyer(next));
        for a in profile.agents() {
            if !order.contains(a) {
                order.push(a.clone());
            }
        }
        Order::new(order)
    };
    let g = AgentId::buyer("G");
    let with_g = run_order(&profile, &continuation("G")).map_err(err)?;
    ensure(with_g.payment(&g) == int(5) && with_g.sold() == 1, || format!("G pays {}", format(&with_g.payment(&g))))?;
    let h = AgentId::buyer("H");
    let with_h = run_order(&profile, &continuation("H")).map_err(err)?;
    ensure(with_h.payment(&h) == int(-5) && with_h.allocation.get(&h).is_nothing(), || {
        format!("H pays {}", format(&with_h.payment(&h)))
    })?;
    Ok("G wins and pays 5 - 7 + 7 = 5; H wins nothing and receives 10 - 5 = 5".into())
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |n: u32, title: &str, verdict: Verdict, started: Instant| {
        let secs = started.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS [{n:>2}] {title}: {detail} ({secs:.1}s)"),
            Err(why) => {
                failed += 1;
                println!("FAIL [{n:>2}] {title}: {why} ({secs:.1}s)");
            }
        }
    };
    let mut summaries = Vec::new();
    let t = Instant::now();
    report(1, "fairness sandwich, k=1", sandwich_single_unit(&mut summaries), t);
    let t = Instant::now();
    report(2, "fairness sandwich, k=2..5", sandwich_multi_unit(&mut summaries), t);
    let t = Instant::now();
    report(3, "tightness witness", tightness(), t);
    let t = Instant::now();
    report(4, "incentive compatibility", incentive_compatibility(), t);
    let t = Instant::now();
    report(5, "individual rationality", individual_rationality(), t);
    let t = Instant::now();
    report(6, "unsold-rate bound", unsold_rate(&summaries), t);
    let t = Instant::now();
    report(7, "revenue identity", revenue_identity(&summaries), t);
    let t = Instant::now();
    report(8, "VCG is not Shapley fair", vcg_not_fair(), t);
    let t = Instant::now();
    report(9, "welfare oracle equivalence", oracle_equivalence(), t);
    let t = Instant::now();
    report(10, "independence from infeasible buyers", infeasible_independence(), t);
    let t = Instant::now();
    report(11, "Shapley engine", shapley_engine(), t);
    let t = Instant::now();
    report(12, "worked example payments", worked_example(), t);
    println!("{} of 12 criteria passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
