use diffusion_auction::analysis::{ir_audit, sf_audit};
use diffusion_auction::fixtures;
use diffusion_auction::mechanism::{pda_expected_sampled, EvalMode, Mechanism};
use diffusion_auction::model::AgentId;
use diffusion_auction::rational::to_f64;

#[test]
fn chain3_sampled_utility_within_three_standard_errors() {
    let p = fixtures::chain3().truthful_profile().unwrap();
    let e = pda_expected_sampled(&p, 10_000, 31).unwrap();
    let b = e.get(&AgentId::buyer("B")).unwrap();
    let se = b.utility_std_error.unwrap();
    assert!((to_f64(&b.utility) - 1.5).abs() <= 3.0 * se, "{} ± {se}", to_f64(&b.utility));
}

#[test]
fn fig2_sampled_ratios_respect_the_bound() {
    let r = sf_audit(&fixtures::fig2(), Mechanism::Pda, EvalMode::Sampled { samples: 100_000, seed: 17 }).unwrap();
    for e in &r.entries {
        let phi = to_f64(&e.phi);
        let u = to_f64(&e.expected_utility);
        let se = e.utility_std_error.unwrap();
        if phi == 0.0 {
            // J only links H and I, who are already adjacent.
            assert_eq!(e.agent, AgentId::buyer("J"));
            assert!(u.abs() <= 3.0 * se);
            continue;
        }
        let sigma = se / phi;
        let ratio = u / phi;
        assert!(ratio >= 0.5 - 3.0 * sigma && ratio <= 1.0 + 3.0 * sigma, "{}: {ratio} ± {sigma}", e.agent);
    }
    assert!(r.pass());
}

#[test]
fn fig2_sampled_orders_are_ir() {
    let mode = EvalMode::Sampled { samples: 100_000, seed: 5 };
    assert!(ir_audit(&fixtures::fig2(), Mechanism::Pda, mode).unwrap().is_empty());
}
