use std::collections::BTreeMap;

use crate::model::ReportedProfile;
use crate::welfare::{Allocation, WelfareSolver};
use crate::Result;

use super::Outcome;

/// Welfare-maximizing allocation over the whole reported network with
/// Clarke pivot payments; a buyer's removal also disconnects everyone who
/// reaches the seller only through her:
///
/// `p_i = SW*(V - i) - (SW*(V) - v'_i(pi*_i))`
pub fn vcg(profile: &ReportedProfile) -> Result<Outcome> {
    let n = profile.agent_count();
    let empty = vec![0; n];
    let everyone = profile.everyone();
    let mut solver = WelfareSolver::new(profile);
    let optimum = solver.solve(everyone, &empty)?;
    let scale = profile.scale();
    let mut payments = BTreeMap::new();
    for i in 1..n {
        let own = profile.table(i)[optimum.slots[i] as usize];
        let without = solver.welfare(everyone.without(i), &empty)?;
        payments.insert(profile.agent(i).clone(), scale.to_rational(without - (optimum.welfare - own)));
    }
    Ok(Outcome {
        order: None,
        allocation: Allocation::from_slots(profile, &optimum.slots),
        payments,
    })
}
