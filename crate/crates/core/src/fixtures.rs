//! Small reference networks used across tests and examples.
//!
//! - [`single`]: the seller and one neighbor `A` valuing the item at 10.
//! - [`chain3`]: `s - A - B` with `A` valuing the item at 1 and `B` at 10.
//! - [`fig2`]: an 11-agent network for walking through one PDA run. With
//!   `C, I, B, s, F, J, D` traversed, the feasible buyers are `B, D, F`
//!   with best welfare 5. `B` (value 5) was traversed before the seller, so
//!   nothing is sold yet: the optimum keeps the item with `B` at both `F`'s
//!   and `D`'s turn. `G` (value 7) joins through `D`; `H` (value 2) connects
//!   `I` (value 10) and `J` (value 1), raising the best welfare to 10.

use crate::model::{
    AgentId, AuctionInstance, Bundle, CombinatorialValuation, HomogeneousValuation, Items,
    Valuation,
};

fn id(name: &str) -> AgentId {
    name.parse().expect("fixture ids are valid")
}

fn units(marginals: &[i64]) -> Valuation {
    Valuation::Homogeneous(HomogeneousValuation::from_integers(marginals))
}

fn edges(pairs: &[(&str, &str)]) -> Vec<(AgentId, AgentId)> {
    pairs.iter().map(|(a, b)| (id(a), id(b))).collect()
}

fn homogeneous(k: u32, values: &[(&str, &[i64])], pairs: &[(&str, &str)]) -> AuctionInstance {
    AuctionInstance::from_edges(
        Items::Homogeneous { k },
        values.iter().map(|(n, m)| (id(n), units(m))),
        &edges(pairs),
    )
}

pub fn single() -> AuctionInstance {
    homogeneous(1, &[("A", &[10])], &[("s", "A")])
}

pub fn chain3() -> AuctionInstance {
    homogeneous(1, &[("A", &[1]), ("B", &[10])], &[("s", "A"), ("A", "B")])
}

pub fn fig2() -> AuctionInstance {
    homogeneous(
        1,
        &[
            ("A", &[8]),
            ("B", &[5]),
            ("C", &[1]),
            ("D", &[3]),
            ("E", &[9]),
            ("F", &[4]),
            ("G", &[7]),
            ("H", &[2]),
            ("I", &[10]),
            ("J", &[1]),
        ],
        &[
            ("s", "B"),
            ("s", "D"),
            ("B", "F"),
            ("D", "G"),
            ("F", "H"),
            ("H", "I"),
            ("H", "J"),
            ("I", "J"),
            ("B", "A"),
            ("A", "C"),
            ("C", "E"),
            ("E", "G"),
        ],
    )
}

/// The prefix traversed before the two continuations in [`fig2`].
pub fn fig2_prefix() -> Vec<AgentId> {
    ["C", "I", "B", "s", "F", "J", "D"].iter().map(|n| id(n)).collect()
}

/// Complete graph on the seller and two buyers, three units on sale.
pub fn clique_two_buyers_three_units() -> AuctionInstance {
    homogeneous(
        3,
        &[("A", &[6, 4, 1]), ("B", &[5, 5, 2])],
        &[("s", "A"), ("s", "B"), ("A", "B")],
    )
}

/// Two buyers with identical values, both adjacent to the seller only.
pub fn twins() -> AuctionInstance {
    homogeneous(1, &[("A", &[6]), ("B", &[6])], &[("s", "A"), ("s", "B")])
}

/// [`chain3`] written as a one-item combinatorial auction.
pub fn chain3_combinatorial() -> AuctionInstance {
    let one = |v| {
        Valuation::Combinatorial(CombinatorialValuation::from_integers(1, &[(Bundle::of([0]), v)]))
    };
    AuctionInstance::from_edges(
        Items::Combinatorial { names: vec!["item".into()] },
        [(id("A"), one(1)), (id("B"), one(10))],
        &edges(&[("s", "A"), ("A", "B")]),
    )
}

/// Items `x, y`; `P` only values `{x}` at 5, `Q` only values `{y}` at 4.
pub fn two_items_split() -> AuctionInstance {
    AuctionInstance::from_edges(
        Items::Combinatorial { names: vec!["x".into(), "y".into()] },
        [
            (
                id("P"),
                Valuation::Combinatorial(CombinatorialValuation::from_integers(
                    2,
                    &[(Bundle::of([0]), 5)],
                )),
            ),
            (
                id("Q"),
                Valuation::Combinatorial(CombinatorialValuation::from_integers(
                    2,
                    &[(Bundle::of([1]), 4)],
                )),
            ),
        ],
        &edges(&[("s", "P"), ("s", "Q")]),
    )
}

/// Items `x, y`; the only buyer values the pair at 10 and nothing less.
pub fn pair_lover() -> AuctionInstance {
    AuctionInstance::from_edges(
        Items::Combinatorial { names: vec!["x".into(), "y".into()] },
        [(
            id("P"),
            Valuation::Combinatorial(CombinatorialValuation::from_integers(
                2,
                &[(Bundle::of([0, 1]), 10)],
            )),
        )],
        &edges(&[("s", "P")]),
    )
}
