use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Largest supported number of agents, seller included.
pub const MAX_AGENTS: usize = 32;

/// Agent identifier. The seller is distinguished and orders before every buyer;
/// buyers order by their name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AgentId {
    Seller,
    Buyer(String),
}

impl AgentId {
    /// The textual id reserved for the seller.
    pub const SELLER_TAG: &'static str = "s";

    pub fn buyer(name: impl Into<String>) -> AgentId {
        let name = name.into();
        assert!(name != Self::SELLER_TAG, "\"s\" is reserved for the seller");
        AgentId::Buyer(name)
    }

    pub fn is_seller(&self) -> bool {
        matches!(self, AgentId::Seller)
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentId::Seller => f.pad(Self::SELLER_TAG),
            AgentId::Buyer(name) => f.pad(name),
        }
    }
}

impl FromStr for AgentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<AgentId> {
        let s = s.trim();
        if s.is_empty() {
            Err(Error::Parse("empty agent id".into()))
        } else if s == Self::SELLER_TAG {
            Ok(AgentId::Seller)
        } else {
            Ok(AgentId::Buyer(s.to_string()))
        }
    }
}

/// A set of agents of one profile, as a bitmask over the profile's agent
/// indices (seller at index 0, buyers after it in id order).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coalition(pub(crate) u32);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub(crate) fn full(agents: usize) -> Coalition {
        if agents >= 32 {
            Coalition(u32::MAX)
        } else {
            Coalition((1u32 << agents) - 1)
        }
    }

    pub fn contains_index(self, index: usize) -> bool {
        self.0 >> index & 1 == 1
    }

    pub fn contains_seller(self) -> bool {
        self.contains_index(0)
    }

    pub(crate) fn with(self, index: usize) -> Coalition {
        Coalition(self.0 | 1 << index)
    }

    pub(crate) fn without(self, index: usize) -> Coalition {
        Coalition(self.0 & !(1 << index))
    }

    pub fn is_subset_of(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Coalition) -> Coalition {
        Coalition(self.0 | other.0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Member indices in increasing order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    pub fn bits(self) -> u32 {
        self.0
    }
}

/// A join order over all agents, seller included.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Order(pub Vec<AgentId>);

impl Order {
    pub fn new(agents: impl IntoIterator<Item = AgentId>) -> Order {
        Order(agents.into_iter().collect())
    }

    /// Parses a comma separated list such as `"s,A,B"`.
    pub fn parse(text: &str) -> Result<Order> {
        text.split(',')
            .map(str::parse)
            .collect::<Result<Vec<_>>>()
            .map(Order)
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.0
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for a in &self.0 {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seller_orders_first() {
        let mut ids = vec![AgentId::buyer("B"), AgentId::Seller, AgentId::buyer("A")];
        ids.sort();
        assert_eq!(ids, vec![AgentId::Seller, AgentId::buyer("A"), AgentId::buyer("B")]);
        assert_eq!("s".parse::<AgentId>().unwrap(), AgentId::Seller);
    }

    #[test]
    fn coalition_bits() {
        let c = Coalition::EMPTY.with(0).with(3);
        assert_eq!(c.indices().collect::<Vec<_>>(), vec![0, 3]);
        assert!(c.contains_seller());
        assert_eq!(c.without(0).len(), 1);
        assert!(Coalition::EMPTY.with(3).is_subset_of(c));
        assert_eq!(Coalition::full(3).bits(), 0b111);
    }

    #[test]
    fn order_round_trip() {
        let o = Order::parse("s,A,B").unwrap();
        assert_eq!(o.to_string(), "s,A,B");
        assert_eq!(o.agents()[0], AgentId::Seller);
    }
}
