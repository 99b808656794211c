use std::collections::BTreeMap;
use std::fmt;

use num::Zero;

use crate::rational::{self, Rational};
use crate::{Error, Result};

/// Largest supported number of heterogeneous items.
pub const MAX_ITEMS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ItemKind {
    Homogeneous,
    Combinatorial,
}

/// What the seller offers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Items {
    /// `k` identical units.
    Homogeneous { k: u32 },
    /// Distinct named items; item `j` is bit `j` of a [`Bundle`].
    Combinatorial { names: Vec<String> },
}

impl Items {
    pub fn kind(&self) -> ItemKind {
        match self {
            Items::Homogeneous { .. } => ItemKind::Homogeneous,
            Items::Combinatorial { .. } => ItemKind::Combinatorial,
        }
    }

    /// Units for homogeneous goods, item count for combinatorial ones.
    pub fn budget(&self) -> u32 {
        match self {
            Items::Homogeneous { k } => *k,
            Items::Combinatorial { names } => names.len() as u32,
        }
    }

    pub fn full_bundle(&self) -> Bundle {
        Bundle::full(self.budget() as usize)
    }
}

/// A set of items, as a bitmask over item indices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bundle(pub u32);

impl Bundle {
    pub const EMPTY: Bundle = Bundle(0);

    pub fn full(items: usize) -> Bundle {
        if items >= 32 {
            Bundle(u32::MAX)
        } else {
            Bundle((1u32 << items) - 1)
        }
    }

    pub fn of(items: impl IntoIterator<Item = usize>) -> Bundle {
        Bundle(items.into_iter().fold(0, |acc, j| acc | 1 << j))
    }

    pub fn contains(self, item: usize) -> bool {
        self.0 >> item & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: Bundle) -> bool {
        self.0 & !other.0 == 0
    }

    /// Parses an indicator string: character `j` is item `j`, so `"10"` is
    /// the first item alone.
    pub fn from_bits(text: &str, items: usize) -> Result<Bundle> {
        if text.len() != items {
            return Err(Error::Parse(format!(
                "bundle key {text:?} has length {}, expected {items}",
                text.len()
            )));
        }
        text.chars().enumerate().try_fold(Bundle::EMPTY, |b, (j, c)| match c {
            '0' => Ok(b),
            '1' => Ok(Bundle(b.0 | 1 << j)),
            _ => Err(Error::Parse(format!("bundle key {text:?} is not a bitstring"))),
        })
    }

    pub fn to_bits(self, items: usize) -> String {
        (0..items).map(|j| if self.contains(j) { '1' } else { '0' }).collect()
    }
}

/// What one buyer holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Holding {
    Units(u32),
    Bundle(Bundle),
}

impl Holding {
    pub fn is_nothing(self) -> bool {
        match self {
            Holding::Units(q) => q == 0,
            Holding::Bundle(b) => b.is_empty(),
        }
    }

    pub(crate) fn from_slot(kind: ItemKind, slot: u32) -> Holding {
        match kind {
            ItemKind::Homogeneous => Holding::Units(slot),
            ItemKind::Combinatorial => Holding::Bundle(Bundle(slot)),
        }
    }

    pub(crate) fn slot(self) -> u32 {
        match self {
            Holding::Units(q) => q,
            Holding::Bundle(b) => b.0,
        }
    }

    pub fn kind(self) -> ItemKind {
        match self {
            Holding::Units(_) => ItemKind::Homogeneous,
            Holding::Bundle(_) => ItemKind::Combinatorial,
        }
    }
}

impl fmt::Display for Holding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Holding::Units(q) => write!(f, "{q}"),
            Holding::Bundle(b) => {
                let items: Vec<String> = (0..MAX_ITEMS).filter(|&j| b.contains(j)).map(|j| j.to_string()).collect();
                write!(f, "{{{}}}", items.join(","))
            }
        }
    }
}

/// Multi-unit valuation given by its marginal values: `v(q)` is the sum of
/// the first `q` marginals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HomogeneousValuation {
    marginals: Vec<Rational>,
}

impl HomogeneousValuation {
    pub fn new(marginals: Vec<Rational>) -> HomogeneousValuation {
        HomogeneousValuation { marginals }
    }

    pub fn from_integers(marginals: &[i64]) -> HomogeneousValuation {
        Self::new(marginals.iter().map(|&m| rational::int(m)).collect())
    }

    pub fn marginals(&self) -> &[Rational] {
        &self.marginals
    }

    /// Number of units this valuation is defined for.
    pub fn units(&self) -> usize {
        self.marginals.len()
    }

    pub fn value(&self, q: u32) -> Result<Rational> {
        let q = q as usize;
        if q > self.marginals.len() {
            return Err(Error::Range(format!(
                "quantity {q} exceeds the {} units the valuation covers",
                self.marginals.len()
            )));
        }
        Ok(self.marginals[..q].iter().sum())
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.marginals.iter().any(rational::is_negative) {
            out.push("negative marginal value".to_string());
        }
        if self.marginals.windows(2).any(|w| w[1] > w[0]) {
            out.push("marginals not non-increasing".to_string());
        }
        out
    }
}

/// Bundle valuation given as a table; bundles missing from the table are worth 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CombinatorialValuation {
    items: usize,
    values: BTreeMap<Bundle, Rational>,
}

impl CombinatorialValuation {
    pub fn new(items: usize, values: BTreeMap<Bundle, Rational>) -> CombinatorialValuation {
        CombinatorialValuation { items, values }
    }

    pub fn from_integers(items: usize, entries: &[(Bundle, i64)]) -> CombinatorialValuation {
        let values = entries
            .iter()
            .map(|&(b, v)| (b, rational::int(v)))
            .collect();
        Self::new(items, values)
    }

    pub fn items(&self) -> usize {
        self.items
    }

    pub fn entries(&self) -> &BTreeMap<Bundle, Rational> {
        &self.values
    }

    pub fn value(&self, bundle: Bundle) -> Result<Rational> {
        if !bundle.is_subset_of(Bundle::full(self.items)) {
            return Err(Error::Range(format!(
                "bundle {} lies outside the {} declared items",
                bundle.to_bits(MAX_ITEMS),
                self.items
            )));
        }
        Ok(self.values.get(&bundle).cloned().unwrap_or_else(Rational::zero))
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.items > MAX_ITEMS {
            out.push(format!("more than {MAX_ITEMS} items"));
        }
        if self.values.get(&Bundle::EMPTY).is_some_and(|v| !v.is_zero()) {
            out.push("empty bundle nonzero".to_string());
        }
        if self.values.values().any(rational::is_negative) {
            out.push("negative bundle value".to_string());
        }
        if self
            .values
            .keys()
            .any(|b| !b.is_subset_of(Bundle::full(self.items.min(MAX_ITEMS))))
        {
            out.push("bundle outside the declared items".to_string());
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Homogeneous(HomogeneousValuation),
    Combinatorial(CombinatorialValuation),
}

impl Valuation {
    pub fn kind(&self) -> ItemKind {
        match self {
            Valuation::Homogeneous(_) => ItemKind::Homogeneous,
            Valuation::Combinatorial(_) => ItemKind::Combinatorial,
        }
    }

    pub fn value(&self, holding: Holding) -> Result<Rational> {
        evaluate(self, holding)
    }

    pub fn violations(&self) -> Vec<String> {
        match self {
            Valuation::Homogeneous(v) => v.violations(),
            Valuation::Combinatorial(v) => v.violations(),
        }
    }

    /// A valuation of the same shape that is zero everywhere.
    pub fn zeroed(&self) -> Valuation {
        match self {
            Valuation::Homogeneous(v) => Valuation::Homogeneous(HomogeneousValuation::new(
                vec![Rational::zero(); v.units()],
            )),
            Valuation::Combinatorial(v) => {
                Valuation::Combinatorial(CombinatorialValuation::new(v.items(), BTreeMap::new()))
            }
        }
    }
}

/// Value of a holding: prefix sum of marginals, or a table lookup.
pub fn evaluate(valuation: &Valuation, holding: Holding) -> Result<Rational> {
    match (valuation, holding) {
        (Valuation::Homogeneous(v), Holding::Units(q)) => v.value(q),
        (Valuation::Combinatorial(v), Holding::Bundle(b)) => v.value(b),
        _ => Err(Error::Range(
            "holding kind does not match the valuation kind".to_string(),
        )),
    }
}
