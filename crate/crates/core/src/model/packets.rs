use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PacketId(pub u32);

impl fmt::Display for PacketId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type PacketSet = BTreeSet<PacketId>;

/// The packets carried by the source, each with a positive integral weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PacketUniverse {
    weights: BTreeMap<PacketId, u64>,
}

impl PacketUniverse {
    pub fn new(packets: impl IntoIterator<Item = (PacketId, u64)>) -> Result<Self> {
        let mut weights = BTreeMap::new();
        for (id, w) in packets {
            if w == 0 {
                return Err(Error::InvalidInstance(format!("packet {id} has zero weight")));
            }
            if weights.insert(id, w).is_some() {
                return Err(Error::InvalidInstance(format!("duplicate packet id {id}")));
            }
        }
        if weights.is_empty() {
            return Err(Error::InvalidInstance("packet universe is empty".into()));
        }
        Ok(Self { weights })
    }

    /// `P`, the number of packets.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn contains(&self, id: PacketId) -> bool {
        self.weights.contains_key(&id)
    }

    pub fn weight(&self, id: PacketId) -> Option<u64> {
        self.weights.get(&id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (PacketId, u64)> + '_ {
        self.weights.iter().map(|(&id, &w)| (id, w))
    }

    pub fn ids(&self) -> impl Iterator<Item = PacketId> + '_ {
        self.weights.keys().copied()
    }

    /// The whole universe as a set, i.e. the demand of the source.
    pub fn all(&self) -> PacketSet {
        self.weights.keys().copied().collect()
    }

    /// `w(S)`; unknown ids weigh nothing.
    pub fn total_weight<'a>(&self, set: impl IntoIterator<Item = &'a PacketId>) -> u64 {
        set.into_iter().filter_map(|p| self.weights.get(p)).sum()
    }

    pub fn universe_weight(&self) -> u64 {
        self.weights.values().sum()
    }
}
