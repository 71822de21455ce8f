//! Dominance-aware duplicate detection.

use std::collections::HashMap;

use crate::cost::Cost;
use crate::model::DpModel;

#[derive(Debug, Clone)]
struct Entry<S> {
    state: S,
    g: Cost,
    node: usize,
}

/// Outcome of an insertion attempt.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Insertion {
    pub inserted: bool,
    /// Node ids of entries evicted because the new state dominates them.
    pub removed: Vec<usize>,
}

/// Encountered states bucketed by signature.
///
/// A candidate is rejected when some entry dominates it with no larger path
/// cost; on insertion every entry the candidate dominates with no smaller
/// path cost is evicted.
pub struct Registry<M: DpModel> {
    buckets: HashMap<M::Signature, Vec<Entry<M::State>>>,
    len: usize,
}

impl<M: DpModel> Default for Registry<M> {
    fn default() -> Self {
        Registry {
            buckets: HashMap::new(),
            len: 0,
        }
    }
}

impl<M: DpModel> Registry<M> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn insert(&mut self, model: &M, state: &M::State, g: Cost, node: usize) -> Insertion {
        let bucket = self.buckets.entry(model.signature(state)).or_default();
        if bucket.iter().any(|e| e.g <= g && model.dominates(&e.state, state)) {
            return Insertion::default();
        }
        let mut removed = Vec::new();
        bucket.retain(|e| {
            let evict = g <= e.g && model.dominates(state, &e.state);
            if evict {
                removed.push(e.node);
            }
            !evict
        });
        bucket.push(Entry {
            state: state.clone(),
            g,
            node,
        });
        self.len = self.len + 1 - removed.len();
        Insertion {
            inserted: true,
            removed,
        }
    }

    /// Insertion without node bookkeeping.
    pub fn register(&mut self, model: &M, state: &M::State, g: Cost) -> bool {
        self.insert(model, state, g, usize::MAX).inserted
    }

    /// `(state, g)` pairs stored under `signature`.
    pub fn bucket(&self, signature: &M::Signature) -> Vec<(&M::State, Cost)> {
        self.buckets
            .get(signature)
            .map(|b| b.iter().map(|e| (&e.state, e.g)).collect())
            .unwrap_or_default()
    }

    pub fn signatures(&self) -> impl Iterator<Item = &M::Signature> {
        self.buckets.keys()
    }
}
