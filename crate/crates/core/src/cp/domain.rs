//! Integer domains and the store that owns them.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Domain of one integer variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Domain {
    Interval { lb: i64, ub: i64 },
    /// Sorted ascending, no duplicates.
    Set(Vec<i64>),
}

impl Domain {
    pub fn lb(&self) -> i64 {
        match self {
            Domain::Interval { lb, .. } => *lb,
            Domain::Set(v) => v[0],
        }
    }

    pub fn ub(&self) -> i64 {
        match self {
            Domain::Interval { ub, .. } => *ub,
            Domain::Set(v) => v[v.len() - 1],
        }
    }

    pub fn contains(&self, x: i64) -> bool {
        match self {
            Domain::Interval { lb, ub } => *lb <= x && x <= *ub,
            Domain::Set(v) => v.binary_search(&x).is_ok(),
        }
    }

    pub fn size(&self) -> u64 {
        match self {
            Domain::Interval { lb, ub } => (ub - lb + 1).max(0) as u64,
            Domain::Set(v) => v.len() as u64,
        }
    }

    /// Values in ascending order. Only sensible for small domains.
    pub fn values(&self) -> Vec<i64> {
        match self {
            Domain::Interval { lb, ub } => (*lb..=*ub).collect(),
            Domain::Set(v) => v.clone(),
        }
    }

    /// `true` if every value of `self` is also in `other`.
    pub fn is_subset_of(&self, other: &Domain) -> bool {
        match (self, other) {
            (Domain::Interval { lb, ub }, Domain::Interval { lb: olb, ub: oub }) => {
                lb > ub || (olb <= lb && ub <= oub)
            }
            _ => self.values().iter().all(|&x| other.contains(x)),
        }
    }
}

/// Indexed domains plus a sticky infeasibility flag.
///
/// Every mutator only removes values. When a mutation would empty a domain
/// the store is flagged infeasible and the domain is left untouched, so the
/// bound accessors stay total.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DomainStore {
    domains: Vec<Domain>,
    infeasible: bool,
}

impl DomainStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `[lb, ub]`. An empty range flags the store infeasible.
    pub fn add_interval(&mut self, lb: i64, ub: i64) -> VarId {
        if lb > ub {
            self.infeasible = true;
        }
        self.domains.push(Domain::Interval { lb, ub: ub.max(lb) });
        VarId(self.domains.len() - 1)
    }

    /// Adds a finite-set domain. An empty set flags the store infeasible and
    /// is stored as the placeholder `{0}`.
    pub fn add_set(&mut self, values: impl IntoIterator<Item = i64>) -> VarId {
        let mut v: Vec<i64> = values.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if v.is_empty() {
            self.infeasible = true;
            v.push(0);
        }
        self.domains.push(Domain::Set(v));
        VarId(self.domains.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.domains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domains.is_empty()
    }

    pub fn is_infeasible(&self) -> bool {
        self.infeasible
    }

    pub fn mark_infeasible(&mut self) {
        self.infeasible = true;
    }

    pub fn domain(&self, var: VarId) -> &Domain {
        &self.domains[var.0]
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn lb(&self, var: VarId) -> i64 {
        self.domains[var.0].lb()
    }

    pub fn ub(&self, var: VarId) -> i64 {
        self.domains[var.0].ub()
    }

    pub fn contains(&self, var: VarId, x: i64) -> bool {
        self.domains[var.0].contains(x)
    }

    pub fn is_fixed(&self, var: VarId) -> bool {
        self.lb(var) == self.ub(var)
    }

    /// Removes every value below `x`. Returns whether the domain changed.
    pub fn set_lb(&mut self, var: VarId, x: i64) -> bool {
        if self.infeasible || x <= self.lb(var) {
            return false;
        }
        if x > self.ub(var) {
            self.infeasible = true;
            return false;
        }
        match &mut self.domains[var.0] {
            Domain::Interval { lb, .. } => *lb = x,
            Domain::Set(v) => {
                let cut = v.partition_point(|&y| y < x);
                v.drain(..cut);
            }
        }
        true
    }

    /// Removes every value above `x`. Returns whether the domain changed.
    pub fn set_ub(&mut self, var: VarId, x: i64) -> bool {
        if self.infeasible || x >= self.ub(var) {
            return false;
        }
        if x < self.lb(var) {
            self.infeasible = true;
            return false;
        }
        match &mut self.domains[var.0] {
            Domain::Interval { ub, .. } => *ub = x,
            Domain::Set(v) => {
                let keep = v.partition_point(|&y| y <= x);
                v.truncate(keep);
            }
        }
        true
    }

    /// Removes a single value. Interval domains can only lose their bounds;
    /// an interior value of an interval is left in place.
    pub fn remove_value(&mut self, var: VarId, x: i64) -> bool {
        if self.infeasible || !self.contains(var, x) {
            return false;
        }
        let (lb, ub) = (self.lb(var), self.ub(var));
        if lb == ub {
            self.infeasible = true;
            return false;
        }
        match &mut self.domains[var.0] {
            Domain::Interval { .. } => {
                if x == lb {
                    self.set_lb(var, x + 1)
                } else if x == ub {
                    self.set_ub(var, x - 1)
                } else {
                    false
                }
            }
            Domain::Set(v) => {
                let pos = v.binary_search(&x).expect("membership checked above");
                v.remove(pos);
                true
            }
        }
    }

    /// Keeps only the values satisfying `keep`. Intervals are trimmed from
    /// both ends.
    pub fn retain(&mut self, var: VarId, mut keep: impl FnMut(i64) -> bool) -> bool {
        if self.infeasible {
            return false;
        }
        match &mut self.domains[var.0] {
            Domain::Set(v) => {
                let before = v.len();
                let kept: Vec<i64> = v.iter().copied().filter(|&x| keep(x)).collect();
                if kept.is_empty() {
                    self.infeasible = true;
                    return false;
                }
                *v = kept;
                v.len() != before
            }
            Domain::Interval { lb, ub } => {
                let (mut lo, mut hi) = (*lb, *ub);
                while lo <= hi && !keep(lo) {
                    lo += 1;
                }
                while hi >= lo && !keep(hi) {
                    hi -= 1;
                }
                if lo > hi {
                    self.infeasible = true;
                    return false;
                }
                let changed = lo != *lb || hi != *ub;
                *lb = lo;
                *ub = hi;
                changed
            }
        }
    }
}
