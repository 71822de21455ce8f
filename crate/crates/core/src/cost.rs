//! Exact non-negative cost arithmetic with an absorbing infinity.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Raised when adding two finite costs leaves the `u64` range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("cost overflow while adding {0} and {1}")]
pub struct CostOverflow(pub u64, pub u64);

/// A non-negative integer cost or the infinity marker.
///
/// `Finite` orders before `Infinity`, so the derived ordering already places
/// infinity above every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Cost {
    Finite(u64),
    Infinity,
}

impl Cost {
    pub const ZERO: Cost = Cost::Finite(0);

    pub fn is_finite(self) -> bool {
        matches!(self, Cost::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Cost::Infinity)
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Cost::Finite(v) => Some(v),
            Cost::Infinity => None,
        }
    }

    /// Exact addition; infinity absorbs.
    pub fn checked_add(self, other: Cost) -> Result<Cost, CostOverflow> {
        match (self, other) {
            (Cost::Finite(a), Cost::Finite(b)) => a
                .checked_add(b)
                .map(Cost::Finite)
                .ok_or(CostOverflow(a, b)),
            _ => Ok(Cost::Infinity),
        }
    }

    /// `self - other` floored at zero. Infinity minus a finite value stays
    /// infinite; anything minus infinity is zero.
    pub fn saturating_sub(self, other: Cost) -> Cost {
        match (self, other) {
            (Cost::Infinity, Cost::Finite(_)) => Cost::Infinity,
            (_, Cost::Infinity) => Cost::ZERO,
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a.saturating_sub(b)),
        }
    }

    /// Converts a signed time-like quantity, flooring negatives at zero.
    pub fn from_signed(v: i64) -> Cost {
        Cost::Finite(v.max(0) as u64)
    }
}

impl From<u64> for Cost {
    fn from(v: u64) -> Self {
        Cost::Finite(v)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(v) => write!(f, "{v}"),
            Cost::Infinity => f.write_str("inf"),
        }
    }
}
