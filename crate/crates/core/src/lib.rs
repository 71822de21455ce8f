//! Dynamic-programming models solved by heuristic search, with constraint
//! propagation used to prune states and strengthen dual bounds.

pub mod cost;
pub mod cp;
pub mod io;
pub mod models;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod search;

pub use cost::Cost;
pub use model::{evaluate_solution, DpModel, Successor};
