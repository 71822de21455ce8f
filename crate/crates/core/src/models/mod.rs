//! The three problem models: single-machine weighted tardiness with release
//! dates and deadlines, RCPSP, and TSP with time windows.

pub mod rcpsp;
pub mod smswt;
pub mod tsptw;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid instance: {0}")]
pub struct InstanceError(pub String);

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T, InstanceError> {
    Err(InstanceError(msg.into()))
}
