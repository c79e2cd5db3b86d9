//! Capacitated vehicle routing problem model.
//!
//! Holds the immutable [`Instance`] (coordinates, demands, capacity and the
//! rounded Euclidean distance matrix), route-set [`Solution`]s with their
//! penalized cost, TSPLIB/CVRPLIB ingestion, and best-known-solution gap
//! accounting.

mod bks;
mod error;
pub mod generate;
mod instance;
mod solution;

pub use bks::{gap_percent, BksRegistry};
pub use error::CvrpError;
pub use instance::Instance;
pub use solution::{
    penalized_cost, route_angle, validate_solution, CostEvaluator, Route, Solution,
    ValidationReport, Violation,
};

pub type Result<T, E = CvrpError> = std::result::Result<T, E>;
