//! Convex separation from linear optimization.
//!
//! Given a point `r` and a convex set `S` that is only accessible through an
//! oracle maximizing linear functionals over it, the [`engine`] runs Gilbert's
//! minimum-distance iteration (plain, with a memory buffer of past oracle
//! points, or driven by a cheap heuristic oracle) and either finds a point of
//! `S` within `delta` of `r` or emits a certified separating functional.
//!
//! The remaining modules supply concrete sets:
//!
//! - [`sets`]: boxes, balls, explicit and product-form convex hulls with exact
//!   oracles and geometric metadata, used for convergence experiments;
//! - [`bell`]: bipartite and tripartite correlation polytopes (local
//!   deterministic strategies), Werner and GHZ quantum points and the
//!   measurement-optimization loop for Werner visibility bounds;
//! - [`steering`]: the unsteerable set for qubit steering with Pauli
//!   measurements on the trusted side, and the buckyball configuration;
//! - [`experiments`]: slope fits, convergence benchmarks and the end-to-end
//!   pipelines behind the `gilbert` command-line tool.

// `!(x > 0.0)` style comparisons are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bell;
pub mod engine;
mod enumerate;
mod error;
pub mod experiments;
pub mod point;
pub mod rng;
pub mod sets;
pub mod simplex;
pub mod steering;

pub use engine::{
    certify_witness, check_stop_witness, compute_epsilon, run, step_memory, step_plain, IterateState, LinearOracle,
    MemoryBuffer, OracleAnswer, Outcome, RunConfig, RunRecord, TraceRow, Witness,
};
pub use error::{Error, Result};
pub use point::Point;
pub use simplex::{kkt_residual, project, HullProblem, HullProjection};
