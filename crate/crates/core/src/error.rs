use alloc::string::String;

use thiserror::Error;

use crate::table::JointTable;

/// Errors for construction, combinatorics, and projection routines.
///
/// An *undefined* I-projection is not an error: `project` reports it through
/// [`ProjectionReport::feasibility`](crate::ProjectionReport). The
/// [`Error::Undefined`] variant appears only where an operation cannot
/// proceed without a defined projection (round trips, probes).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty distribution")]
    EmptyDistribution,

    #[error("negative mass at index {0}")]
    NegativeMass(usize),

    #[error("negative entry at ({0}, {1})")]
    NegativeEntry(usize, usize),

    #[error("non-finite value at position {0}")]
    NonFinite(usize),

    #[error("total mass {0} differs from 1 beyond the mode tolerance")]
    BadTotal(String),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("shape mismatch: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),

    #[error("ragged input: row {row} has {got} entries, expected {expected}")]
    RaggedRows {
        row: usize,
        got: usize,
        expected: usize,
    },

    #[error("cell ({0}, {1}) out of range for a {2}x{3} pattern")]
    CellOutOfRange(usize, usize, usize, usize),

    #[error("size cap exceeded: {size} > {cap}")]
    CapacityExceeded { size: usize, cap: usize },

    #[error("iterative fitting stopped after {iterations} iterations with residual {residual}")]
    NonConvergence {
        iterations: u64,
        residual: f64,
        last: JointTable<f64>,
    },

    #[error("I-projection undefined: no table in the target fits inside the source support")]
    Undefined,

    #[error("no vertex of the target polytope fits inside the source support")]
    NoFeasibleVertex,

    #[error("frank-wolfe stopped after {iterations} iterations with duality gap {gap}")]
    OracleNonConvergence { iterations: u64, gap: f64 },

    #[error("no perturbation produced a geometrically equivalent pair")]
    PerturbationFailed,
}
