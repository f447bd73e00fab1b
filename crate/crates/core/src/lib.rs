//! # iproj-core
//!
//! Transportation polytopes `C(P,Q)` over finite alphabets — sets of
//! nonnegative `n×m` tables with prescribed row marginal `P` and column
//! marginal `Q` — and the information projections (I-projections) between
//! them.
//!
//! The crate has two numeric modes, chosen at the type level:
//!
//! - **exact** (`Rational`, arbitrary-precision rationals) for everything
//!   combinatorial: vertex enumeration, Fréchet–Hoeffding bounds,
//!   support-restricted feasibility, geometric equivalence, face lattices.
//!   Nonnegativity and support identities are decided without rounding.
//! - **float** (`f64`) for the iterative parts: the I-projection itself
//!   (iterative proportional fitting), the Pythagorean-identity
//!   certification, round-trip and continuity probes, and the independent
//!   Frank–Wolfe cross-check.
//!
//! A table is homogeneous in mode; mixing modes is a compile error rather
//! than a runtime tag check.
//!
//! ## Layout
//!
//! - [`Distribution`], [`JointTable`], [`SupportPattern`], [`Polytope`] —
//!   the domain types, plus `kl_divergence`, `marginals`, `support`,
//!   [`product_table`].
//! - [`polytope`] — exact combinatorics of `C(P,Q)`.
//! - [`projection`] — IPF-based I-projection and its certification suite.
//! - [`oracle`] — a deliberately simple Frank–Wolfe minimizer used as an
//!   independent ground truth for the projection.
//! - [`sample`] — seedable random marginals, tables, and equivalent pairs.
//!
//! The crate is `no_std`-compatible (with `alloc`); disable the `std`
//! feature and enable `libm` for the float transcendentals.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("iproj-core requires either the `std` or the `libm` feature");

mod dist;
mod error;
mod scalar;
mod support;
mod table;

pub mod oracle;
pub mod polytope;
pub mod projection;
pub mod sample;

pub use dist::Distribution;
pub use error::Error;
pub use scalar::{Rational, Scalar, FLOAT_SUM_TOLERANCE};
pub use support::SupportPattern;
pub use table::{product_table, JointTable};

pub use polytope::{Equivalence, Face, FaceLattice, Polytope, SizeCaps, Vertex};
pub use projection::{
    continuity_probe, fh_mapping_check, marginal_residual_trace, project, roundtrip,
    FhMappingOutcome, IpfOptions, ProjectionReport,
};
