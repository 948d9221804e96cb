//! Spherical quandles, knot-quandle colorings and the correspondence between
//! spherical colorings of a knot and SU(2) representations of its knot group
//! with fixed meridian trace.
//!
//! The crate is organised bottom-up:
//!
//! - [`quandle`]: the abstract quandle interface and finite Cayley-table quandles.
//! - [`su2`]: unit quaternions, the Lie algebra su(2) as 3-vectors, exp/log and
//!   the adjoint action.
//! - [`spherical`]: the Azcan–Fenn, augmented and Clark–Saito spherical quandles
//!   and the isomorphisms between them.
//! - [`knot`]: PD-code ingestion, arcs, crossing signs and the Wirtinger /
//!   knot-quandle relations.
//! - [`solver`]: finite coloring enumeration and the multi-start least-squares
//!   solver for colorings by S²(r).
//! - [`correspondence`]: colorings ↔ representations, and the
//!   triviality/abelian and orbit/conjugacy audits.

pub mod correspondence;
pub mod error;
pub mod knot;
pub mod quandle;
pub mod solver;
pub mod spherical;
pub mod su2;

pub use error::{Error, Result};
