//! Entanglement witnesses built from iterated dot and cross products of
//! subsystem spin operators.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: dense complex matrices, Kronecker products and a cyclic
//!   Jacobi eigensolver for Hermitian matrices.
//! - [`spin`]: spin-`j` angular momentum matrices, site embedding, local
//!   SU(2) rotations and their SO(3) images.
//! - [`witness`]: the scalar witness `D(N)`, the vector witness `C(N)` and
//!   the Mermin-Klyshko operator, plus exact maximal violations.
//! - [`states`]: GHZ, W, explicit eigenstates, the Dür bound-entangled
//!   family, white-noise mixing, product states and partial transposes.
//! - [`optimize`]: restarted Nelder-Mead over local frames and measurement
//!   settings, alternating ascent over partition-constrained product states,
//!   noise-threshold bisection and ratio curves.
//! - [`experiments`]: run reports behind the `spinwitness` command line tool.
//!
//! Sites are indexed from zero in the Rust API. Site 0 is the leftmost
//! (most significant) Kronecker factor and each site's basis is ordered by
//! descending magnetic number, so a qubit's `|up>` is basis index 0.

pub mod error;
pub mod experiments;
pub mod linalg;
pub mod optimize;
pub mod spin;
pub mod state_io;
pub mod states;
pub mod surd;
pub mod witness;

pub use error::{Error, Result};
pub use linalg::{C64, ComplexMatrix, Spectrum};
pub use spin::{AxisAngle, SiteList, SpinQuantum, VectorOperator};
pub use states::{PartitionSpec, QuantumState};
pub use witness::{MkSettings, OrderingSpec, WitnessScalar, WitnessVector};
