//! Geometric, dynamical and total phases of single and entangled qudits under
//! local unitary evolutions.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`]: the SU(d) generator basis, its Cartan subalgebra, diagonal
//!   exponentials and velocity-vector decompositions.
//! * [`state`]: single-qudit density matrices parametrised by a purity vector,
//!   two-qudit pure states as coefficient matrices, their Schmidt form and
//!   local-unitary invariants.
//! * [`evolution`]: time-parametrised local unitary paths built from Cartan,
//!   Bloch-sphere and constant-generator segments.
//! * [`phase`]: the phase engine (total, dynamical and geometric phase traces),
//!   cycle detection and the fractional phase lattice.
//! * [`closed_form`]: analytic phase expressions used as oracles.
//! * [`scenario`]: scenario files, figure presets, trace serialisation and the
//!   verification driver used by the `qudit-phase` binary.

pub mod algebra;
pub mod closed_form;
pub mod error;
pub mod evolution;
pub mod linalg;
pub mod phase;
pub mod quadrature;
pub mod scenario;
pub mod state;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Dense complex matrix used throughout the crate.
pub type CMatrix = nalgebra::DMatrix<C64>;
