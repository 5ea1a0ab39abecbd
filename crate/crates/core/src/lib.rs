//! Quench-dynamics simulator for a three-dimensional chiral (AIII) topological
//! insulator encoded on two qubits.
//!
//! The crate follows the measurement pipeline end to end:
//!
//! * [`qops`]: exact 4×4 linear algebra, closed-form and eigendecomposition
//!   propagators.
//! * [`model`]: the Bloch Hamiltonian, its band coefficients and phase diagram.
//! * [`dynamics`]: exact, Trotterized, pulse-compiled and dephased quench
//!   evolution plus time-averaged spin textures.
//! * [`topology`]: band-inversion surface extraction, offset shells, the
//!   dynamical spin-texture field and the winding-number integral.
//! * [`nmr`]: pulse compilation of Trotter slices, sequence simulation,
//!   pseudo-pure state preparation and peak readout.
//! * [`pipeline`]: glue that runs a full detection for one parameter set.

pub mod dynamics;
pub mod error;
pub mod format;
pub mod model;
pub mod nmr;
pub mod pipeline;
pub mod qops;
pub mod tol;
pub mod topology;

pub use error::{Error, Result};
