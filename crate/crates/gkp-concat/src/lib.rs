//! Simulation and decoding of qubit codes concatenated with GKP
//! oscillator codes.
//!
//! Three concatenations are supported for each cataloged qubit code:
//!
//! * scheme I, qubit stabilizer codes on square-lattice GKP qubits;
//! * scheme II, the analog code obtained by replacing ancilla GKP qubits
//!   with position eigenstates;
//! * scheme III, GKP-stabilizer codes built from canonical GKP ancillas.
//!
//! Noise is i.i.d. Gaussian displacement on every quadrature. The
//! [`montecarlo`] module estimates logical error rates, [`analytic`] gives
//! closed forms for the 3-repetition code.

pub mod analytic;
pub mod codes;
pub mod decoder;
pub mod error;
pub mod lattice;
mod linalg;
pub mod montecarlo;
pub mod noise;
pub mod qudit;
pub mod symplectic;

pub use codes::{CodeFamily, CodeInstance, CodeSpec, Scheme};
pub use decoder::{DecodeResult, Decoder};
pub use error::{Error, Result};
pub use montecarlo::{estimate, ErrorRateEstimate};

pub use noise::{NoiseModel, NoiseVector};
