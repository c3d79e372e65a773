//! Entanglement witnesses for genuinely entangled pure multiqubit states.
//!
//! A state is taken to standard multiqubit (SMQ) form by invertible local operators, the
//! diagonally conjugated W witness is built for the SMQ state, and the result is conjugated
//! back. The crate also decomposes witnesses into local measurement settings, computes
//! white-noise tolerances, and classifies permutation-symmetric states.

pub mod decompose;
pub mod error;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod sample;
pub mod smq;
pub mod states;
pub mod symmetric;
pub mod transform;
pub mod witness;

pub use error::{Error, Result};
pub use linalg::C64;
pub use states::{Bipartition, DensityOperator, LocalOperator, LocalOperatorChain, NamedState, PureState};
pub use witness::{Provenance, Witness};
