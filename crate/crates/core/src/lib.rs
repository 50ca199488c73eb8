//! Time-dependent quantum dynamical maps, their spectral and geometric
//! representations, and a suite of non-Markovianity witnesses.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the batch
//! command line and plotting live in the `dynmap` companion crate.
//!
//! Layout:
//! - [`bases`]: Gell-Mann basis, Weyl operators, mutually unbiased bases,
//!   maximally entangled projector.
//! - [`superop`]: superoperator calculus (matrix representation, spectra,
//!   SVD, Choi matrix, damping basis, classification, conditional complete
//!   positivity).
//! - [`rate`]: scalar rate functions with closed-form antiderivatives.
//! - [`generators`]: the built-in families of time-local generators and map
//!   families.
//! - [`dynamics`]: propagation of generators into trajectories.
//! - [`witness`]: witness evaluation and report aggregation.

#![no_std]
#![deny(rustdoc::broken_intra_doc_links)]

extern crate alloc;

pub mod bases;
pub mod dynamics;
mod error;
pub mod generators;
pub mod linalg;
pub mod ode;
pub mod quad;
pub mod random;
pub mod rate;
pub mod superop;
pub mod witness;

pub use error::{Error, Result};
pub use num_complex::Complex64;
