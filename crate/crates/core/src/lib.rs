//! Information cloning of harmonic-oscillator coherent states.
//!
//! A network of beam-splitter-like couplings between one source oscillator
//! and `N` target oscillators maps a product of coherent states to another
//! product of coherent states. This crate builds that map at the level of
//! coherency parameters ([`phase_space`]), checks it independently by brute
//! force in a truncated Fock space ([`fock_oracle`]), and simulates the
//! quadrature measurements used to reconstruct the original parameter
//! ([`measurement`]), with the optimal Gaussian cloner as a reference model
//! ([`gaussian_cloner`]).

pub mod error;
pub mod fock_oracle;
pub mod gaussian_cloner;
pub mod linalg;
pub mod measurement;
pub mod phase_space;
pub mod stats;

pub use error::{Error, Result};
pub use num_complex::Complex64;
