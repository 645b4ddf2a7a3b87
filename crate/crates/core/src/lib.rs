//! Quantum harmonic analysis on phase space (d = 1) in a truncated Hermite
//! basis: symplectic Fourier transforms, time-frequency representations,
//! Weyl and τ-quantization, operator convolutions and the restriction
//! experiments built on them.

pub mod error;
pub mod hermite_rep;
pub mod numerics;
pub mod operator_calculus;
pub mod phase_space;
pub mod restriction_lab;

pub use error::{QhaError, Result};
pub use num_complex::Complex64;
