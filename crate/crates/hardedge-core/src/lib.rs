//! Numerics for hard-edge Muttalib–Borodin ensembles.
//!
//! Arbitrary-precision special functions (Wright generalized Bessel, Fox-type
//! I-functions), model parametrix families, equilibrium measures, biorthogonal
//! polynomial systems and the hard-edge limit kernel.
//!
//! The crate is `no_std` and needs only `alloc`.
#![no_std]

extern crate alloc;

pub mod biorthogonal;
pub mod complex;
pub mod context;
pub mod equilibrium;
pub mod error;
pub mod gamma;
pub mod parametrix;
pub mod quad;
pub mod real;
pub mod specfun;
pub mod verify;

pub use complex::Complex;
pub use context::PrecisionContext;
pub use error::{NumError, Result};
pub use real::Real;
