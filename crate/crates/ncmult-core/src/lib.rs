//! Finite-dimensional models of noncommutative Fourier multipliers, Schur
//! multipliers and the almost multiplicative inequalities behind them.
//!
//! Everything here is pure computation over `alloc`; file formats, the
//! experiment runner and the command line live in the `ncmult` crate.
#![no_std]
extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod almostmult;
pub mod deleeuw;
pub mod error;
pub mod fft;
pub mod groups;
pub mod kakeya;
pub mod matkernel;
pub mod rng;
pub mod schur;
pub mod tol;
pub mod vna;

pub use error::{Error, Result};
pub use matkernel::{CMatrix, Exponent};
