//! Numerical Abel–Jacobi images of explicit Heegner cycles on Kuga–Sato
//! varieties.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command line
//! and parallel sweeps live in the `heegner-aj` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod aj;
pub mod arith;
pub mod asym;
pub mod error;
pub mod isogeny;
pub mod modforms;
pub mod numerics;
pub mod periods;
pub mod primes;
pub mod quadfield;

pub use error::{Error, Result};
