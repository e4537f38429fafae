//! Exact-arithmetic laboratory for self-similar rank-one constructions.
//!
//! The crate builds the cutting-and-stacking transformations whose `p`-th
//! power splits into `p` copies of itself, together with the matching
//! `q`-self-similar flow, and computes everything exactly over the rationals:
//!
//! - [`tower`]: stage layouts, level sets, the action of `T^n`, correlations.
//! - [`selfsim`]: the `T^p`-invariant set, the similarity map and its checks.
//! - [`spectral`]: correlation sequences, weak-limit scanning, Fejér densities.
//! - [`arith`]: weak-limit time sequences, exponent collisions, Pisot distances.
//! - [`flow`]: the rational-height flow tower and its similarity.
//! - [`fock`]: rotation multisets and the multiplicity calculus of `exp`.
//!
//! The crate is `no_std` and only needs `alloc`.
#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod arith;
mod error;
pub mod flow;
pub mod fock;
pub mod ratio;
pub mod selfsim;
pub mod spectral;
pub mod tower;

pub use error::{Error, Result};
pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;

/// Stage cap used when a caller has no better bound.
pub const DEFAULT_STAGE_CAP: u32 = 48;
