//! Desk-scale toolkit for dummy-free, deterministic CSIDH-style group actions.
//!
//! The crate is organised around the pipeline that produces and evaluates a
//! parameter set:
//!
//! * [`field`] — prime-field arithmetic over an arbitrary modulus with a
//!   built-in operation counter (multiplications / squarings / additions).
//! * [`montgomery`] — x-only Montgomery curve arithmetic in projective
//!   coordinates, the ladder oracle, and deterministic point search.
//! * [`dac`] — compressed continued-fraction differential addition chains:
//!   decoding, DAC-driven scalar multiplication, and exhaustive enumeration
//!   into a per-prime admissible-length map.
//! * [`batching`] — DACsHUND-valid batch configurations: validation, initial
//!   sizing, a greedy optimizer under a documented cost model, and key-space
//!   counting.
//! * [`isogeny`] — odd-degree isogenies: classical Vélu, √élu, and the
//!   dummy-free Matryoshka 2.0 / 1.414 kernels with uniform operation traces.
//! * [`action`] — parameter sets, WOMBat keys, and the deterministic two-point
//!   group action evaluation, plus public-key validation and key derivation.
//!
//! Everything is exact (`num_bigint::BigUint` residues); "constant time" here
//! means the *operation trace* — the sequence of counted field operations — is
//! independent of secrets, which is the testable desk-scale proxy.

pub mod action;
pub mod batching;
pub mod dac;
pub mod field;
pub mod isogeny;
pub mod montgomery;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
