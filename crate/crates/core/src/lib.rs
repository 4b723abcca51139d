//! Exact-arithmetic engine for characters and multiplicities of quantised
//! compact Hamiltonian group actions, computed from torus fixed-point data.
//!
//! Everything is integer or rational arithmetic over the weight lattice;
//! there is no floating point anywhere in the computational core. Weights
//! are stored in doubled coordinates (twice the pairing with each simple
//! coroot) so that half-sums of roots and square-root factors such as
//! `e^{γ/2}` stay exactly representable.

pub mod charring;
pub mod cli;
pub mod diagram;
mod error;
pub mod fixedpoint;
pub mod multiplicity;
pub mod quantize;
pub mod rootsys;
pub mod verify;

pub use error::{Error, Result};
