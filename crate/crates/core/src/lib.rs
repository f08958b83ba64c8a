//! Numerical laboratory for the mixing field of the vertex reinforced jump
//! process (VRJP).
//!
//! The crate is `no_std` (it only needs `alloc`) and contains the pure
//! algorithmic pieces:
//!
//! - [`graph`]: finite weighted graphs and the wired `Z²` box.
//! - [`field`]: the spanning-tree polynomial `D`, the log-density of the
//!   mixing measure and the Radon–Nikodym ratio of its shifted versions.
//! - [`quadrature`]: tensor-grid integration of the density in up to three
//!   free coordinates.
//! - [`sampler`]: single-site Metropolis chains with an incrementally
//!   maintained factorization of the tree Laplacian.
//! - [`vrjp`]: simulation of the reinforced process, of its quenched Markov
//!   counterparts and of their jump-chain laws.
//! - [`deformation`]: harmonic potentials, effective resistance and the
//!   moment bounds obtained by deforming the field along them.
//!
//! IO, parallel execution and the command line live in the `vrjp-lab` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod arborescence;
pub mod deformation;
mod error;
pub mod field;
pub mod graph;
pub mod linalg;
pub mod math;
pub mod quadrature;
pub mod rng;
pub mod sampler;
pub mod stats;
pub mod vrjp;

pub use error::{Error, Result};
pub use graph::{Graph, GraphBuilder, Vertex, VertexLabel};

/// Crate version, recorded in experiment reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
