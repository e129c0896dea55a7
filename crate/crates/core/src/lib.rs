//! Capacity of translation-invariant constrained lattices, and encoding of
//! arbitrary bitstreams into valid lattice valuations at near-capacity
//! rates with asymmetric numeral systems.
//!
//! - [`spectral`]: transfer matrices, Perron eigenpairs, maximal-entropy chains.
//! - [`ans`]: ABS/ANS entropy coders and the framed stream container.
//! - [`lattice`]: general constrained lattice models and brute-force oracles.
//! - [`strip`]: width-`n` strip reduction of 2D models and the lattice codec.
//! - [`experiments`]: heuristic 2D algorithms and the reproduction report.

pub mod ans;
pub mod experiments;
pub mod lattice;
pub mod rng;
pub mod spectral;
pub mod strip;

/// Entropy of the hard-square model, bits per node.
pub const HARD_SQUARE_ENTROPY: f64 = 0.5878911617753406;
