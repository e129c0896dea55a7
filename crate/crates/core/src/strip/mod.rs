//! Width-`n` strip reduction of a 2D model: the strip is solved exactly as
//! a 1D model over column symbols, and its maximal-entropy chain, factored
//! into per-row conditionals, drives an ABS stream that writes arbitrary
//! bits into valid lattices.

pub mod codec;
pub mod model;
pub mod tables;

use thiserror::Error;

pub use codec::{evaluate_rate, node_rule, EncodedLattice, LatticeCodec, NodeRule, RateReport, StripHeader, DEFAULT_PRECISION};
pub use model::{column_label, StripBase, StripModel};
pub use tables::ConditionalTables;

use crate::ans::AnsError;
use crate::lattice::{Boundary, LatticeError};
use crate::spectral::SpectralError;

#[derive(Debug, Error)]
pub enum StripError {
    #[error("strip width {width} exceeds the column alphabet or table limits")]
    TooWide { width: usize },
    #[error("strips need a cyclic or zero boundary, not {0}")]
    InvalidBoundary(Boundary),
    #[error("model `{0}` has no strip reduction")]
    UnsupportedModel(String),
    #[error("lattice holds only {achieved} bits of the message")]
    CapacityExceeded { achieved: usize },
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Ans(#[from] AnsError),
}
