//! Translation-invariant constrained lattice models on `ℤ` and `ℤ²`,
//! brute-force counting and description oracles, and the thermalization
//! sampler.

pub mod count;
pub mod describe;
pub mod grid;
pub mod model;
pub mod region;
pub mod thermal;

use thiserror::Error;

pub use count::{count, entropy_estimate, enumerate_valuations, lg_u128};
pub use describe::{
    check_ploc, description_bounds, Bounds, CountingDescription, Description, EmpiricalDescription, PlocSite,
    SequentialDescription,
};
pub use grid::{Boundary, Grid};
pub use model::{Coord, LatticeModel, Pattern};
pub use region::Region;
pub use thermal::{thermalize, ThermalChain, ThermalConfig, Thermalizer};

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("computation exceeds the enumeration or counting limits")]
    TooLarge,
    #[error("conditioning valuation admits no completion")]
    EmptyConditioning,
    #[error("prefix of length {length} has probability zero")]
    ZeroPrefix { length: usize },
    #[error("cell {at:?} lies outside the description's support")]
    PatternOutsideMargin { at: Coord },
    #[error("constraint violated at {at:?}")]
    ConstraintViolation { at: Coord },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown model preset `{0}`")]
    UnknownPreset(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid region: {0}")]
    InvalidRegion(String),
}
