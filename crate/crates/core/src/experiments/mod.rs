//! Heuristic hard-square algorithms and the table reproduction harness.

pub mod algorithm1;
pub mod algorithm2;
pub mod report;

use thiserror::Error;

pub use algorithm1::{
    algorithm1_entropy, algorithm1_optimum, algorithm1_rate, algorithm1_samples, algorithm1_slope, Algorithm1Codec, Algorithm1Lattice,
};
pub use algorithm2::{
    algorithm2_samples, algorithm2_simulate, fit_charging_profile, Algorithm2Config, Algorithm2Report, ChargingProfile,
    ProfileFit,
};
pub use report::{reproduce_tables, reproduce_tables_with, ExperimentReport, ReportOptions, ReportRow};

use crate::ans::AnsError;
use crate::lattice::LatticeError;
use crate::strip::StripError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("lattice holds only {achieved} bits of the message")]
    CapacityExceeded { achieved: usize },
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Strip(#[from] StripError),
    #[error(transparent)]
    Ans(#[from] AnsError),
}

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { mean: value, stderr: 0.0, samples: 1 }
    }

    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n.max(1) as f64;
        let var = if n > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
        Estimate { mean, stderr: (var / n.max(1) as f64).sqrt(), samples: n }
    }
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
/// Returns `(f(x*), x*)`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    (f(x), x)
}
