//! Transfer matrices, their Perron eigenpairs, and the maximal-entropy
//! Markov chain that achieves the one-dimensional capacity `lg λ`.

mod eigen;
mod graph;
pub mod kmodel;
mod merw;
mod sparse;

pub use eigen::{dominant_eigs, dominant_eigs_with_cap, EigenSystem, DEFAULT_TOL, ITERATION_CAP};
pub use graph::{decompose, strongly_connected_components, Potentials, WeightedGraph};
pub use merw::{format_report, merw_coder, pair_probs, path_prob, path_prob_closed_form, MarkovCoder};
pub use sparse::SparseMatrix;

#[derive(Debug, thiserror::Error)]
pub enum SpectralError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix has no allowed transition")]
    AllZero,
    #[error("weight {0} is not a finite nonnegative number")]
    InvalidWeight(f64),
    #[error("graph is reducible: {} strongly connected components", components.len())]
    ReducibleGraph { components: Vec<Vec<usize>> },
    #[error("no window is consistent with the constraints")]
    EmptyModel,
    #[error("power iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("path uses a forbidden transition at step {step}")]
    ForbiddenPath { step: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Builds, solves, and returns the chain for a graph in one call.
pub fn solve(graph: &WeightedGraph) -> Result<(EigenSystem, MarkovCoder), SpectralError> {
    let eig = dominant_eigs(graph, DEFAULT_TOL)?;
    let coder = merw_coder(graph, &eig);
    Ok((eig, coder))
}
