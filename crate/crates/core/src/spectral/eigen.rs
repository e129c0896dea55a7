use super::graph::WeightedGraph;
use super::sparse::SparseMatrix;
use super::SpectralError;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const ITERATION_CAP: usize = 1_000_000;
/// Unshifted iterations allowed before assuming a period longer than two.
const SHIFT_AFTER: usize = 2_000;

/// Perron eigenpair of an irreducible nonnegative matrix.
///
/// `left` (φ) and `right` (ψ) are strictly positive with `‖ψ‖₂ = 1` and
/// `φᵀψ = 1`. When the matrix is symmetric this makes `φ = ψ`.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub lambda: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    /// Largest of `‖Mψ − λψ‖∞` and `‖φᵀM − λφᵀ‖∞`.
    pub residual: f64,
    pub iterations: usize,
    /// Set when the oscillation detector switched to the shifted iteration.
    pub periodic: bool,
}

impl EigenSystem {
    pub fn entropy_bits(&self) -> f64 {
        self.lambda.log2()
    }
}

struct PowerResult {
    vector: Vec<f64>,
    iterations: usize,
    shifted: bool,
}

/// Power iteration with max-norm scaling. Falls back to iterating `M + cI`
/// when the growth factor oscillates, which happens for periodic graphs
/// whose spectrum has several eigenvalues on the Perron circle.
fn power_iterate(matrix: &SparseMatrix, tol: f64, cap: usize) -> Result<PowerResult, SpectralError> {
    let n = matrix.size();
    let mut x = vec![1.0; n];
    let mut shift = 0.0;
    let mut shifted = false;
    let mut last_growth = f64::NAN;
    let mut last_delta = 0.0f64;
    let mut alternations = 0usize;
    // once below tol, keep going until the change stops shrinking
    let mut polishing = false;
    let mut best_change = f64::INFINITY;
    let mut stale = 0usize;
    for it in 1..=cap {
        let mut y = matrix.mul_vec(&x);
        if shift != 0.0 {
            for (yi, xi) in y.iter_mut().zip(&x) {
                *yi += shift * xi;
            }
        }
        let growth = y.iter().cloned().fold(0.0, f64::max);
        if growth <= 0.0 || !growth.is_finite() {
            return Err(SpectralError::NoConvergence { iterations: it });
        }
        let mut change = 0.0f64;
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi /= growth;
            change = change.max((*yi - xi).abs());
        }
        x = y;
        if polishing {
            if change < best_change {
                best_change = change;
                stale = 0;
            } else {
                stale += 1;
            }
            if change == 0.0 || stale >= 64 {
                return Ok(PowerResult { vector: x, iterations: it, shifted });
            }
            continue;
        }
        if change < tol {
            polishing = true;
            best_change = change;
            continue;
        }
        if !shifted {
            let delta = growth - last_growth;
            if delta * last_delta < 0.0 {
                alternations += 1;
            } else {
                alternations = 0;
            }
            last_delta = delta;
            last_growth = growth;
            if alternations >= 32 || it >= SHIFT_AFTER {
                // averaged two-step iteration: same eigenvectors, Perron root isolated
                shift = growth;
                shifted = true;
            }
        }
    }
    Err(SpectralError::NoConvergence { iterations: cap })
}

fn max_residual(matrix: &SparseMatrix, transpose: bool, v: &[f64], lambda: f64) -> f64 {
    let mv = if transpose { matrix.vec_mul(v) } else { matrix.mul_vec(v) };
    mv.iter().zip(v).map(|(a, b)| (a - lambda * b).abs()).fold(0.0, f64::max)
}

/// Dominant eigenvalue with left and right eigenvectors.
pub fn dominant_eigs(graph: &WeightedGraph, tol: f64) -> Result<EigenSystem, SpectralError> {
    dominant_eigs_with_cap(graph, tol, ITERATION_CAP)
}

pub fn dominant_eigs_with_cap(graph: &WeightedGraph, tol: f64, cap: usize) -> Result<EigenSystem, SpectralError> {
    assert!(tol > 0.0, "tolerance must be positive");
    let matrix = graph.matrix();
    let right = power_iterate(matrix, tol, cap)?;
    let left = power_iterate(&matrix.transpose(), tol, cap)?;

    let mut psi = right.vector;
    let norm = psi.iter().map(|v| v * v).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|v| *v /= norm);
    let mut phi = left.vector;
    let overlap: f64 = phi.iter().zip(&psi).map(|(a, b)| a * b).sum();
    phi.iter_mut().for_each(|v| *v /= overlap);

    // Rayleigh quotient φᵀMψ / φᵀψ with φᵀψ = 1
    let m_psi = matrix.mul_vec(&psi);
    let lambda: f64 = phi.iter().zip(&m_psi).map(|(a, b)| a * b).sum();
    let residual = max_residual(matrix, false, &psi, lambda).max(max_residual(matrix, true, &phi, lambda));
    Ok(EigenSystem {
        lambda,
        left: phi,
        right: psi,
        residual,
        iterations: right.iterations.max(left.iterations),
        periodic: right.shifted || left.shifted,
    })
}
