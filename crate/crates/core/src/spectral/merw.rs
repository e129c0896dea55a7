use super::eigen::EigenSystem;
use super::graph::WeightedGraph;
use super::sparse::SparseMatrix;
use super::SpectralError;

/// Maximal-entropy Markov chain of a transfer matrix:
/// `S_ab = M_ab ψ_b / (λ ψ_a)`, `p_a = φ_a ψ_a / φᵀψ`.
#[derive(Clone, Debug)]
pub struct MarkovCoder {
    pub transition: SparseMatrix,
    pub stationary: Vec<f64>,
    /// `lg λ`
    pub entropy_bits: f64,
}

pub fn merw_coder(graph: &WeightedGraph, eig: &EigenSystem) -> MarkovCoder {
    let psi = &eig.right;
    let entries = graph
        .matrix()
        .triplets()
        .map(|(a, b, w)| (a, b, w * psi[b] / (eig.lambda * psi[a])))
        .collect();
    let transition = SparseMatrix::from_triplets(graph.size(), entries);
    let overlap: f64 = eig.left.iter().zip(psi).map(|(a, b)| a * b).sum();
    let stationary = eig.left.iter().zip(psi).map(|(a, b)| a * b / overlap).collect();
    MarkovCoder { transition, stationary, entropy_bits: eig.lambda.log2() }
}

impl MarkovCoder {
    pub fn size(&self) -> usize {
        self.transition.size()
    }

    /// `−Σ_a p_a Σ_b S_ab lg S_ab`, computed from the chain itself.
    pub fn chain_entropy(&self) -> f64 {
        (0..self.size())
            .map(|a| {
                let row: f64 = self.transition.row(a).map(|(_, s)| if s > 0.0 { -s * s.log2() } else { 0.0 }).sum();
                self.stationary[a] * row
            })
            .sum()
    }

    /// `max_a |Σ_b S_ab − 1|`
    pub fn row_sum_error(&self) -> f64 {
        (0..self.size())
            .map(|a| (self.transition.row(a).map(|(_, s)| s).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `‖pS − p‖∞`
    pub fn stationarity_error(&self) -> f64 {
        let moved = self.transition.vec_mul(&self.stationary);
        moved.iter().zip(&self.stationary).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn transition_prob(&self, a: usize, b: usize) -> f64 {
        self.transition.get(a, b)
    }
}

/// Digram probabilities `p_ab = φ_a M_ab ψ_b / (λ φᵀψ)`.
pub fn pair_probs(eig: &EigenSystem, graph: &WeightedGraph) -> SparseMatrix {
    let overlap: f64 = eig.left.iter().zip(&eig.right).map(|(a, b)| a * b).sum();
    let entries = graph
        .matrix()
        .triplets()
        .map(|(a, b, w)| (a, b, eig.left[a] * w * eig.right[b] / (eig.lambda * overlap)))
        .collect();
    SparseMatrix::from_triplets(graph.size(), entries)
}

/// Probability of walking `path` under the chain, `Π S_{γᵢγᵢ₊₁}`.
pub fn path_prob(coder: &MarkovCoder, path: &[usize]) -> Result<f64, SpectralError> {
    let mut prob = 1.0;
    for (step, pair) in path.windows(2).enumerate() {
        let s = coder.transition_prob(pair[0], pair[1]);
        if s == 0.0 {
            return Err(SpectralError::ForbiddenPath { step });
        }
        prob *= s;
    }
    Ok(prob)
}

/// Closed form `(Π M_{γᵢγᵢ₊₁}) ψ_{γ_k} / (λ^k ψ_{γ_0})`; for 0/1 matrices
/// this depends only on the endpoints and the length.
pub fn path_prob_closed_form(graph: &WeightedGraph, eig: &EigenSystem, path: &[usize]) -> Result<f64, SpectralError> {
    let Some((&first, &last)) = path.first().zip(path.last()) else {
        return Ok(1.0);
    };
    let mut weight = 1.0;
    for (step, pair) in path.windows(2).enumerate() {
        let w = graph.weight(pair[0], pair[1]);
        if w == 0.0 {
            return Err(SpectralError::ForbiddenPath { step });
        }
        weight *= w;
    }
    let k = path.len().saturating_sub(1) as i32;
    Ok(weight * eig.right[last] / (eig.lambda.powi(k) * eig.right[first]))
}

/// Flat key-value report of a solved graph.
pub fn format_report(graph: &WeightedGraph, eig: &EigenSystem, coder: &MarkovCoder) -> String {
    let join = |v: &[f64]| v.iter().map(|x| format!("{x:.15e}")).collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    out.push_str(&format!("size = {}\n", graph.size()));
    out.push_str(&format!("labels = {}\n", graph.labels().join(" ")));
    out.push_str(&format!("lambda = {:.15e}\n", eig.lambda));
    out.push_str(&format!("entropy_bits = {:.15e}\n", coder.entropy_bits));
    out.push_str(&format!("residual = {:.3e}\n", eig.residual));
    out.push_str(&format!("left = {}\n", join(&eig.left)));
    out.push_str(&format!("right = {}\n", join(&eig.right)));
    out.push_str(&format!("stationary = {}\n", join(&coder.stationary)));
    for a in 0..coder.size() {
        let row: Vec<f64> = (0..coder.size()).map(|b| coder.transition_prob(a, b)).collect();
        out.push_str(&format!("transition[{a}] = {}\n", join(&row)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::eigen::{dominant_eigs, DEFAULT_TOL};
    use super::*;
    use crate::rng::SplitMix64;

    fn solve(rows: &[Vec<f64>]) -> (WeightedGraph, EigenSystem, MarkovCoder) {
        let g = WeightedGraph::from_weights((0..rows.len()).map(|i| i.to_string()).collect(), rows).unwrap();
        let e = dominant_eigs(&g, DEFAULT_TOL).unwrap();
        let c = merw_coder(&g, &e);
        (g, e, c)
    }

    #[test]
    fn fibonacci_chain() {
        let (g, e, c) = solve(&[vec![1.0, 1.0], vec![1.0, 0.0]]);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        // ψ ∝ (φ, 1) gives S = [[1/φ, 1/φ²], [1, 0]], p ∝ (φ², 1)
        assert!((c.transition_prob(0, 0) - 1.0 / phi).abs() < 1e-12);
        assert!((c.transition_prob(0, 1) - 1.0 / (phi * phi)).abs() < 1e-12);
        assert!((c.transition_prob(1, 0) - 1.0).abs() < 1e-12);
        assert_eq!(c.transition_prob(1, 1), 0.0);
        let z = phi * phi + 1.0;
        assert!((c.stationary[0] - phi * phi / z).abs() < 1e-12);
        assert!(c.stationarity_error() < 1e-12);
        let pairs = pair_probs(&e, &g);
        assert_eq!(pairs.get(1, 1), 0.0);
        for (a, b, v) in pairs.triplets() {
            assert!((v - c.stationary[a] * c.transition_prob(a, b)).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_two_state() {
        let (g, e, c) = solve(&[vec![1.0; 2], vec![1.0; 2]]);
        for a in 0..2 {
            assert!((c.stationary[a] - 0.5).abs() < 1e-12);
            for b in 0..2 {
                assert!((c.transition_prob(a, b) - 0.5).abs() < 1e-12);
            }
        }
        let pairs = pair_probs(&e, &g);
        assert!(pairs.triplets().all(|(_, _, v)| (v - 0.25).abs() < 1e-12));
    }

    #[test]
    fn empty_path_and_forbidden_step() {
        let (g, e, c) = solve(&[vec![1.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(path_prob(&c, &[]).unwrap(), 1.0);
        assert_eq!(path_prob(&c, &[1]).unwrap(), 1.0);
        assert!(matches!(path_prob(&c, &[0, 1, 1]), Err(SpectralError::ForbiddenPath { step: 1 })));
        assert!(path_prob_closed_form(&g, &e, &[1, 1]).is_err());
    }

    #[test]
    fn fibonacci_equal_paths_equal_probability() {
        let (g, e, c) = solve(&[vec![1.0, 1.0], vec![1.0, 0.0]]);
        let a = path_prob(&c, &[0, 1, 0, 0, 0]).unwrap();
        let b = path_prob(&c, &[0, 0, 1, 0, 0]).unwrap();
        let d = path_prob(&c, &[0, 0, 0, 0, 0]).unwrap();
        assert!((a - b).abs() < 1e-15 && (a - d).abs() < 1e-15);
        assert!((a - path_prob_closed_form(&g, &e, &[0, 0, 0, 0, 0]).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn symmetric_weights_stationary_is_psi_squared() {
        let (_, e, c) = solve(&[vec![0.5, 2.0, 0.0], vec![2.0, 0.0, 1.0], vec![0.0, 1.0, 3.0]]);
        for (p, psi) in c.stationary.iter().zip(&e.right) {
            assert!((p - psi * psi).abs() < 1e-9);
        }
    }

    #[test]
    fn digram_frequencies_match_simulated_walk() {
        let (g, e, c) = solve(&[vec![1.0, 1.0], vec![1.0, 0.0]]);
        let pairs = pair_probs(&e, &g);
        let mut rng = SplitMix64::new(11);
        let steps = 1_000_000;
        let mut counts = [[0usize; 2]; 2];
        let mut state = 0usize;
        for _ in 0..steps {
            let next = if rng.next_f64() < c.transition_prob(state, 0) { 0 } else { 1 };
            counts[state][next] += 1;
            state = next;
        }
        for a in 0..2 {
            for b in 0..2 {
                let p = pairs.get(a, b);
                let freq = counts[a][b] as f64 / steps as f64;
                // Markov-chain correlation inflates the binomial variance; 3σ
                // with a 2x allowance on σ.
                let sigma = (p * (1.0 - p) / steps as f64).sqrt().max(1e-12) * 2.0;
                assert!((freq - p).abs() <= 3.0 * sigma, "p_{a}{b}: {freq} vs {p}");
            }
        }
    }

    #[test]
    fn report_has_keys() {
        let (g, e, c) = solve(&[vec![1.0, 1.0], vec![1.0, 0.0]]);
        let text = format_report(&g, &e, &c);
        assert!(text.contains("lambda = 1.618033988749"));
        assert!(text.contains("entropy_bits = "));
        assert!(text.contains("transition[1] = "));
    }
}
