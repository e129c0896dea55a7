//! Run-length limited binary chains where every 1 is followed by at least
//! `k` zeros.

use super::graph::WeightedGraph;
use super::sparse::SparseMatrix;

/// Binary entropy `h(q)` in bits.
pub fn binary_entropy(q: f64) -> f64 {
    if q <= 0.0 || q >= 1.0 {
        return 0.0;
    }
    -q * q.log2() - (1.0 - q) * (1.0 - q).log2()
}

/// Bits per symbol of the chain that writes a 1 with probability `q`
/// whenever allowed: `h(q) / (1 + kq)`.
pub fn kmodel_rate(k: u32, q: f64) -> f64 {
    binary_entropy(q) / (1.0 + k as f64 * q)
}

/// Maximum of [`kmodel_rate`] over `q`, by ternary search to `1e-12` in `q`.
/// Returns `(capacity, argmax)`.
pub fn kmodel_optimum(k: u32) -> (f64, f64) {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-12 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if kmodel_rate(k, m1) < kmodel_rate(k, m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let q = 0.5 * (lo + hi);
    (kmodel_rate(k, q), q)
}

pub fn kmodel_capacity(k: u32) -> f64 {
    kmodel_optimum(k).0
}

/// Capacity gain, in percent, from positioning `k + 1` times more precisely:
/// `100 ((k + 1) H_k − 1)`.
pub fn kmodel_benefit(k: u32) -> f64 {
    100.0 * ((k + 1) as f64 * kmodel_capacity(k) - 1.0)
}

pub fn kmodel_benefit_rounded(k: u32) -> i64 {
    kmodel_benefit(k).round() as i64
}

/// Explicit counter automaton: state `"0"` may emit a 1 (jumping to `"k"`)
/// or a 0 (staying), state `"i"` for `i ≥ 1` must emit 0 and moves to
/// `"i-1"`. For `k = 0` both symbols loop on the single state (weight 2).
pub fn kmodel_automaton(k: u32) -> WeightedGraph {
    let k = k as usize;
    let labels = (0..=k).map(|i| i.to_string()).collect();
    let mut entries = vec![(0, 0, 1.0), (0, k, 1.0)];
    entries.extend((1..=k).map(|i| (i, i - 1, 1.0)));
    WeightedGraph::new(labels, SparseMatrix::from_triplets(k + 1, entries)).expect("k-model automaton is irreducible")
}

/// The same model by blocking `k` consecutive symbols; windows of `k + 1`
/// symbols may contain at most one 1.
pub fn kmodel_blocked(k: u32) -> WeightedGraph {
    if k == 0 {
        return WeightedGraph::block_symbols(2, 1, |_| true).expect("unconstrained binary");
    }
    WeightedGraph::block_symbols(2, k as usize, |w| w.iter().filter(|&&s| s == 1).count() <= 1)
        .expect("k-model blocking is nonempty")
}
