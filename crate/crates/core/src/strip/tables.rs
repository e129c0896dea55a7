//! Per-row factorization of the column chain: `S_uv = Π_j q(v_j | u, v_<j)`.

use super::model::StripModel;
use super::StripError;

/// Limit on stored conditionals (`columns × 2^n`).
pub const MAX_TABLE_ENTRIES: usize = 1 << 26;

/// For each previous column `u` and each prefix of rows `0..j` of the next
/// column, the probability that row `j` is 1.
///
/// Prefixes are stored as a binary trie in heap order: the node for rows
/// `0..j` with values `prefix` (bit `i` = row `i`) sits at `2^j | prefix`.
#[derive(Clone, Debug)]
pub struct ConditionalTables {
    width: usize,
    probs: Vec<f64>,
}

impl ConditionalTables {
    /// `q(v_j = 1 | u, v_<j) = W₁ / (W₀ + W₁)` with `W_c` the `ψ`-weight of
    /// the valid columns following `u` that start with `v_<j · c`.
    pub fn build(model: &StripModel) -> Result<Self, StripError> {
        let n = model.width();
        let nodes = 1usize << n;
        let cols = model.columns();
        if cols.len().saturating_mul(nodes) > MAX_TABLE_ENTRIES {
            return Err(StripError::TooWide { width: n });
        }
        let psi = &model.eig().right;
        let mut probs = vec![0.0; cols.len() * nodes];
        let mut weight = vec![0.0f64; 2 * nodes];
        for (a, &u) in cols.iter().enumerate() {
            weight.fill(0.0);
            for (b, &v) in cols.iter().enumerate() {
                if model.adjacent(u, v) {
                    weight[nodes | v as usize] = psi[b];
                }
            }
            for node in (1..nodes).rev() {
                weight[node] = weight[child(node, 0)] + weight[child(node, 1)];
            }
            let row = &mut probs[a * nodes..(a + 1) * nodes];
            for node in 1..nodes {
                if weight[node] > 0.0 {
                    row[node] = weight[child(node, 1)] / weight[node];
                }
            }
        }
        Ok(ConditionalTables { width: n, probs })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// `q(v_row = 1 | u, prefix)`; `prefix` holds rows `0..row`.
    pub fn q_one(&self, u: usize, row: usize, prefix: u32) -> f64 {
        let nodes = 1usize << self.width;
        self.probs[u * nodes + ((1usize << row) | prefix as usize)]
    }

    /// `Π_j q(v_j | u, v_<j)`.
    pub fn chain_prob(&self, u: usize, v: u32) -> f64 {
        (0..self.width)
            .map(|j| {
                let q = self.q_one(u, j, v & ((1 << j) - 1));
                if v >> j & 1 == 1 {
                    q
                } else {
                    1.0 - q
                }
            })
            .product()
    }
}

fn child(node: usize, c: usize) -> usize {
    let depth = usize::BITS - 1 - node.leading_zeros();
    let prefix = node ^ (1 << depth);
    (1 << (depth + 1)) | prefix | (c << depth)
}
