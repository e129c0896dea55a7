use std::collections::HashMap;

use super::StripError;
use crate::lattice::{Boundary, LatticeModel};
use crate::spectral::{dominant_eigs, merw_coder, EigenSystem, MarkovCoder, SparseMatrix, WeightedGraph, DEFAULT_TOL};

/// Column alphabet limit.
pub const MAX_COLUMN_SYMBOLS: usize = 1 << 14;
/// Transfer-matrix nonzero limit.
pub const MAX_TRANSFER_EDGES: usize = 1 << 24;

/// Two-dimensional binary models the strip reduction supports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StripBase {
    HardSquare,
    Unconstrained,
}

impl StripBase {
    pub fn from_model(model: &LatticeModel) -> Result<Self, StripError> {
        if model.dim() == 2 && model.alphabet() == 2 {
            if model.forbidden() == LatticeModel::hard_square().forbidden() {
                return Ok(StripBase::HardSquare);
            }
            if model.forbidden().is_empty() {
                return Ok(StripBase::Unconstrained);
            }
        }
        Err(StripError::UnsupportedModel(model.name().to_string()))
    }

    pub fn model(self) -> LatticeModel {
        match self {
            StripBase::HardSquare => LatticeModel::hard_square(),
            StripBase::Unconstrained => LatticeModel::unconstrained(2, 2),
        }
    }

    /// Known entropy per node of the unrestricted plane.
    pub fn reference_entropy(self) -> f64 {
        match self {
            StripBase::HardSquare => crate::HARD_SQUARE_ENTROPY,
            StripBase::Unconstrained => 1.0,
        }
    }

    fn column_ok(self, v: u32, width: usize, cyclic: bool) -> bool {
        match self {
            StripBase::Unconstrained => true,
            StripBase::HardSquare => {
                let wrap = cyclic && v & 1 == 1 && (v >> (width - 1)) & 1 == 1;
                v & (v >> 1) == 0 && !wrap
            }
        }
    }

    fn adjacent_ok(self, u: u32, v: u32) -> bool {
        match self {
            StripBase::Unconstrained => true,
            StripBase::HardSquare => u & v == 0,
        }
    }
}

/// Width-`n` strip of a 2D model solved as a 1D model over column symbols.
/// Bit `j` of a column symbol is the value in row `j`.
#[derive(Clone, Debug)]
pub struct StripModel {
    base: StripBase,
    width: usize,
    boundary: Boundary,
    columns: Vec<u32>,
    index: HashMap<u32, usize>,
    graph: WeightedGraph,
    eig: EigenSystem,
    chain: MarkovCoder,
}

impl StripModel {
    pub fn build(base: StripBase, width: usize, boundary: Boundary) -> Result<Self, StripError> {
        if boundary == Boundary::Free {
            return Err(StripError::InvalidBoundary(boundary));
        }
        if width == 0 || width > 30 {
            return Err(StripError::TooWide { width });
        }
        let cyclic = boundary == Boundary::Cyclic;
        let mut columns = Vec::new();
        for v in 0..1u32 << width {
            if base.column_ok(v, width, cyclic) {
                columns.push(v);
                if columns.len() > MAX_COLUMN_SYMBOLS {
                    return Err(StripError::TooWide { width });
                }
            }
        }
        let mut entries = Vec::new();
        for (a, &u) in columns.iter().enumerate() {
            for (b, &v) in columns.iter().enumerate() {
                if base.adjacent_ok(u, v) {
                    entries.push((a, b, 1.0));
                }
            }
            if entries.len() > MAX_TRANSFER_EDGES {
                return Err(StripError::TooWide { width });
            }
        }
        let labels = columns.iter().map(|&v| column_label(v, width)).collect();
        let graph = WeightedGraph::new(labels, SparseMatrix::from_triplets(columns.len(), entries))?;
        let eig = dominant_eigs(&graph, DEFAULT_TOL)?;
        let chain = merw_coder(&graph, &eig);
        let index = columns.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        Ok(StripModel { base, width, boundary, columns, index, graph, eig, chain })
    }

    pub fn from_model(model: &LatticeModel, width: usize, boundary: Boundary) -> Result<Self, StripError> {
        Self::build(StripBase::from_model(model)?, width, boundary)
    }

    pub fn base(&self) -> StripBase {
        self.base
    }
    pub fn width(&self) -> usize {
        self.width
    }
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }
    pub fn columns(&self) -> &[u32] {
        &self.columns
    }
    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }
    pub fn eig(&self) -> &EigenSystem {
        &self.eig
    }
    pub fn chain(&self) -> &MarkovCoder {
        &self.chain
    }

    pub fn column_index(&self, v: u32) -> Option<usize> {
        self.index.get(&v).copied()
    }

    /// Index of the all-zero column, which every supported base admits.
    pub fn zero_column(&self) -> usize {
        self.index[&0]
    }

    pub fn adjacent(&self, u: u32, v: u32) -> bool {
        self.base.adjacent_ok(u, v)
    }

    /// Cyclic widths 1 and 2 make a row its own or a doubled neighbor.
    pub fn degenerate(&self) -> bool {
        self.boundary == Boundary::Cyclic && self.width <= 2
    }

    /// `lg λ / n` bits per node.
    pub fn capacity(&self) -> f64 {
        self.eig.lambda.log2() / self.width as f64
    }

    /// Stationary probability that row `j` holds a 1.
    pub fn row_marginals(&self) -> Vec<f64> {
        (0..self.width)
            .map(|j| {
                self.columns
                    .iter()
                    .zip(&self.chain.stationary)
                    .filter(|(&v, _)| v >> j & 1 == 1)
                    .map(|(_, p)| p)
                    .sum()
            })
            .collect()
    }

    /// First-column law `p(v) = S_{0v}`.
    pub fn first_column_distribution(&self) -> Vec<f64> {
        let z = self.zero_column();
        (0..self.columns.len()).map(|v| self.chain.transition_prob(z, v)).collect()
    }
}

/// Rows top to bottom, e.g. `0100`.
pub fn column_label(v: u32, width: usize) -> String {
    (0..width).map(|j| if v >> j & 1 == 1 { '1' } else { '0' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn width_one_zero_is_fibonacci() {
        let m = StripModel::build(StripBase::HardSquare, 1, Boundary::Zero).unwrap();
        assert_eq!(m.columns(), &[0, 1]);
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((m.capacity() - golden.log2()).abs() < 1e-12);
    }

    #[test]
    fn width_two_zero() {
        let m = StripModel::build(StripBase::HardSquare, 2, Boundary::Zero).unwrap();
        assert_eq!(m.columns(), &[0, 1, 2]);
        assert!((m.eig().lambda - (1.0 + 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn degenerate_cyclic_widths() {
        let one = StripModel::build(StripBase::HardSquare, 1, Boundary::Cyclic).unwrap();
        assert_eq!(one.columns(), &[0]);
        assert_eq!(one.capacity(), 0.0);
        assert!(one.degenerate());
        let two = StripModel::build(StripBase::HardSquare, 2, Boundary::Cyclic).unwrap();
        assert!(two.degenerate());
        assert!(!StripModel::build(StripBase::HardSquare, 3, Boundary::Cyclic).unwrap().degenerate());
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(StripModel::build(StripBase::HardSquare, 4, Boundary::Free).is_err());
        assert!(StripModel::build(StripBase::HardSquare, 0, Boundary::Zero).is_err());
        assert!(StripModel::build(StripBase::Unconstrained, 16, Boundary::Zero).is_err());
        assert!(StripBase::from_model(&LatticeModel::k_model(1)).is_err());
    }

    #[test]
    fn unconstrained_capacity_is_one() {
        let m = StripModel::build(StripBase::Unconstrained, 3, Boundary::Cyclic).unwrap();
        assert!((m.capacity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn first_column_row_sums_to_one() {
        let m = StripModel::build(StripBase::HardSquare, 5, Boundary::Cyclic).unwrap();
        assert!((m.first_column_distribution().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
