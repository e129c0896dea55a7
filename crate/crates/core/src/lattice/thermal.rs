//! Single-site thermalization: a symmetric chain whose stationary law is
//! uniform over valid valuations of a finite grid.

use std::collections::HashMap;

use super::count::enumerate_valuations;
use super::grid::{Boundary, Grid};
use super::model::LatticeModel;
use super::region::Region;
use super::LatticeError;
use crate::rng::SplitMix64;
use crate::spectral::{strongly_connected_components, SparseMatrix};

pub const DEFAULT_WARMUP_SWEEPS: usize = 5;
/// State-space limit for the explicit chain matrix.
pub const MAX_CHAIN_STATES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThermalConfig {
    pub boundary: Boundary,
    /// Warm-up length in sweeps of `|A|` moves.
    pub warmup_sweeps: usize,
    /// Moves between emitted samples; 0 means one sweep.
    pub spacing: usize,
}

impl Default for ThermalConfig {
    fn default() -> Self {
        ThermalConfig { boundary: Boundary::Free, warmup_sweeps: DEFAULT_WARMUP_SWEEPS, spacing: 0 }
    }
}

/// Chain state. Each move picks a uniform cell and a uniform different
/// symbol and applies it when the result stays valid.
#[derive(Clone, Debug)]
pub struct Thermalizer {
    model: LatticeModel,
    boundary: Boundary,
    grid: Grid,
    rng: SplitMix64,
}

impl Thermalizer {
    /// Starts from the all-neutral grid.
    pub fn new(model: &LatticeModel, rows: usize, cols: usize, boundary: Boundary, seed: u64) -> Result<Self, LatticeError> {
        if model.neutral().is_none() {
            return Err(LatticeError::InvalidModel("thermalization needs a neutral symbol".into()));
        }
        if rows * cols == 0 || (model.dim() == 1 && rows != 1) {
            return Err(LatticeError::InvalidRegion(format!("{rows}x{cols} grid for {}", model.name())));
        }
        let grid = Grid::for_model(model, rows, cols);
        grid.scan(model, boundary)?;
        Ok(Thermalizer { model: model.clone(), boundary, grid, rng: SplitMix64::new(seed) })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn cells(&self) -> usize {
        self.grid.rows() * self.grid.cols()
    }

    /// One move; returns whether the grid changed.
    pub fn step(&mut self) -> bool {
        let m = self.model.alphabet() as u64;
        if m < 2 {
            return false;
        }
        let i = self.rng.below(self.cells() as u64) as usize;
        let (r, c) = (i / self.grid.cols(), i % self.grid.cols());
        let old = self.grid.get(r, c);
        let mut new = self.rng.below(m - 1) as u8;
        if new >= old {
            new += 1;
        }
        self.grid.set(r, c, new);
        if self.grid.allows_at(&self.model, self.boundary, r, c) {
            true
        } else {
            self.grid.set(r, c, old);
            false
        }
    }

    pub fn run(&mut self, moves: usize) {
        for _ in 0..moves {
            self.step();
        }
    }

    pub fn sweeps(&mut self, sweeps: usize) {
        self.run(sweeps * self.cells());
    }
}

/// `count` samples after warm-up, spaced per the config.
pub fn thermalize(
    model: &LatticeModel,
    rows: usize,
    cols: usize,
    config: ThermalConfig,
    count: usize,
    seed: u64,
) -> Result<Vec<Grid>, LatticeError> {
    let mut t = Thermalizer::new(model, rows, cols, config.boundary, seed)?;
    t.sweeps(config.warmup_sweeps);
    let spacing = if config.spacing == 0 { t.cells() } else { config.spacing };
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        t.run(spacing);
        out.push(t.grid().clone());
    }
    Ok(out)
}

/// Explicit transition matrix of one thermalization move.
#[derive(Clone, Debug)]
pub struct ThermalChain {
    pub states: Vec<Grid>,
    pub matrix: SparseMatrix,
}

impl ThermalChain {
    pub fn build(model: &LatticeModel, rows: usize, cols: usize, boundary: Boundary) -> Result<Self, LatticeError> {
        let candidates = enumerate_valuations(&Region::rect(rows, cols), model, &super::model::Pattern::new())?;
        let mut states = Vec::new();
        for v in candidates {
            let cells = v.iter().map(|(_, s)| s).collect();
            let g = Grid::from_cells(model.dim(), rows, cols, model.alphabet(), cells)?;
            if g.first_violation(model, boundary).is_none() {
                states.push(g);
            }
            if states.len() > MAX_CHAIN_STATES {
                return Err(LatticeError::TooLarge);
            }
        }
        let index: HashMap<&[u8], usize> = states.iter().enumerate().map(|(i, g)| (g.cells(), i)).collect();
        let n = rows * cols;
        let m = model.alphabet() as usize;
        let p_move = 1.0 / (n * (m - 1).max(1)) as f64;
        let mut entries = Vec::new();
        for (i, g) in states.iter().enumerate() {
            let mut stay = 1.0;
            for cell in 0..n {
                for s in 0..m as u8 {
                    if s == g.cells()[cell] {
                        continue;
                    }
                    let mut h = g.clone();
                    h.set(cell / cols, cell % cols, s);
                    if h.allows_at(model, boundary, cell / cols, cell % cols) {
                        entries.push((i, index[h.cells()], p_move));
                        stay -= p_move;
                    }
                }
            }
            entries.push((i, i, stay));
        }
        Ok(ThermalChain { matrix: SparseMatrix::from_triplets(states.len(), entries), states })
    }

    /// Largest deviation of any row or column sum from 1.
    pub fn stochastic_error(&self) -> f64 {
        let n = self.states.len();
        let ones = vec![1.0; n];
        let rows = self.matrix.mul_vec(&ones);
        let cols = self.matrix.vec_mul(&ones);
        rows.iter().chain(&cols).map(|s| (s - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn is_irreducible(&self) -> bool {
        strongly_connected_components(&self.matrix).len() == 1
    }
}
