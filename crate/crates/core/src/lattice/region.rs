use std::collections::BTreeSet;

use super::model::{add, Coord, LatticeModel};

/// Finite set of lattice cells, iterated in row-major order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Region {
    cells: BTreeSet<Coord>,
}

impl Region {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `rows × cols` with the top-left cell at the origin.
    pub fn rect(rows: usize, cols: usize) -> Self {
        Self::rect_at((0, 0), rows, cols)
    }

    pub fn rect_at(top_left: Coord, rows: usize, cols: usize) -> Self {
        (0..rows as i32).flat_map(|r| (0..cols as i32).map(move |c| add(top_left, (r, c)))).collect()
    }

    /// `side × side` square containing the origin, centered for odd sides.
    pub fn square(side: usize) -> Self {
        let lo = -((side as i32 - 1) / 2);
        Self::rect_at((lo, lo), side, side)
    }

    /// `k`-block for the model's dimension: `1 × k` or `k × k`.
    pub fn block(model: &LatticeModel, k: usize) -> Self {
        if model.dim() == 1 {
            Self::rect(1, k)
        } else {
            Self::rect(k, k)
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, c: Coord) -> bool {
        self.cells.contains(&c)
    }

    pub fn iter(&self) -> impl Iterator<Item = Coord> + '_ {
        self.cells.iter().copied()
    }

    pub fn insert(&mut self, c: Coord) {
        self.cells.insert(c);
    }

    pub fn remove(&mut self, c: Coord) {
        self.cells.remove(&c);
    }

    pub fn union(&self, other: &Region) -> Region {
        self.cells.union(&other.cells).copied().collect()
    }

    pub fn difference(&self, other: &Region) -> Region {
        self.cells.difference(&other.cells).copied().collect()
    }

    pub fn is_subset(&self, other: &Region) -> bool {
        self.cells.is_subset(&other.cells)
    }

    /// `A⁻ = {x ∈ A : N_x ⊆ A}`
    pub fn interior(&self, model: &LatticeModel) -> Region {
        let n = model.neighborhood();
        self.iter().filter(|&x| n.iter().all(|&d| self.contains(add(x, d)))).collect()
    }

    /// `A° = A ∖ A⁻`
    pub fn boundary(&self, model: &LatticeModel) -> Region {
        self.difference(&self.interior(model))
    }

    /// `A⁺ = ∪_{x∈A} N_x`
    pub fn thicken(&self, model: &LatticeModel) -> Region {
        let n = model.neighborhood();
        self.iter().flat_map(|x| n.iter().map(move |&d| add(x, d))).collect()
    }
}

impl FromIterator<Coord> for Region {
    fn from_iter<I: IntoIterator<Item = Coord>>(iter: I) -> Self {
        Region { cells: iter.into_iter().collect() }
    }
}
