use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::LatticeError;

/// `(row, col)`. One-dimensional models live on row 0.
pub type Coord = (i32, i32);

pub fn add(a: Coord, b: Coord) -> Coord {
    (a.0 + b.0, a.1 + b.1)
}

pub fn sub(a: Coord, b: Coord) -> Coord {
    (a.0 - b.0, a.1 - b.1)
}

/// Partial valuation with finite shape.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    cells: BTreeMap<Coord, u8>,
}

impl Pattern {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(at: Coord, symbol: u8) -> Self {
        Pattern { cells: BTreeMap::from([(at, symbol)]) }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, at: Coord) -> Option<u8> {
        self.cells.get(&at).copied()
    }

    pub fn set(&mut self, at: Coord, symbol: u8) {
        self.cells.insert(at, symbol);
    }

    pub fn with(mut self, at: Coord, symbol: u8) -> Self {
        self.set(at, symbol);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (Coord, u8)> + '_ {
        self.cells.iter().map(|(&c, &s)| (c, s))
    }

    pub fn shape(&self) -> BTreeSet<Coord> {
        self.cells.keys().copied().collect()
    }

    pub fn translate(&self, by: Coord) -> Self {
        Pattern { cells: self.cells.iter().map(|(&c, &s)| (add(c, by), s)).collect() }
    }

    /// Union, or `None` when the two disagree on a shared cell.
    pub fn union(&self, other: &Pattern) -> Option<Pattern> {
        let mut out = self.clone();
        for (c, s) in other.iter() {
            if *out.cells.entry(c).or_insert(s) != s {
                return None;
            }
        }
        Some(out)
    }

    /// Translated so the first cell in row-major order sits at the origin.
    pub fn canonical(&self) -> Self {
        match self.cells.keys().next() {
            Some(&first) => self.translate((-first.0, -first.1)),
            None => self.clone(),
        }
    }

    /// Applies a map to every coordinate.
    pub fn map_coords(&self, f: impl Fn(Coord) -> Coord) -> Self {
        Pattern { cells: self.cells.iter().map(|(&c, &s)| (f(c), s)).collect() }
    }
}

impl FromIterator<(Coord, u8)> for Pattern {
    fn from_iter<I: IntoIterator<Item = (Coord, u8)>>(iter: I) -> Self {
        Pattern { cells: iter.into_iter().collect() }
    }
}

/// Translation-invariant model on `ℤ` or `ℤ²` given by forbidden patterns,
/// stored as canonical representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeModel {
    name: String,
    dim: usize,
    alphabet: u8,
    forbidden: Vec<Pattern>,
}

impl LatticeModel {
    pub fn new(name: impl Into<String>, dim: usize, alphabet: u8, forbidden: Vec<Pattern>) -> Result<Self, LatticeError> {
        if !(1..=2).contains(&dim) {
            return Err(LatticeError::InvalidModel(format!("dimension {dim} not supported")));
        }
        if alphabet < 1 {
            return Err(LatticeError::InvalidModel("empty alphabet".into()));
        }
        for p in &forbidden {
            if p.is_empty() || p.iter().any(|(c, s)| s >= alphabet || (dim == 1 && c.0 != 0)) {
                return Err(LatticeError::InvalidModel(format!("bad forbidden pattern {p:?}")));
            }
        }
        let mut canon: Vec<Pattern> = forbidden.iter().map(Pattern::canonical).collect();
        canon.sort();
        canon.dedup();
        Ok(LatticeModel { name: name.into(), dim, alphabet, forbidden: canon })
    }

    /// No two orthogonally adjacent 1s on `ℤ²`.
    pub fn hard_square() -> Self {
        let h = Pattern::new().with((0, 0), 1).with((0, 1), 1);
        let v = Pattern::new().with((0, 0), 1).with((1, 0), 1);
        Self::new("hard-square", 2, 2, vec![h, v]).expect("valid preset")
    }

    /// Binary chain where every 1 is followed by at least `k` zeros.
    pub fn k_model(k: u32) -> Self {
        let forbidden = (1..=k as i32).map(|d| Pattern::new().with((0, 0), 1).with((0, d), 1)).collect();
        Self::new(format!("k-model:{k}"), 1, 2, forbidden).expect("valid preset")
    }

    /// Binary chain without three consecutive 1s.
    pub fn no_111() -> Self {
        let p = Pattern::new().with((0, 0), 1).with((0, 1), 1).with((0, 2), 1);
        Self::new("no-111", 1, 2, vec![p]).expect("valid preset")
    }

    pub fn unconstrained(dim: usize, alphabet: u8) -> Self {
        Self::new(format!("free:{dim}:{alphabet}"), dim, alphabet, Vec::new()).expect("valid preset")
    }

    /// `hard-square`, `k-model:<k>`, `no-111`, `free:<dim>:<alphabet>`.
    pub fn preset(name: &str) -> Result<Self, LatticeError> {
        let bad = || LatticeError::UnknownPreset(name.to_string());
        match name {
            "hard-square" | "hs" => Ok(Self::hard_square()),
            "no-111" => Ok(Self::no_111()),
            _ => {
                if let Some(k) = name.strip_prefix("k-model:") {
                    return Ok(Self::k_model(k.parse().map_err(|_| bad())?));
                }
                if let Some(rest) = name.strip_prefix("free:") {
                    let (d, a) = rest.split_once(':').ok_or_else(bad)?;
                    let (d, a) = (d.parse().map_err(|_| bad())?, a.parse().map_err(|_| bad())?);
                    return Self::new(name, d, a, Vec::new());
                }
                Err(bad())
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphabet(&self) -> u8 {
        self.alphabet
    }

    pub fn forbidden(&self) -> &[Pattern] {
        &self.forbidden
    }

    /// A symbol occurring in no forbidden pattern, lowest first.
    pub fn neutral(&self) -> Option<u8> {
        (0..self.alphabet).find(|&a| self.forbidden.iter().all(|p| p.iter().all(|(_, s)| s != a)))
    }

    /// `N_0`: every cell sharing a forbidden pattern with the origin,
    /// origin included.
    pub fn neighborhood(&self) -> BTreeSet<Coord> {
        let mut out = BTreeSet::from([(0, 0)]);
        for p in &self.forbidden {
            for (anchor, _) in p.iter() {
                out.extend(p.iter().map(|(c, _)| sub(c, anchor)));
            }
        }
        out
    }

    /// Range of constraints `L`.
    pub fn range(&self) -> i32 {
        self.neighborhood().iter().map(|c| c.0.abs().max(c.1.abs())).max().unwrap_or(0)
    }

    /// True when `lookup` matches none of the forbidden patterns at any
    /// translation that places a pattern cell on `at`. Cells reported as
    /// `None` never match.
    pub fn allows_at(&self, at: Coord, lookup: impl Fn(Coord) -> Option<u8>) -> bool {
        for p in &self.forbidden {
            for (anchor, _) in p.iter() {
                let shift = sub(at, anchor);
                if p.iter().all(|(c, s)| lookup(add(c, shift)) == Some(s)) {
                    return false;
                }
            }
        }
        true
    }

    /// Whether the pattern violates no forbidden pattern fully inside it.
    pub fn is_valid(&self, f: &Pattern) -> bool {
        f.iter().all(|(c, _)| self.allows_at(c, |y| f.get(y)))
    }
}

impl fmt::Display for LatticeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hard_square_neighborhood_is_cross() {
        let hs = LatticeModel::hard_square();
        let n: Vec<Coord> = hs.neighborhood().into_iter().collect();
        assert_eq!(n, vec![(-1, 0), (0, -1), (0, 0), (0, 1), (1, 0)]);
        assert_eq!(hs.range(), 1);
        assert_eq!(hs.neutral(), Some(0));
    }

    #[test]
    fn presets_parse() {
        assert_eq!(LatticeModel::preset("k-model:3").unwrap().range(), 3);
        assert_eq!(LatticeModel::preset("no-111").unwrap().range(), 2);
        assert_eq!(LatticeModel::preset("free:2:3").unwrap().alphabet(), 3);
        assert!(LatticeModel::preset("k-model:x").is_err());
        assert!(LatticeModel::preset("ising").is_err());
    }

    #[test]
    fn canonical_forms_dedupe() {
        let a = Pattern::new().with((3, 4), 1).with((3, 5), 1);
        let m = LatticeModel::new("m", 2, 2, vec![a.clone(), a.translate((1, 1))]).unwrap();
        assert_eq!(m.forbidden().len(), 1);
        assert_eq!(m.forbidden()[0].get((0, 0)), Some(1));
    }

    #[test]
    fn validity() {
        let hs = LatticeModel::hard_square();
        assert!(hs.is_valid(&Pattern::new().with((0, 0), 1).with((1, 1), 1)));
        assert!(!hs.is_valid(&Pattern::new().with((0, 0), 1).with((1, 0), 1)));
        assert!(LatticeModel::new("bad", 1, 2, vec![Pattern::single((1, 0), 1)]).is_err());
    }
}
