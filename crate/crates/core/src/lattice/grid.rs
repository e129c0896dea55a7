//! Rectangular valuations, boundary modes, constraint scanning and the text
//! file format:
//!
//! ```text
//! m rows cols alphabet
//! 0100
//! 0010
//! ```
//!
//! Symbols are written `0-9` then `a-z`. Lines starting with `#` are
//! comments.

use std::fmt;
use std::str::FromStr;

use super::model::{Coord, LatticeModel, Pattern};
use super::LatticeError;

/// How cells outside a finite grid are treated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Outside cells are absent: patterns reaching outside never match.
    #[default]
    Free,
    /// Outside cells hold the neutral symbol.
    Zero,
    /// Torus.
    Cyclic,
}

impl FromStr for Boundary {
    type Err = LatticeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "free" => Ok(Boundary::Free),
            "zero" => Ok(Boundary::Zero),
            "cyclic" => Ok(Boundary::Cyclic),
            _ => Err(LatticeError::InvalidModel(format!("unknown boundary mode `{s}`"))),
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Free => "free",
            Boundary::Zero => "zero",
            Boundary::Cyclic => "cyclic",
        })
    }
}

pub const MAX_TEXT_ALPHABET: u8 = 36;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grid {
    dim: usize,
    rows: usize,
    cols: usize,
    alphabet: u8,
    cells: Vec<u8>,
}

impl Grid {
    pub fn new(dim: usize, rows: usize, cols: usize, alphabet: u8) -> Self {
        Grid { dim, rows, cols, alphabet, cells: vec![0; rows * cols] }
    }

    /// Neutral-filled grid shaped for the model.
    pub fn for_model(model: &LatticeModel, rows: usize, cols: usize) -> Self {
        let mut g = Grid::new(model.dim(), rows, cols, model.alphabet());
        g.cells.fill(model.neutral().unwrap_or(0));
        g
    }

    pub fn from_cells(dim: usize, rows: usize, cols: usize, alphabet: u8, cells: Vec<u8>) -> Result<Self, LatticeError> {
        if cells.len() != rows * cols || cells.iter().any(|&s| s >= alphabet) {
            return Err(LatticeError::InvalidRegion("cell data does not match grid shape".into()));
        }
        Ok(Grid { dim, rows, cols, alphabet, cells })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn alphabet(&self) -> u8 {
        self.alphabet
    }
    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.cells[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, s: u8) {
        self.cells[r * self.cols + c] = s;
    }

    /// Symbol at an arbitrary coordinate under a boundary mode.
    pub fn lookup(&self, at: Coord, boundary: Boundary, neutral: u8) -> Option<u8> {
        self.lookup_axes(at, boundary, boundary, neutral)
    }

    /// As [`Grid::lookup`] with separate modes across rows and columns;
    /// `(Cyclic, Zero)` is a cylinder whose rows wrap.
    pub fn lookup_axes(&self, at: Coord, rows: Boundary, cols: Boundary, neutral: u8) -> Option<u8> {
        let r = wrap_axis(at.0, self.rows, rows)?;
        let c = wrap_axis(at.1, self.cols, cols)?;
        match (r, c) {
            (Some(r), Some(c)) => Some(self.get(r, c)),
            _ => Some(neutral),
        }
    }

    /// Whether no forbidden pattern matches with a cell at `(r, c)`.
    pub fn allows_at(&self, model: &LatticeModel, boundary: Boundary, r: usize, c: usize) -> bool {
        self.allows_at_axes(model, boundary, boundary, r, c)
    }

    pub fn allows_at_axes(&self, model: &LatticeModel, rows: Boundary, cols: Boundary, r: usize, c: usize) -> bool {
        let neutral = model.neutral().unwrap_or(0);
        model.allows_at((r as i32, c as i32), |y| self.lookup_axes(y, rows, cols, neutral))
    }

    /// First cell, in row-major order, taking part in a forbidden pattern.
    pub fn first_violation(&self, model: &LatticeModel, boundary: Boundary) -> Option<Coord> {
        self.first_violation_axes(model, boundary, boundary)
    }

    pub fn first_violation_axes(&self, model: &LatticeModel, rows: Boundary, cols: Boundary) -> Option<Coord> {
        (0..self.rows)
            .flat_map(|r| (0..self.cols).map(move |c| (r, c)))
            .find(|&(r, c)| !self.allows_at_axes(model, rows, cols, r, c))
            .map(|(r, c)| (r as i32, c as i32))
    }

    pub fn scan(&self, model: &LatticeModel, boundary: Boundary) -> Result<(), LatticeError> {
        self.scan_axes(model, boundary, boundary)
    }

    pub fn scan_axes(&self, model: &LatticeModel, rows: Boundary, cols: Boundary) -> Result<(), LatticeError> {
        if self.alphabet != model.alphabet() || self.dim != model.dim() || (self.dim == 1 && self.rows > 1) {
            return Err(LatticeError::InvalidModel(format!("grid does not match model {}", model.name())));
        }
        match self.first_violation_axes(model, rows, cols) {
            None => Ok(()),
            Some(at) => Err(LatticeError::ConstraintViolation { at }),
        }
    }

    pub fn to_pattern(&self) -> Pattern {
        (0..self.rows)
            .flat_map(|r| (0..self.cols).map(move |c| ((r as i32, c as i32), self.get(r, c))))
            .collect()
    }

    pub fn count_symbol(&self, s: u8) -> usize {
        self.cells.iter().filter(|&&x| x == s).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {} {}\n", self.dim, self.rows, self.cols, self.alphabet);
        for r in 0..self.rows {
            out.extend(self.cells[r * self.cols..(r + 1) * self.cols].iter().map(|&s| symbol_char(s)));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, LatticeError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or(LatticeError::Parse { line: 1, msg: "missing header".into() })?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| LatticeError::Parse { line: hl, msg: format!("bad number `{t}`") }))
            .collect::<Result<_, _>>()?;
        let &[dim, rows, cols, alphabet] = nums.as_slice() else {
            return Err(LatticeError::Parse { line: hl, msg: "header needs `m rows cols alphabet`".into() });
        };
        if !(1..=2).contains(&dim) || !(1..=MAX_TEXT_ALPHABET as usize).contains(&alphabet) {
            return Err(LatticeError::Parse { line: hl, msg: "unsupported dimension or alphabet".into() });
        }
        let mut cells = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let (ln, line) = lines.next().ok_or(LatticeError::Parse { line: hl + r + 1, msg: "missing row".into() })?;
            let row: Vec<u8> = line
                .chars()
                .map(|ch| match char_symbol(ch) {
                    Some(s) if (s as usize) < alphabet => Ok(s),
                    _ => Err(LatticeError::Parse { line: ln, msg: format!("bad symbol `{ch}`") }),
                })
                .collect::<Result<_, _>>()?;
            if row.len() != cols {
                return Err(LatticeError::Parse { line: ln, msg: format!("expected {cols} symbols, got {}", row.len()) });
            }
            cells.extend(row);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(LatticeError::Parse { line: ln, msg: "trailing data".into() });
        }
        Ok(Grid { dim, rows, cols, alphabet: alphabet as u8, cells })
    }
}

/// `None`: absent. `Some(None)`: neutral. `Some(Some(i))`: index `i`.
fn wrap_axis(i: i32, len: usize, mode: Boundary) -> Option<Option<usize>> {
    if (0..len as i32).contains(&i) {
        return Some(Some(i as usize));
    }
    match mode {
        Boundary::Free => None,
        Boundary::Zero => Some(None),
        Boundary::Cyclic => Some(Some(i.rem_euclid(len as i32) as usize)),
    }
}

fn symbol_char(s: u8) -> char {
    char::from_digit(s as u32, MAX_TEXT_ALPHABET as u32).expect("symbol fits the text alphabet")
}

fn char_symbol(c: char) -> Option<u8> {
    c.to_digit(MAX_TEXT_ALPHABET as u32).filter(|_| !c.is_ascii_uppercase()).map(|d| d as u8)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_roundtrip() {
        let mut g = Grid::new(2, 2, 3, 2);
        g.set(0, 1, 1);
        g.set(1, 2, 1);
        let text = g.to_text();
        assert_eq!(text, "2 2 3 2\n010\n001\n");
        assert_eq!(Grid::from_text(&text).unwrap(), g);
        assert_eq!(Grid::from_text("# c\n2 1 2 2\n\n01\n").unwrap().get(0, 1), 1);
    }

    #[test]
    fn text_errors_carry_lines() {
        assert!(matches!(Grid::from_text("2 2 2 2\n01\n0x\n"), Err(LatticeError::Parse { line: 3, .. })));
        assert!(matches!(Grid::from_text("2 2 2 2\n01\n"), Err(LatticeError::Parse { .. })));
        assert!(matches!(Grid::from_text("2 1 2 2\n012\n"), Err(LatticeError::Parse { line: 2, .. })));
        assert!(Grid::from_text("2 1 2 2\n01\n11\n").is_err());
        assert!(Grid::from_text("2 1 2\n01\n").is_err());
    }

    #[test]
    fn boundary_modes_scan_differently() {
        let hs = LatticeModel::hard_square();
        let mut g = Grid::for_model(&hs, 3, 3);
        g.set(0, 0, 1);
        g.set(0, 2, 1);
        assert!(g.scan(&hs, Boundary::Free).is_ok());
        assert!(g.scan(&hs, Boundary::Zero).is_ok());
        assert!(matches!(g.scan(&hs, Boundary::Cyclic), Err(LatticeError::ConstraintViolation { at: (0, 0) })));
        g.set(1, 2, 1);
        assert!(g.scan(&hs, Boundary::Free).is_err());
    }

    #[test]
    fn cylinder_wraps_rows_only() {
        let hs = LatticeModel::hard_square();
        let mut g = Grid::for_model(&hs, 3, 3);
        g.set(0, 0, 1);
        g.set(0, 2, 1);
        assert!(g.scan_axes(&hs, Boundary::Cyclic, Boundary::Zero).is_ok());
        assert!(g.scan(&hs, Boundary::Cyclic).is_err());
        g.set(2, 0, 1);
        assert!(g.scan_axes(&hs, Boundary::Cyclic, Boundary::Zero).is_err());
    }

    #[test]
    fn one_wide_cyclic_strip_forbids_ones() {
        let hs = LatticeModel::hard_square();
        let mut g = Grid::for_model(&hs, 1, 3);
        g.set(0, 1, 1);
        assert!(g.scan(&hs, Boundary::Free).is_ok());
        assert!(g.scan(&hs, Boundary::Cyclic).is_err());
    }
}
