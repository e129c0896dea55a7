//! Statistical descriptions: consistent probabilities of finite patterns.

use std::ops::Range;

use rayon::prelude::*;

use super::count::{count, enumerate_valuations};
use super::grid::Grid;
use super::model::{add, Coord, LatticeModel, Pattern};
use super::region::Region;
use super::LatticeError;

pub trait Description {
    /// `p_f`; the empty pattern has probability 1.
    fn prob(&self, f: &Pattern) -> Result<f64, LatticeError>;
}

impl<D: Description + ?Sized> Description for &D {
    fn prob(&self, f: &Pattern) -> Result<f64, LatticeError> {
        (**self).prob(f)
    }
}

/// `p_f^{A,v} = N(A, v ∪ f) / N(A, v)`.
#[derive(Clone, Debug)]
pub struct CountingDescription {
    model: LatticeModel,
    region: Region,
    clamp: Pattern,
    total: u128,
}

impl CountingDescription {
    pub fn new(model: &LatticeModel, region: &Region, clamp: &Pattern) -> Result<Self, LatticeError> {
        let total = count(region, model, clamp)?;
        if total == 0 {
            return Err(LatticeError::EmptyConditioning);
        }
        Ok(CountingDescription { model: model.clone(), region: region.clone(), clamp: clamp.clone(), total })
    }

    pub fn total(&self) -> u128 {
        self.total
    }

    pub fn region(&self) -> &Region {
        &self.region
    }
}

impl Description for CountingDescription {
    fn prob(&self, f: &Pattern) -> Result<f64, LatticeError> {
        if let Some((c, _)) = f.iter().find(|&(c, _)| !self.region.contains(c)) {
            return Err(LatticeError::PatternOutsideMargin { at: c });
        }
        let Some(joint) = self.clamp.union(f) else { return Ok(0.0) };
        Ok(count(&self.region, &self.model, &joint)? as f64 / self.total as f64)
    }
}

/// Translation-averaged pattern frequencies over a set of samples.
///
/// Every pattern is counted over the same anchor positions `x`, those where
/// the whole window `W + x` lies inside the sample, so extending a pattern
/// within `W` by one cell and summing over symbols reproduces its
/// frequency exactly.
#[derive(Clone, Debug)]
pub struct EmpiricalDescription {
    samples: Vec<Grid>,
    window: Region,
    anchors: Vec<Coord>,
}

impl EmpiricalDescription {
    pub fn new(samples: Vec<Grid>, window: Region) -> Self {
        Self::within(samples, window, 0..usize::MAX, 0..usize::MAX)
    }

    /// Restricts anchors to the given row and column ranges.
    pub fn within(samples: Vec<Grid>, window: Region, rows: Range<usize>, cols: Range<usize>) -> Self {
        let mut anchors = Vec::new();
        if let Some(first) = samples.first() {
            let (h, w) = (first.rows() as i32, first.cols() as i32);
            let fits = |x: Coord| window.iter().all(|c| {
                let (r, c) = add(c, x);
                (0..h).contains(&r) && (0..w).contains(&c)
            });
            for r in rows.start as i32..(rows.end.min(h as usize)) as i32 {
                for c in cols.start as i32..(cols.end.min(w as usize)) as i32 {
                    if fits((r, c)) {
                        anchors.push((r, c));
                    }
                }
            }
        }
        assert!(samples.iter().all(|g| samples.first().is_some_and(|f| (f.rows(), f.cols()) == (g.rows(), g.cols()))));
        EmpiricalDescription { samples, window, anchors }
    }

    /// Number of `(sample, anchor)` observations behind every frequency.
    pub fn observations(&self) -> usize {
        self.samples.len() * self.anchors.len()
    }

    /// Raw occurrence count of `f`.
    pub fn occurrences(&self, f: &Pattern) -> Result<usize, LatticeError> {
        if let Some((c, _)) = f.iter().find(|&(c, _)| !self.window.contains(c)) {
            return Err(LatticeError::PatternOutsideMargin { at: c });
        }
        let mut hits = 0;
        for g in &self.samples {
            for &x in &self.anchors {
                if f.iter().all(|(c, s)| {
                    let (r, c) = add(c, x);
                    g.get(r as usize, c as usize) == s
                }) {
                    hits += 1;
                }
            }
        }
        Ok(hits)
    }
}

impl Description for EmpiricalDescription {
    fn prob(&self, f: &Pattern) -> Result<f64, LatticeError> {
        let n = self.observations();
        if n == 0 {
            return Err(LatticeError::EmptyConditioning);
        }
        Ok(self.occurrences(f)? as f64 / n as f64)
    }
}

/// `p̌_f^A`, `p̂_f^A` over boundary valuations of one region, and their gap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub low: f64,
    pub high: f64,
    pub boundary_valuations: usize,
}

impl Bounds {
    pub fn gap(&self) -> f64 {
        self.high - self.low
    }
}

/// Extremes of `p_f^{A,v}` over valid boundary valuations `v ∈ V(A°)`, for
/// each region of a chain. Requires `D(f)⁺ ⊆ A`.
///
/// Only boundary cells sharing a constraint with `A⁻` influence the ratio.
/// When the model has a neutral symbol the sweep runs over valuations of
/// those cells alone; otherwise over all of `A°`.
pub fn description_bounds(model: &LatticeModel, regions: &[Region], f: &Pattern) -> Result<Vec<Bounds>, LatticeError> {
    regions.iter().map(|a| region_bounds(model, a, f)).collect()
}

fn region_bounds(model: &LatticeModel, a: &Region, f: &Pattern) -> Result<Bounds, LatticeError> {
    let shape: Region = f.shape().into_iter().collect();
    if !shape.thicken(model).is_subset(a) {
        return Err(LatticeError::InvalidRegion("D(f)⁺ must lie inside the region".into()));
    }
    let interior = a.interior(model);
    let boundary = a.boundary(model);
    let sweep = match model.neutral() {
        Some(_) => boundary.iter().filter(|&c| interior.thicken(model).contains(c)).collect(),
        None => boundary,
    };
    let valuations = enumerate_valuations(&sweep, model, &Pattern::new())?;
    let ratios: Vec<Option<f64>> = valuations
        .par_iter()
        .map(|v| -> Result<Option<f64>, LatticeError> {
            let base = count(a, model, v)?;
            if base == 0 {
                return Ok(None);
            }
            let joint = v.union(f).expect("f lies in the interior");
            Ok(Some(count(a, model, &joint)? as f64 / base as f64))
        })
        .collect::<Result<_, _>>()?;
    let mut low = f64::INFINITY;
    let mut high = f64::NEG_INFINITY;
    let mut used = 0;
    for r in ratios.into_iter().flatten() {
        low = low.min(r);
        high = high.max(r);
        used += 1;
    }
    if used == 0 {
        return Err(LatticeError::EmptyConditioning);
    }
    Ok(Bounds { low, high, boundary_valuations: used })
}

/// A site and the context whose valuations are fixed when testing pLOC.
#[derive(Clone, Debug)]
pub struct PlocSite {
    pub at: Coord,
    pub context: Region,
}

impl PlocSite {
    /// Context `N_x ∖ {x}`.
    pub fn neighborhood(model: &LatticeModel, at: Coord) -> Self {
        let mut context = Region::from_iter([at]).thicken(model);
        context.remove(at);
        PlocSite { at, context }
    }
}

/// Largest `|p_{v∪(x,a)} − p_{v∪(x,b)}|` over sites, valid context
/// valuations `v`, and symbol pairs whose extensions are both valid.
pub fn check_ploc(desc: &dyn Description, model: &LatticeModel, sites: &[PlocSite]) -> Result<f64, LatticeError> {
    let mut worst: f64 = 0.0;
    for site in sites {
        for v in enumerate_valuations(&site.context, model, &Pattern::new())? {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for a in 0..model.alphabet() {
                let ext = v.clone().with(site.at, a);
                if model.is_valid(&ext) {
                    let p = desc.prob(&ext)?;
                    lo = lo.min(p);
                    hi = hi.max(p);
                }
            }
            if hi >= lo {
                worst = worst.max(hi - lo);
            }
        }
    }
    Ok(worst)
}

/// Chain-rule view of a description along a fixed node order.
pub struct SequentialDescription<D> {
    desc: D,
    order: Vec<Coord>,
    alphabet: u8,
}

impl<D: Description> SequentialDescription<D> {
    pub fn new(desc: D, order: Vec<Coord>, alphabet: u8) -> Self {
        SequentialDescription { desc, order, alphabet }
    }

    pub fn order(&self) -> &[Coord] {
        &self.order
    }

    /// `q_b(v) = p_{f_v ∪ (x_k, b)} / p_{f_v}` for every symbol `b`, where
    /// `v` values the first `k` nodes of the order.
    pub fn conditionals(&self, prefix: &[u8]) -> Result<Vec<f64>, LatticeError> {
        let k = prefix.len();
        if k >= self.order.len() {
            return Err(LatticeError::InvalidRegion("prefix covers the whole order".into()));
        }
        let fv: Pattern = self.order.iter().copied().zip(prefix.iter().copied()).collect();
        let base = self.desc.prob(&fv)?;
        if base == 0.0 {
            return Err(LatticeError::ZeroPrefix { length: k });
        }
        (0..self.alphabet).map(|b| Ok(self.desc.prob(&fv.clone().with(self.order[k], b))? / base)).collect()
    }

    /// `Π_k q_{u_k}(u_{<k})`.
    pub fn joint(&self, values: &[u8]) -> Result<f64, LatticeError> {
        let mut p = 1.0;
        for k in 0..values.len() {
            let q = self.conditionals(&values[..k])?[values[k] as usize];
            p *= q;
            if p == 0.0 {
                break;
            }
        }
        Ok(p)
    }
}
