//! Filling over independent sets on the hard-square lattice.
//!
//! The checkerboard halves `Y_i = {(r, c) : (r + c) mod 2 = i}` carry no
//! internal constraints. Every node of `Y_0` becomes 1 with probability
//! `q`; a node of `Y_1` then takes a fair bit when its four neighbors are
//! all 0 and is forced to 0 otherwise.
//!
//! The codec drives one ABS generator over `Y_0` then `Y_1`, both in
//! row-major order, exactly like the strip codec. Encoded file:
//!
//! ```text
//! # algo1 ones=13107 precision=16 boundary=cyclic state=70123 bits=4000
//! 2 64 64 2
//! ...
//! ```

use rayon::prelude::*;

use super::{golden_section_max, ExperimentError, Estimate};
use crate::ans::{AbsCoder, AbsParams, AbsVariant, Ratio, StreamEncoder, SymbolCoder};
use crate::lattice::{Boundary, Grid, LatticeModel};
use crate::rng::{random_bits, SplitMix64};
use crate::spectral::kmodel::binary_entropy;
use crate::strip::{node_rule, NodeRule, DEFAULT_PRECISION};

/// `½ h(q) + ½ (1 − q)⁴` bits per node.
pub fn algorithm1_entropy(q: f64) -> f64 {
    0.5 * binary_entropy(q) + 0.5 * (1.0 - q).powi(4)
}

/// `dH_q/dq = ½ lg((1 − q)/q) − 2(1 − q)³`, strictly decreasing on (0, 1).
pub fn algorithm1_slope(q: f64) -> f64 {
    0.5 * ((1.0 - q) / q).log2() - 2.0 * (1.0 - q).powi(3)
}

/// `(max_q H_q, argmax)`: golden-section search, then bisection on the
/// slope, which pins the argmax to machine precision where the flat
/// maximum alone cannot.
pub fn algorithm1_optimum() -> (f64, f64) {
    let (_, x) = golden_section_max(algorithm1_entropy, 0.0, 1.0, 1e-9);
    let (mut lo, mut hi) = ((x - 1e-6).max(f64::MIN_POSITIVE), (x + 1e-6).min(1.0 - f64::EPSILON));
    while algorithm1_slope(lo) < 0.0 {
        lo /= 2.0;
    }
    while algorithm1_slope(hi) > 0.0 {
        hi = 0.5 * (hi + 1.0);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if algorithm1_slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let q = 0.5 * (lo + hi);
    (algorithm1_entropy(q), q)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algorithm1Lattice {
    /// `q = ones / 2^precision`.
    pub ones: u64,
    pub precision: u32,
    pub boundary: Boundary,
    pub state: u64,
    pub bits: usize,
    pub grid: Grid,
}

impl Algorithm1Lattice {
    /// Message bits per node, net of the `R + 1` header state bits.
    pub fn bits_per_node(&self) -> f64 {
        (self.bits as f64 - (self.precision + 1) as f64) / (self.grid.rows() * self.grid.cols()) as f64
    }

    pub fn header_line(&self) -> String {
        format!(
            "# algo1 ones={} precision={} boundary={} state={} bits={}",
            self.ones, self.precision, self.boundary, self.state, self.bits
        )
    }

    pub fn to_text(&self) -> String {
        format!("{}\n{}", self.header_line(), self.grid.to_text())
    }

    pub fn from_text(text: &str) -> Result<Self, ExperimentError> {
        let bad = |m: String| ExperimentError::Parse(m);
        let first = text.lines().find(|l| !l.trim().is_empty()).ok_or_else(|| bad("empty file".into()))?;
        let rest = first.trim().strip_prefix("# algo1").ok_or_else(|| bad("missing `# algo1` header".into()))?;
        let mut fields = std::collections::BTreeMap::new();
        for tok in rest.split_whitespace() {
            let (k, v) = tok.split_once('=').ok_or_else(|| bad(format!("bad header field `{tok}`")))?;
            fields.insert(k, v);
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| bad(format!("header lacks `{k}`")));
        let num = |k: &str| -> Result<u64, ExperimentError> { get(k)?.parse().map_err(|_| bad(format!("bad `{k}`"))) };
        Ok(Algorithm1Lattice {
            ones: num("ones")?,
            precision: num("precision")? as u32,
            boundary: get("boundary")?.parse()?,
            state: num("state")?,
            bits: num("bits")? as usize,
            grid: Grid::from_text(text)?,
        })
    }
}

/// Fixed lattice shape, `q` and coder precision.
#[derive(Clone, Debug)]
pub struct Algorithm1Codec {
    rows: usize,
    cols: usize,
    boundary: Boundary,
    precision: u32,
    ones: u64,
    model: LatticeModel,
}

impl Algorithm1Codec {
    /// `q` is rounded to `precision` bits. A cyclic lattice needs even
    /// sides so that the checkerboard closes up.
    pub fn new(rows: usize, cols: usize, q: f64, precision: u32, boundary: Boundary) -> Result<Self, ExperimentError> {
        if rows == 0 || cols == 0 {
            return Err(ExperimentError::InvalidParameter(format!("empty {rows}x{cols} lattice")));
        }
        if boundary == Boundary::Cyclic && (rows % 2 == 1 || cols % 2 == 1) {
            return Err(ExperimentError::InvalidParameter(format!("cyclic {rows}x{cols} lattice breaks the checkerboard")));
        }
        if !(2..=30).contains(&precision) {
            return Err(ExperimentError::InvalidParameter(format!("precision {precision} outside 2..=30")));
        }
        if !(0.0..=1.0).contains(&q) {
            return Err(ExperimentError::InvalidParameter(format!("q = {q} outside [0, 1]")));
        }
        let ones = (q * (1u64 << precision) as f64).round() as u64;
        Ok(Algorithm1Codec { rows, cols, boundary, precision, ones, model: LatticeModel::hard_square() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }
    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Quantized `q`.
    pub fn q(&self) -> f64 {
        self.ones as f64 / (1u64 << self.precision) as f64
    }

    /// `Y_0` then `Y_1`, each row-major.
    fn order(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let cells = move |parity| {
            (0..self.rows).flat_map(move |r| (0..self.cols).filter(move |c| (r + c) % 2 == parity).map(move |c| (r, c)))
        };
        cells(0).chain(cells(1))
    }

    fn rule(&self, grid: &Grid, r: usize, c: usize) -> NodeRule {
        if (r + c) % 2 == 0 {
            return node_rule(self.q(), self.precision);
        }
        let (r, c) = (r as i32, c as i32);
        let free = [(r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)]
            .into_iter()
            .all(|y| grid.lookup(y, self.boundary, 0).unwrap_or(0) == 0);
        if free {
            NodeRule::Coin(1 << (self.precision - 1))
        } else {
            NodeRule::Forced(0)
        }
    }

    fn coder(&self, ones: u64) -> AbsCoder {
        let params = AbsParams {
            q: Ratio::dyadic(ones, self.precision).expect("ones below 2^R"),
            precision: self.precision,
            digit_bits: 1,
            variant: AbsVariant::Ceiling,
        };
        AbsCoder::new(params).expect("dyadic q with one-bit digits is always absorbing")
    }

    /// Runs the generator on `source`; returns the lattice and final state.
    fn generate(&self, mut source: impl FnMut() -> u64) -> (Grid, u64) {
        let l = 1u64 << self.precision;
        let mut x = 1u64;
        for _ in 0..self.precision {
            x = 2 * x + source();
        }
        let mut grid = Grid::for_model(&self.model, self.rows, self.cols);
        let order: Vec<_> = self.order().collect();
        for (r, c) in order {
            let s = match self.rule(&grid, r, c) {
                NodeRule::Forced(s) => s,
                NodeRule::Coin(ones) => {
                    let (s, xs) = self.coder(ones).decode(x);
                    x = xs;
                    while x < l {
                        x = 2 * x + source();
                    }
                    s as u8
                }
            };
            grid.set(r, c, s);
        }
        (grid, x)
    }

    fn lattice(&self, grid: Grid, state: u64, bits: usize) -> Algorithm1Lattice {
        Algorithm1Lattice { ones: self.ones, precision: self.precision, boundary: self.boundary, state, bits, grid }
    }

    /// Writes `bits` (one bit per byte); unused capacity is padded with
    /// zero bits.
    pub fn encode(&self, bits: &[u8]) -> Result<Algorithm1Lattice, ExperimentError> {
        let mut pos = 0usize;
        let (grid, state) = self.generate(|| {
            pos += 1;
            bits.get(pos - 1).map_or(0, |&b| (b & 1) as u64)
        });
        if pos < bits.len() {
            return Err(ExperimentError::CapacityExceeded { achieved: pos });
        }
        Ok(self.lattice(grid, state, bits.len()))
    }

    /// Fills the lattice from random bits; the message is whatever the
    /// generator consumed.
    pub fn encode_random(&self, rng: &mut SplitMix64) -> (Algorithm1Lattice, Vec<u8>) {
        let mut msg = Vec::new();
        let (grid, state) = self.generate(|| {
            let b = rng.next_bit();
            msg.push(b);
            b as u64
        });
        let bits = msg.len();
        (self.lattice(grid, state, bits), msg)
    }

    pub fn decode(&self, lat: &Algorithm1Lattice) -> Result<Vec<u8>, ExperimentError> {
        let expect = self.lattice(lat.grid.clone(), lat.state, lat.bits);
        if expect.header_line() != lat.header_line() {
            return Err(ExperimentError::ConfigMismatch(format!("file `{}` vs codec `{}`", lat.header_line(), expect.header_line())));
        }
        let g = &lat.grid;
        if g.rows() != self.rows || g.cols() != self.cols {
            return Err(ExperimentError::ConfigMismatch(format!("grid is {}x{}, codec {}x{}", g.rows(), g.cols(), self.rows, self.cols)));
        }
        g.scan(&self.model, self.boundary).map_err(|e| ExperimentError::InvalidLattice(e.to_string()))?;
        let l = 1u64 << self.precision;
        if !(l..2 * l).contains(&lat.state) {
            return Err(ExperimentError::InvalidLattice("final state outside the coding interval".into()));
        }
        let order: Vec<_> = self.order().collect();
        let mut enc = StreamEncoder::new(lat.state);
        for &(r, c) in order.iter().rev() {
            let s = g.get(r, c);
            match self.rule(g, r, c) {
                NodeRule::Forced(f) if f != s => {
                    return Err(ExperimentError::InvalidLattice(format!("node ({r}, {c}) contradicts its context")))
                }
                NodeRule::Forced(_) => {}
                NodeRule::Coin(ones) => enc.push(&self.coder(ones), s as usize)?,
            }
        }
        let (digits, x0) = enc.finish();
        let mut out: Vec<u8> = (0..self.precision).rev().map(|i| (x0 >> i & 1) as u8).collect();
        out.extend(digits.iter().rev().map(|&d| d as u8));
        if out.len() < lat.bits || out[lat.bits..].iter().any(|&b| b != 0) {
            return Err(ExperimentError::InvalidLattice("lattice does not carry the declared message".into()));
        }
        out.truncate(lat.bits);
        Ok(out)
    }
}

/// Mean bits per node over `trials` lattices filled from random bits,
/// checking every roundtrip and constraint scan.
pub fn algorithm1_rate(codec: &Algorithm1Codec, trials: usize, seed: u64) -> Result<Estimate, ExperimentError> {
    let rates: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = SplitMix64::derive(seed, t as u64);
            let (lat, msg) = codec.encode_random(&mut rng);
            if codec.decode(&lat)? != msg {
                return Err(ExperimentError::InvalidLattice("roundtrip mismatch".into()));
            }
            Ok(lat.bits_per_node())
        })
        .collect::<Result<_, _>>()?;
    Ok(Estimate::from_samples(&rates))
}

/// `count` lattices from independent random messages.
pub fn algorithm1_samples(codec: &Algorithm1Codec, count: usize, seed: u64) -> Vec<Grid> {
    (0..count)
        .into_par_iter()
        .map(|t| codec.encode_random(&mut SplitMix64::derive(seed, t as u64)).0.grid)
        .collect()
}

/// Default codec for a square lattice at the optimal `q`.
pub fn optimal_codec(side: usize) -> Result<Algorithm1Codec, ExperimentError> {
    Algorithm1Codec::new(side, side, algorithm1_optimum().1, DEFAULT_PRECISION, Boundary::Cyclic)
}

/// Random message of `len` bits, for callers without their own data.
pub fn random_message(len: usize, seed: u64) -> Vec<u8> {
    random_bits(&mut SplitMix64::new(seed), len)
}
