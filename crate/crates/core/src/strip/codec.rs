//! Bitstreams to valid strip lattices and back.
//!
//! The message drives an ABS decoder used as a generator: each free node
//! takes the symbol the decoder emits at that node's conditional
//! probability, and the decoder pulls message bits as it renormalizes.
//! Decoding runs the matching encoder over the lattice in reverse, which
//! pushes the same bits back out. The final generator state goes into the
//! file header.
//!
//! Encoded file: a `# strip` header line followed by the grid text format.
//!
//! ```text
//! # strip model=hard-square width=8 boundary=cyclic precision=16 key=0 state=91234 bits=10000
//! 2 8 2126 2
//! ...
//! ```

use rayon::prelude::*;

use super::model::StripModel;
use super::tables::ConditionalTables;
use super::StripError;
use crate::ans::{AbsCoder, AbsParams, AbsVariant, Ratio, StreamEncoder, SymbolCoder};
use crate::lattice::{Boundary, Grid};
use crate::rng::{random_bits, SplitMix64};

pub const DEFAULT_PRECISION: u32 = 16;
const MAX_PRECISION: u32 = 30;

/// How one node is valuated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeRule {
    /// Value fixed by the context; no bits involved.
    Forced(u8),
    /// ABS step with `P(1) = ones / 2^R`.
    Coin(u64),
}

/// Rounds a conditional probability to `R` bits, keeping both symbols
/// possible whenever the exact value is strictly inside (0, 1).
pub fn node_rule(q: f64, precision: u32) -> NodeRule {
    if q <= 0.0 {
        return NodeRule::Forced(0);
    }
    if q >= 1.0 {
        return NodeRule::Forced(1);
    }
    let l = 1u64 << precision;
    NodeRule::Coin(((q * l as f64).round() as u64).clamp(1, l - 1))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StripHeader {
    pub model: String,
    pub width: usize,
    pub boundary: Boundary,
    pub precision: u32,
    pub key: u64,
    /// Generator state after the last node.
    pub state: u64,
    /// Message length in bits.
    pub bits: usize,
}

impl StripHeader {
    pub fn to_line(&self) -> String {
        format!(
            "# strip model={} width={} boundary={} precision={} key={} state={} bits={}",
            self.model, self.width, self.boundary, self.precision, self.key, self.state, self.bits
        )
    }

    pub fn parse(line: &str) -> Result<Self, StripError> {
        let bad = |msg: String| StripError::Parse(msg);
        let rest = line.trim().strip_prefix("# strip").ok_or_else(|| bad("missing `# strip` header".into()))?;
        let mut fields = std::collections::BTreeMap::new();
        for tok in rest.split_whitespace() {
            let (k, v) = tok.split_once('=').ok_or_else(|| bad(format!("bad header field `{tok}`")))?;
            fields.insert(k, v);
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| bad(format!("header lacks `{k}`")));
        let num = |k: &str| -> Result<u64, StripError> { get(k)?.parse().map_err(|_| bad(format!("bad `{k}`"))) };
        Ok(StripHeader {
            model: get("model")?.to_string(),
            width: num("width")? as usize,
            boundary: get("boundary")?.parse()?,
            precision: num("precision")? as u32,
            key: num("key")?,
            state: num("state")?,
            bits: num("bits")? as usize,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedLattice {
    pub header: StripHeader,
    pub grid: Grid,
}

impl EncodedLattice {
    pub fn nodes(&self) -> usize {
        self.grid.rows() * self.grid.cols()
    }

    /// Message bits per node, net of the `R + 1` header state bits.
    pub fn bits_per_node(&self) -> f64 {
        (self.header.bits as f64 - (self.header.precision + 1) as f64) / self.nodes() as f64
    }

    pub fn to_text(&self) -> String {
        format!("{}\n{}", self.header.to_line(), self.grid.to_text())
    }

    pub fn from_text(text: &str) -> Result<Self, StripError> {
        let first = text.lines().find(|l| !l.trim().is_empty()).ok_or_else(|| StripError::Parse("empty file".into()))?;
        let header = StripHeader::parse(first)?;
        let grid = Grid::from_text(text)?;
        Ok(EncodedLattice { header, grid })
    }
}

/// Strip model, its conditional tables, and coder settings.
#[derive(Clone, Debug)]
pub struct LatticeCodec {
    model: StripModel,
    tables: ConditionalTables,
    precision: u32,
    key: u64,
}

/// Message source for the generator: whitened message bits, then zeros.
struct BitSource<'a> {
    bits: &'a [u8],
    pos: usize,
    whitener: Option<SplitMix64>,
}

impl BitSource<'_> {
    fn next(&mut self) -> u64 {
        let Some(&b) = self.bits.get(self.pos) else {
            self.pos += 1;
            return 0;
        };
        self.pos += 1;
        let mask = self.whitener.as_mut().map_or(0, |w| w.next_bit());
        ((b & 1) ^ mask) as u64
    }
}

impl LatticeCodec {
    /// `key = 0` stores the message as is; any other key XORs it with a
    /// keyed pseudorandom stream first.
    pub fn new(model: StripModel, precision: u32, key: u64) -> Result<Self, StripError> {
        if !(2..=MAX_PRECISION).contains(&precision) {
            return Err(StripError::ConfigMismatch(format!("precision {precision} outside 2..={MAX_PRECISION}")));
        }
        let tables = ConditionalTables::build(&model)?;
        Ok(LatticeCodec { model, tables, precision, key })
    }

    pub fn model(&self) -> &StripModel {
        &self.model
    }
    pub fn tables(&self) -> &ConditionalTables {
        &self.tables
    }
    pub fn precision(&self) -> u32 {
        self.precision
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

    fn rule(&self, u: usize, row: usize, prefix: u32) -> NodeRule {
        node_rule(self.tables.q_one(u, row, prefix), self.precision)
    }

    fn header(&self, state: u64, bits: usize) -> StripHeader {
        StripHeader {
            model: self.model.base().model().name().to_string(),
            width: self.model.width(),
            boundary: self.model.boundary(),
            precision: self.precision,
            key: self.key,
            state,
            bits,
        }
    }

    /// Writes `bits` (one bit per byte) into a lattice of `columns`
    /// columns, or the fewest columns that hold the message when `None`.
    pub fn encode(&self, bits: &[u8], columns: Option<usize>) -> Result<EncodedLattice, StripError> {
        let n = self.model.width();
        let l = 1u64 << self.precision;
        let whitener = (self.key != 0).then(|| SplitMix64::new(self.key));
        let mut src = BitSource { bits, pos: 0, whitener };
        if columns.is_none() && self.model.capacity() <= 0.0 && bits.len() > self.precision as usize {
            return Err(StripError::CapacityExceeded { achieved: self.precision as usize });
        }
        let mut x = 1u64;
        for _ in 0..self.precision {
            x = 2 * x + src.next();
        }
        let mut cells: Vec<u32> = Vec::new();
        let mut u = self.model.zero_column();
        loop {
            match columns {
                Some(c) if cells.len() == c => break,
                None if !cells.is_empty() && src.pos >= bits.len() => break,
                _ => {}
            }
            let mut v = 0u32;
            for j in 0..n {
                let s = match self.rule(u, j, v) {
                    NodeRule::Forced(s) => s as u64,
                    NodeRule::Coin(ones) => {
                        let (s, xs) = self.coder(ones).decode(x);
                        x = xs;
                        while x < l {
                            x = 2 * x + src.next();
                        }
                        s as u64
                    }
                };
                v |= (s as u32) << j;
            }
            u = self.model.column_index(v).expect("generated columns are valid");
            cells.push(v);
        }
        if src.pos < bits.len() {
            return Err(StripError::CapacityExceeded { achieved: src.pos });
        }
        let mut grid = Grid::new(2, n, cells.len(), 2);
        for (c, &v) in cells.iter().enumerate() {
            for j in 0..n {
                grid.set(j, c, (v >> j & 1) as u8);
            }
        }
        Ok(EncodedLattice { header: self.header(x, bits.len()), grid })
    }

    pub fn decode(&self, enc: &EncodedLattice) -> Result<Vec<u8>, StripError> {
        let expect = self.header(enc.header.state, enc.header.bits);
        if enc.header != expect {
            return Err(StripError::ConfigMismatch(format!("file `{}` vs codec `{}`", enc.header.to_line(), expect.to_line())));
        }
        let g = &enc.grid;
        let n = self.model.width();
        if g.rows() != n || g.alphabet() != 2 || g.dim() != 2 {
            return Err(StripError::ConfigMismatch(format!("grid is {}x{}, codec width {n}", g.rows(), g.cols())));
        }
        g.scan_axes(&self.model.base().model(), self.model.boundary(), Boundary::Zero)
            .map_err(|e| StripError::InvalidLattice(e.to_string()))?;
        let columns: Vec<u32> = (0..g.cols())
            .map(|c| (0..n).fold(0u32, |v, j| v | (g.get(j, c) as u32) << j))
            .collect();
        let mut prev = Vec::with_capacity(columns.len());
        let mut u = self.model.zero_column();
        for &v in &columns {
            prev.push(u);
            u = self
                .model
                .column_index(v)
                .ok_or_else(|| StripError::InvalidLattice(format!("column {v:b} not in the alphabet")))?;
        }
        let l = 1u64 << self.precision;
        if !(l..2 * l).contains(&enc.header.state) {
            return Err(StripError::InvalidLattice("final state outside the coding interval".into()));
        }
        let mut enc_stream = StreamEncoder::new(enc.header.state);
        for c in (0..columns.len()).rev() {
            let v = columns[c];
            for j in (0..n).rev() {
                let s = (v >> j & 1) as usize;
                match self.rule(prev[c], j, v & ((1 << j) - 1)) {
                    NodeRule::Forced(f) if f as usize != s => {
                        return Err(StripError::InvalidLattice(format!("row {j} of column {c} contradicts its context")))
                    }
                    NodeRule::Forced(_) => {}
                    NodeRule::Coin(ones) => enc_stream.push(&self.coder(ones), s)?,
                }
            }
        }
        let (digits, x0) = enc_stream.finish();
        let mut out: Vec<u8> = (0..self.precision).rev().map(|i| (x0 >> i & 1) as u8).collect();
        out.extend(digits.iter().rev().map(|&d| d as u8));
        if out.len() < enc.header.bits || out[enc.header.bits..].iter().any(|&b| b != 0) {
            return Err(StripError::InvalidLattice("lattice does not carry the declared message".into()));
        }
        out.truncate(enc.header.bits);
        if self.key != 0 {
            let mut w = SplitMix64::new(self.key);
            for b in &mut out {
                *b ^= w.next_bit();
            }
        }
        Ok(out)
    }
}

/// Achieved bits per node over independent random messages.
#[derive(Clone, Debug, PartialEq)]
pub struct RateReport {
    pub width: usize,
    pub boundary: Boundary,
    pub trials: usize,
    pub mean: f64,
    pub stderr: f64,
    pub capacity: f64,
    pub reference: f64,
}

impl RateReport {
    /// `H − rate` against the plane's entropy.
    pub fn gap(&self) -> f64 {
        self.reference - self.mean
    }
}

/// Encodes `trials` random messages of `bits` bits each into minimal
/// lattices, checking every roundtrip.
pub fn evaluate_rate(codec: &LatticeCodec, trials: usize, bits: usize, seed: u64) -> Result<RateReport, StripError> {
    let rates: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = SplitMix64::derive(seed, t as u64);
            let msg = random_bits(&mut rng, bits);
            let enc = codec.encode(&msg, None)?;
            if codec.decode(&enc)? != msg {
                return Err(StripError::InvalidLattice("roundtrip mismatch".into()));
            }
            Ok(enc.bits_per_node())
        })
        .collect::<Result<_, _>>()?;
    let mean = rates.iter().sum::<f64>() / trials as f64;
    let var = if trials > 1 { rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (trials - 1) as f64 } else { 0.0 };
    Ok(RateReport {
        width: codec.model.width(),
        boundary: codec.model.boundary(),
        trials,
        mean,
        stderr: (var / trials as f64).sqrt(),
        capacity: codec.model.capacity(),
        reference: codec.model.base().reference_entropy(),
    })
}
