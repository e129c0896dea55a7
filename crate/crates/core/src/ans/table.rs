use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::coder::SymbolCoder;
use super::AnsError;
use crate::rng::SplitMix64;

/// Largest table built in memory, in states.
pub const MAX_TABLE_STATES: u64 = 1 << 26;

/// How the `(b−1)·l_s` occurrences of each symbol are laid over `I`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spread {
    /// Draw without replacement from the symbol pool with a keyed generator.
    Keyed(u64),
    /// Place the `c`-th occurrence of `s` by its ideal position `c / q_s`,
    /// with symbol 0 rounding up and the others down. For two symbols this
    /// is exactly the ceiling closed form.
    Precise,
}

/// `l_s ≈ l·q_s` with `Σ l_s = l`, by largest remainder (ties to the lower
/// index). Probabilities are normalized by their sum first.
pub fn apportion(probs: &[f64], l: u64) -> Result<Vec<u64>, AnsError> {
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(AnsError::InvalidProbability(format!("{probs:?}")));
    }
    let total: f64 = probs.iter().sum();
    if total <= 0.0 {
        return Err(AnsError::InvalidProbability(format!("{probs:?}")));
    }
    let ideal: Vec<f64> = probs.iter().map(|p| p / total * l as f64).collect();
    let mut counts: Vec<u64> = ideal.iter().map(|v| v.floor() as u64).collect();
    let assigned: u64 = counts.iter().sum();
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (ideal[a] - ideal[a].floor(), ideal[b] - ideal[b].floor());
        rb.partial_cmp(&ra).unwrap_or(Ordering::Equal).then(a.cmp(&b))
    });
    for &s in order.iter().take(l.saturating_sub(assigned) as usize) {
        counts[s] += 1;
    }
    Ok(counts)
}

/// Tabled ANS coder over `I = [l, bl)`.
#[derive(Clone, Debug)]
pub struct AnsTable {
    l: u64,
    b: u64,
    l_s: Vec<u64>,
    spread: Spread,
    symbol: Vec<u32>,
    substate: Vec<u64>,
    encode: Vec<Vec<u64>>,
}

#[derive(PartialEq, Eq)]
struct Slot {
    num: u64,
    den: u64,
    symbol: usize,
}

impl Ord for Slot {
    // reversed: BinaryHeap pops the smallest position first
    fn cmp(&self, other: &Self) -> Ordering {
        let a = self.num as u128 * other.den as u128;
        let b = other.num as u128 * self.den as u128;
        b.cmp(&a).then(other.symbol.cmp(&self.symbol))
    }
}

impl PartialOrd for Slot {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl AnsTable {
    /// Keyed table from probabilities; every symbol must keep `l_s ≥ 1`.
    pub fn build(probs: &[f64], l: u64, b: u64, key: u64) -> Result<Self, AnsError> {
        Self::with_spread(probs, l, b, Spread::Keyed(key))
    }

    pub fn with_spread(probs: &[f64], l: u64, b: u64, spread: Spread) -> Result<Self, AnsError> {
        if probs.iter().any(|&p| !(p > 0.0)) {
            return Err(AnsError::InvalidProbability(format!("{probs:?}")));
        }
        if l < probs.len() as u64 {
            return Err(AnsError::InvalidParams(format!("l = {l} is below the symbol count {}", probs.len())));
        }
        let l_s = apportion(probs, l)?;
        if let Some(s) = l_s.iter().position(|&c| c == 0) {
            return Err(AnsError::DegenerateSymbol { symbol: s });
        }
        Self::from_counts(&l_s, b, spread)
    }

    /// Table from explicit interval sizes. Symbols with `l_s = 0` are
    /// allowed and can never be encoded; at least two must be positive.
    pub fn from_counts(l_s: &[u64], b: u64, spread: Spread) -> Result<Self, AnsError> {
        let l: u64 = l_s.iter().sum();
        if l_s.iter().filter(|&&c| c > 0).count() < 2 {
            return Err(AnsError::InvalidParams("at least two symbols need nonzero weight".into()));
        }
        if b < 2 {
            return Err(AnsError::InvalidParams(format!("digit base {b} < 2")));
        }
        let states = (b - 1).checked_mul(l).filter(|&m| m <= MAX_TABLE_STATES && l.checked_mul(b).is_some());
        let Some(states) = states else {
            return Err(AnsError::TableTooLarge);
        };
        let mut symbol = Vec::with_capacity(states as usize);
        match spread {
            Spread::Keyed(key) => {
                let mut pool: Vec<u32> = Vec::with_capacity(states as usize);
                for (s, &c) in l_s.iter().enumerate() {
                    pool.extend(std::iter::repeat(s as u32).take(((b - 1) * c) as usize));
                }
                let mut rng = SplitMix64::new(key);
                let mut m = pool.len();
                while m > 0 {
                    let i = rng.below(m as u64) as usize;
                    symbol.push(pool[i]);
                    pool[i] = pool[m - 1];
                    m -= 1;
                }
            }
            Spread::Precise => {
                let mut heap: BinaryHeap<Slot> = l_s
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(s, &c)| Slot { num: c + u64::from(s == 0), den: c, symbol: s })
                    .collect();
                while symbol.len() < states as usize {
                    let mut slot = heap.pop().expect("pool sizes sum to the table size");
                    symbol.push(slot.symbol as u32);
                    slot.num += 1;
                    if slot.num - u64::from(slot.symbol == 0) < b * slot.den {
                        heap.push(slot);
                    }
                }
            }
        }
        let mut next = l_s.to_vec();
        let mut encode: Vec<Vec<u64>> = l_s.iter().map(|&c| Vec::with_capacity(((b - 1) * c) as usize)).collect();
        let mut substate = Vec::with_capacity(states as usize);
        for (i, &s) in symbol.iter().enumerate() {
            let s = s as usize;
            substate.push(next[s]);
            encode[s].push(l + i as u64);
            next[s] += 1;
        }
        Ok(AnsTable { l, b, l_s: l_s.to_vec(), spread, symbol, substate, encode })
    }

    pub fn spread(&self) -> Spread {
        self.spread
    }

    pub fn key(&self) -> u64 {
        match self.spread {
            Spread::Keyed(key) => key,
            Spread::Precise => 0,
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.l_s
    }

    /// Symbol assigned to each state of `I`, in increasing `x`.
    pub fn decode_symbols(&self) -> impl Iterator<Item = usize> + '_ {
        self.symbol.iter().map(|&s| s as usize)
    }
}

impl SymbolCoder for AnsTable {
    fn symbols(&self) -> usize {
        self.l_s.len()
    }

    fn l(&self) -> u64 {
        self.l
    }

    fn b(&self) -> u64 {
        self.b
    }

    fn l_s(&self, s: usize) -> u64 {
        self.l_s[s]
    }

    fn decode(&self, x: u64) -> (usize, u64) {
        let i = (x - self.l) as usize;
        (self.symbol[i] as usize, self.substate[i])
    }

    fn encode(&self, s: usize, xs: u64) -> u64 {
        self.encode[s][(xs - self.l_s[s]) as usize]
    }
}
