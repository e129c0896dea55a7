//! Counting oracle `N(A, u)`: valuations of a finite region that violate no
//! forbidden pattern fully contained in it and agree with a clamp.

use std::collections::HashMap;

use super::model::{add, Coord, LatticeModel, Pattern};
use super::region::Region;
use super::LatticeError;

/// Work limit for explicit enumeration.
pub const ENUMERATION_LIMIT: u64 = 1 << 28;
/// Limit on simultaneous frontier states in the counting sweep.
pub const FRONTIER_LIMIT: usize = 1 << 22;

/// Row-major processing plan: every constraint instance inside the region
/// is checked at its last cell.
struct Plan {
    cells: Vec<Coord>,
    allowed: Vec<Vec<u8>>,
    checks: Vec<Vec<Vec<(usize, u8)>>>,
    last_use: Vec<usize>,
}

impl Plan {
    fn new(region: &Region, model: &LatticeModel, clamp: &Pattern) -> Result<Self, LatticeError> {
        let cells: Vec<Coord> = region.iter().collect();
        let index: HashMap<Coord, usize> = cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut allowed: Vec<Vec<u8>> = vec![(0..model.alphabet()).collect(); cells.len()];
        for (c, s) in clamp.iter() {
            let &i = index
                .get(&c)
                .ok_or_else(|| LatticeError::InvalidRegion(format!("clamped cell {c:?} outside region")))?;
            allowed[i] = if s < model.alphabet() { vec![s] } else { Vec::new() };
        }
        let mut checks = vec![Vec::new(); cells.len()];
        let mut last_use: Vec<usize> = (0..cells.len()).collect();
        for p in model.forbidden() {
            for &x in &cells {
                let inst: Option<Vec<(usize, u8)>> =
                    p.iter().map(|(c, s)| index.get(&add(c, x)).map(|&i| (i, s))).collect();
                let Some(inst) = inst else { continue };
                if inst.iter().any(|&(i, s)| !allowed[i].contains(&s)) {
                    continue;
                }
                let at = inst.iter().map(|&(i, _)| i).max().unwrap();
                for &(i, _) in &inst {
                    last_use[i] = last_use[i].max(at);
                }
                checks[at].push(inst);
            }
        }
        Ok(Plan { cells, allowed, checks, last_use })
    }
}

/// `N(A, clamp)` without materializing valuations.
pub fn count(region: &Region, model: &LatticeModel, clamp: &Pattern) -> Result<u128, LatticeError> {
    let plan = Plan::new(region, model, clamp)?;
    let bits = (u8::BITS - (model.alphabet().max(2) - 1).leading_zeros()) as usize;
    let sym_mask = (1u64 << bits) - 1;
    let n = plan.cells.len();

    let mut slot = vec![usize::MAX; n];
    let mut free_slots: Vec<usize> = Vec::new();
    let mut next_slot = 0;
    let mut expiring: Vec<Vec<usize>> = vec![Vec::new(); n];
    for j in 0..n {
        expiring[plan.last_use[j]].push(j);
    }

    let mut states: Vec<(u64, u128)> = vec![(0, 1)];
    let mut next: Vec<(u64, u128)> = Vec::new();
    for i in 0..n {
        let live = plan.last_use[i] > i;
        if live {
            slot[i] = free_slots.pop().unwrap_or_else(|| {
                next_slot += 1;
                next_slot - 1
            });
            if next_slot * bits > 64 {
                return Err(LatticeError::TooLarge);
            }
        }
        let read = |key: u64, j: usize| ((key >> (slot[j] * bits)) & sym_mask) as u8;
        let mut clear = u64::MAX;
        for &j in &expiring[i] {
            if j != i {
                clear &= !(sym_mask << (slot[j] * bits));
                free_slots.push(slot[j]);
            }
        }
        next.clear();
        for &(key, cnt) in &states {
            for &a in &plan.allowed[i] {
                let hit = plan.checks[i]
                    .iter()
                    .any(|inst| inst.iter().all(|&(j, s)| if j == i { a == s } else { read(key, j) == s }));
                if hit {
                    continue;
                }
                let mut k = key;
                if live {
                    k |= (a as u64) << (slot[i] * bits);
                }
                next.push((k & clear, cnt));
            }
        }
        next.sort_unstable_by_key(|&(k, _)| k);
        states.clear();
        for &(k, c) in &next {
            match states.last_mut() {
                Some((lk, lc)) if *lk == k => *lc = lc.checked_add(c).ok_or(LatticeError::TooLarge)?,
                _ => states.push((k, c)),
            }
        }
        if states.len() > FRONTIER_LIMIT {
            return Err(LatticeError::TooLarge);
        }
        if states.is_empty() {
            return Ok(0);
        }
    }
    states.iter().try_fold(0u128, |acc, &(_, c)| acc.checked_add(c).ok_or(LatticeError::TooLarge))
}

/// Every valuation of the region agreeing with the clamp, in lexicographic
/// row-major order.
pub fn enumerate_valuations(region: &Region, model: &LatticeModel, clamp: &Pattern) -> Result<Vec<Pattern>, LatticeError> {
    let plan = Plan::new(region, model, clamp)?;
    let n = plan.cells.len();
    let mut out = Vec::new();
    let mut values = vec![0u8; n];
    let mut choice = vec![0usize; n];
    let mut work = 0u64;
    let mut i = 0usize;
    // Iterative depth-first search; `choice[i]` is the next option to try.
    loop {
        if i == n {
            out.push(plan.cells.iter().copied().zip(values.iter().copied()).collect());
            if n == 0 {
                return Ok(out);
            }
            i -= 1;
            continue;
        }
        if choice[i] == plan.allowed[i].len() {
            choice[i] = 0;
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            continue;
        }
        work += 1;
        if work > ENUMERATION_LIMIT {
            return Err(LatticeError::TooLarge);
        }
        let a = plan.allowed[i][choice[i]];
        choice[i] += 1;
        values[i] = a;
        let hit = plan.checks[i].iter().any(|inst| inst.iter().all(|&(j, s)| values[j] == s));
        if !hit {
            i += 1;
        }
    }
}

/// `lg N(B_k) / |B_k|` for the `k`-block of the model's dimension.
pub fn entropy_estimate(k: usize, model: &LatticeModel) -> Result<f64, LatticeError> {
    let block = Region::block(model, k);
    let n = count(&block, model, &Pattern::new())?;
    Ok(lg_u128(n) / block.len() as f64)
}

/// `lg n` for counts beyond `f64` integer precision.
pub fn lg_u128(n: u128) -> f64 {
    if n == 0 {
        return f64::NEG_INFINITY;
    }
    let shift = (128 - n.leading_zeros()).saturating_sub(64);
    ((n >> shift) as f64).log2() + shift as f64
}
