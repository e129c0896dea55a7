//! Closed-form asymmetric binary system.

use std::fmt;
use std::str::FromStr;

use super::coder::SymbolCoder;
use super::AnsError;

/// Exact rational probability `num / den`, always reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ratio {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Result<Self, AnsError> {
        if den == 0 || num > den {
            return Err(AnsError::InvalidProbability(format!("{num}/{den}")));
        }
        let g = gcd(num, den).max(1);
        Ok(Ratio { num: num / g, den: den / g })
    }

    /// `num / 2^bits`
    pub fn dyadic(num: u64, bits: u32) -> Result<Self, AnsError> {
        Self::new(num, 1u64 << bits)
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Fractional bits needed to write the value exactly, or `None` when the
    /// denominator is not a power of two.
    pub fn dyadic_bits(&self) -> Option<u32> {
        self.den.is_power_of_two().then(|| self.den.trailing_zeros())
    }

    /// Nearest `k / 2^bits`, ties rounding up.
    pub fn quantize(p: f64, bits: u32) -> Result<Self, AnsError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(AnsError::InvalidProbability(p.to_string()));
        }
        let scale = (1u64 << bits) as f64;
        Self::dyadic((p * scale + 0.5).floor() as u64, bits)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Accepts `a/b` or an exact decimal such as `0.3`.
impl FromStr for Ratio {
    type Err = AnsError;

    fn from_str(text: &str) -> Result<Self, AnsError> {
        let bad = || AnsError::InvalidProbability(text.to_string());
        let text = text.trim();
        if let Some((a, b)) = text.split_once('/') {
            let a = a.trim().parse().map_err(|_| bad())?;
            let b = b.trim().parse().map_err(|_| bad())?;
            return Ratio::new(a, b);
        }
        let (int, frac) = text.split_once('.').unwrap_or((text, ""));
        if frac.len() > 18 || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || (int.is_empty() && frac.is_empty()) {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = int.checked_mul(den).and_then(|v| v.checked_add(frac)).ok_or_else(bad)?;
        Ratio::new(num, den)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AbsVariant {
    /// `x₁ = ⌈xq⌉`
    #[default]
    Ceiling,
    /// `x₁ = ⌊xq⌋`
    Floor,
}

fn ceil_div(a: u128, b: u128) -> u128 {
    a.div_ceil(b)
}

/// Splits `x` into `(s, x_s)` where `s = 1` has probability `q`.
pub fn abs_decode_step(x: u64, q: Ratio, variant: AbsVariant) -> (u8, u64) {
    let (x, num, den) = (x as u128, q.num as u128, q.den as u128);
    let count = |y: u128| match variant {
        AbsVariant::Ceiling => ceil_div(y * num, den),
        AbsVariant::Floor => y * num / den,
    };
    let ones = count(x);
    if count(x + 1) > ones {
        (1, ones as u64)
    } else {
        (0, (x - ones) as u64)
    }
}

/// Inverse of [`abs_decode_step`].
pub fn abs_encode_step(s: u8, xs: u64, q: Ratio, variant: AbsVariant) -> u64 {
    let (xs, num, den) = (xs as u128, q.num as u128, q.den as u128);
    let x = match (variant, s) {
        (AbsVariant::Ceiling, 0) => ceil_div((xs + 1) * den, den - num) - 1,
        (AbsVariant::Ceiling, _) => xs * den / num,
        (AbsVariant::Floor, 0) => xs * den / (den - num),
        (AbsVariant::Floor, _) => ceil_div((xs + 1) * den, num) - 1,
    };
    x as u64
}

/// Stream parameters for closed-form binary coding: `l = 2^R`, `b = 2^w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AbsParams {
    pub q: Ratio,
    pub precision: u32,
    pub digit_bits: u32,
    pub variant: AbsVariant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AbsViolation {
    /// `q` must lie strictly between 0 and 1.
    OutOfRange,
    /// `q · 2^R` is not an integer.
    NotDyadic { bits_needed: Option<u32> },
    /// `⌈2^{R+w} q⌉ mod 2^w` (or the floor variant) is nonzero.
    NotAbsorbing { residue: u64 },
    /// `R + w` too large for a 64-bit state.
    StateOverflow,
}

impl fmt::Display for AbsViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbsViolation::OutOfRange => write!(f, "q must satisfy 0 < q < 1"),
            AbsViolation::NotDyadic { bits_needed: Some(b) } => write!(f, "q needs {b} fractional bits"),
            AbsViolation::NotDyadic { bits_needed: None } => write!(f, "q is not a dyadic rational"),
            AbsViolation::NotAbsorbing { residue } => write!(f, "substate intervals not absorbing (residue {residue})"),
            AbsViolation::StateOverflow => write!(f, "precision plus digit bits exceeds 62"),
        }
    }
}

pub const MAX_STATE_BITS: u32 = 62;

pub fn abs_validate(params: &AbsParams) -> Result<(), AbsViolation> {
    let q = params.q;
    if q.num == 0 || q.num >= q.den {
        return Err(AbsViolation::OutOfRange);
    }
    if params.digit_bits == 0 || params.precision + params.digit_bits > MAX_STATE_BITS {
        return Err(AbsViolation::StateOverflow);
    }
    match q.dyadic_bits() {
        Some(bits) if bits <= params.precision => {}
        bits_needed => return Err(AbsViolation::NotDyadic { bits_needed }),
    }
    let top = 1u128 << (params.precision + params.digit_bits);
    let scaled = match params.variant {
        AbsVariant::Ceiling => ceil_div(top * q.num as u128, q.den as u128),
        AbsVariant::Floor => top * q.num as u128 / q.den as u128,
    };
    let residue = (scaled % (1u128 << params.digit_bits)) as u64;
    if residue != 0 {
        return Err(AbsViolation::NotAbsorbing { residue });
    }
    Ok(())
}

/// Validated closed-form binary coder usable by the stream layer.
#[derive(Clone, Copy, Debug)]
pub struct AbsCoder {
    params: AbsParams,
    ones: u64,
}

impl AbsCoder {
    pub fn new(params: AbsParams) -> Result<Self, AnsError> {
        abs_validate(&params).map_err(AnsError::Abs)?;
        let ones = (params.q.num as u128 * (1u128 << params.precision) / params.q.den as u128) as u64;
        Ok(AbsCoder { params, ones })
    }

    pub fn params(&self) -> &AbsParams {
        &self.params
    }
}

impl SymbolCoder for AbsCoder {
    fn symbols(&self) -> usize {
        2
    }

    fn l(&self) -> u64 {
        1 << self.params.precision
    }

    fn b(&self) -> u64 {
        1 << self.params.digit_bits
    }

    fn l_s(&self, s: usize) -> u64 {
        if s == 1 {
            self.ones
        } else {
            self.l() - self.ones
        }
    }

    fn decode(&self, x: u64) -> (usize, u64) {
        let (s, xs) = abs_decode_step(x, self.params.q, self.params.variant);
        (s as usize, xs)
    }

    fn encode(&self, s: usize, xs: u64) -> u64 {
        abs_encode_step(s as u8, xs, self.params.q, self.params.variant)
    }
}
