//! Framed `ANS1` byte container, all integers little-endian:
//!
//! ```text
//! "ANS1" | u8 version | u8 w | u8 R | u16 n | n × u32 l_s | u64 key
//!        | u64 final state | u64 digit count | digits, w bits each, LSB-first
//! ```
//!
//! The low bits of `version` name the coder (1 keyed table, 2 ABS ceiling,
//! 3 ABS floor); bit 7 marks the last symbol as forbidden. Decoding stops
//! when the state returns to `l = 2^R` with every digit read.

use super::abs::{AbsCoder, AbsParams, AbsVariant, Ratio};
use super::coder::SymbolCoder;
use super::forbidden::decode_guarded;
use super::stream::{ans_stream_decode_all, ans_stream_encode};
use super::table::{AnsTable, Spread};
use super::AnsError;

pub const MAGIC: &[u8; 4] = b"ANS1";
const FORBIDDEN_FLAG: u8 = 0x80;
/// Fixed bytes before the `l_s` list plus those after it.
pub const FIXED_HEADER_BYTES: usize = 4 + 3 + 2 + 3 * 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoderKind {
    Keyed = 1,
    AbsCeiling = 2,
    AbsFloor = 3,
}

/// A coder that can be written to and rebuilt from a container header.
#[derive(Clone, Debug)]
pub enum Codec {
    Table(AnsTable),
    Abs(AbsCoder),
}

impl Codec {
    fn kind(&self) -> CoderKind {
        match self {
            Codec::Table(_) => CoderKind::Keyed,
            Codec::Abs(c) if c.params().variant == AbsVariant::Floor => CoderKind::AbsFloor,
            Codec::Abs(_) => CoderKind::AbsCeiling,
        }
    }

    fn key(&self) -> u64 {
        match self {
            Codec::Table(t) => t.key(),
            Codec::Abs(_) => 0,
        }
    }

    fn digit_bits(&self) -> u32 {
        self.b().trailing_zeros()
    }

    fn precision(&self) -> u32 {
        self.l().trailing_zeros()
    }
}

impl SymbolCoder for Codec {
    fn symbols(&self) -> usize {
        match self {
            Codec::Table(t) => t.symbols(),
            Codec::Abs(c) => c.symbols(),
        }
    }
    fn l(&self) -> u64 {
        match self {
            Codec::Table(t) => t.l(),
            Codec::Abs(c) => c.l(),
        }
    }
    fn b(&self) -> u64 {
        match self {
            Codec::Table(t) => t.b(),
            Codec::Abs(c) => c.b(),
        }
    }
    fn l_s(&self, s: usize) -> u64 {
        match self {
            Codec::Table(t) => t.l_s(s),
            Codec::Abs(c) => c.l_s(s),
        }
    }
    fn decode(&self, x: u64) -> (usize, u64) {
        match self {
            Codec::Table(t) => t.decode(x),
            Codec::Abs(c) => c.decode(x),
        }
    }
    fn encode(&self, s: usize, xs: u64) -> u64 {
        match self {
            Codec::Table(t) => t.encode(s, xs),
            Codec::Abs(c) => c.encode(s, xs),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Container {
    pub codec: Codec,
    pub forbidden: bool,
    pub final_state: u64,
    pub digits: Vec<u32>,
}

impl Container {
    /// Encodes `symbols` starting from state `l`.
    pub fn encode(codec: Codec, forbidden: bool, symbols: &[usize]) -> Result<Self, AnsError> {
        if !codec.l().is_power_of_two() || !codec.b().is_power_of_two() {
            return Err(AnsError::InvalidParams("container needs power-of-two l and b".into()));
        }
        if codec.symbols() > u16::MAX as usize || (0..codec.symbols()).any(|s| codec.l_s(s) > u32::MAX as u64) {
            return Err(AnsError::InvalidParams("table does not fit the container header".into()));
        }
        if forbidden && symbols.contains(&(codec.symbols() - 1)) {
            return Err(AnsError::UnencodableSymbol { symbol: codec.symbols() - 1 });
        }
        if let Some(&s) = symbols.iter().find(|&&s| s >= codec.symbols()) {
            return Err(AnsError::UnencodableSymbol { symbol: s });
        }
        let (digits, final_state) = ans_stream_encode(symbols, &codec, codec.l())?;
        Ok(Container { codec, forbidden, final_state, digits })
    }

    pub fn decode(&self) -> Result<Vec<usize>, AnsError> {
        if self.forbidden {
            decode_guarded(&self.digits, &self.codec, self.final_state, None)
        } else {
            ans_stream_decode_all(&self.digits, &self.codec, self.final_state)
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let c = &self.codec;
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.push(c.kind() as u8 | if self.forbidden { FORBIDDEN_FLAG } else { 0 });
        out.push(c.digit_bits() as u8);
        out.push(c.precision() as u8);
        out.extend_from_slice(&(c.symbols() as u16).to_le_bytes());
        for s in 0..c.symbols() {
            out.extend_from_slice(&(c.l_s(s) as u32).to_le_bytes());
        }
        out.extend_from_slice(&c.key().to_le_bytes());
        out.extend_from_slice(&self.final_state.to_le_bytes());
        out.extend_from_slice(&(self.digits.len() as u64).to_le_bytes());
        out.extend(pack_digits(&self.digits, c.digit_bits()));
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, AnsError> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(AnsError::Container("bad magic".into()));
        }
        let version = r.u8()?;
        let forbidden = version & FORBIDDEN_FLAG != 0;
        let digit_bits = r.u8()? as u32;
        let precision = r.u8()? as u32;
        let n = r.u16()? as usize;
        let counts = (0..n).map(|_| r.u32().map(u64::from)).collect::<Result<Vec<_>, _>>()?;
        let key = r.u64()?;
        let final_state = r.u64()?;
        let digit_count = r.u64()?;
        if !(1..=16).contains(&digit_bits) || precision > 40 {
            return Err(AnsError::Container(format!("unsupported w = {digit_bits}, R = {precision}")));
        }
        if counts.iter().sum::<u64>() != 1u64 << precision {
            return Err(AnsError::Container("interval sizes do not sum to 2^R".into()));
        }
        let b = 1u64 << digit_bits;
        let codec = match version & !FORBIDDEN_FLAG {
            1 => Codec::Table(AnsTable::from_counts(&counts, b, Spread::Keyed(key))?),
            v @ (2 | 3) => {
                if n != 2 {
                    return Err(AnsError::Container("binary coder with n != 2".into()));
                }
                let variant = if v == 2 { AbsVariant::Ceiling } else { AbsVariant::Floor };
                let q = Ratio::dyadic(counts[1], precision)?;
                Codec::Abs(AbsCoder::new(AbsParams { q, precision, digit_bits, variant })?)
            }
            v => return Err(AnsError::Container(format!("unknown version byte {v}"))),
        };
        let payload_bytes = digit_count
            .checked_mul(digit_bits as u64)
            .map(|bits| bits.div_ceil(8))
            .filter(|&len| len == (bytes.len() - r.pos) as u64)
            .ok_or_else(|| AnsError::Container("payload length does not match digit count".into()))?;
        let digits = unpack_digits(r.take(payload_bytes as usize)?, digit_bits, digit_count as usize);
        Ok(Container { codec, forbidden, final_state, digits })
    }
}

fn pack_digits(digits: &[u32], w: u32) -> Vec<u8> {
    let mut out = vec![0u8; (digits.len() * w as usize).div_ceil(8)];
    for (i, &d) in digits.iter().enumerate() {
        for j in 0..w as usize {
            if d >> j & 1 == 1 {
                let bit = i * w as usize + j;
                out[bit / 8] |= 1 << (bit % 8);
            }
        }
    }
    out
}

fn unpack_digits(bytes: &[u8], w: u32, count: usize) -> Vec<u32> {
    (0..count)
        .map(|i| {
            (0..w as usize).fold(0u32, |d, j| {
                let bit = i * w as usize + j;
                d | (((bytes[bit / 8] >> (bit % 8)) & 1) as u32) << j
            })
        })
        .collect()
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], AnsError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| AnsError::Container("truncated".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }
    fn u8(&mut self) -> Result<u8, AnsError> {
        Ok(self.take(1)?[0])
    }
    fn u16(&mut self) -> Result<u16, AnsError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
    fn u32(&mut self) -> Result<u32, AnsError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64, AnsError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
