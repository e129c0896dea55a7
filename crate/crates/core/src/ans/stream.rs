use super::coder::SymbolCoder;
use super::AnsError;

/// Encoder side of the stream layer. Symbols are pushed in the reverse of
/// the order the decoder will emit them; digits accumulate LIFO.
#[derive(Clone, Debug)]
pub struct StreamEncoder {
    x: u64,
    digits: Vec<u32>,
}

impl StreamEncoder {
    pub fn new(initial: u64) -> Self {
        StreamEncoder { x: initial, digits: Vec::new() }
    }

    pub fn state(&self) -> u64 {
        self.x
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn push<C: SymbolCoder>(&mut self, coder: &C, s: usize) -> Result<(), AnsError> {
        let (l, b) = (coder.l(), coder.b());
        if !(l..l * b).contains(&self.x) {
            return Err(AnsError::StateOutOfRange { x: self.x });
        }
        let ls = coder.l_s(s);
        if ls == 0 {
            return Err(AnsError::UnencodableSymbol { symbol: s });
        }
        while self.x >= b * ls {
            self.digits.push((self.x % b) as u32);
            self.x /= b;
        }
        self.x = coder.encode(s, self.x);
        Ok(())
    }

    /// `(digits in push order, final state)`
    pub fn finish(self) -> (Vec<u32>, u64) {
        (self.digits, self.x)
    }
}

/// Decoder side: starts at the encoder's final state and reads digits from
/// the end of the buffer.
#[derive(Clone, Debug)]
pub struct StreamDecoder<'a> {
    x: u64,
    digits: &'a [u32],
    remaining: usize,
    emitted: usize,
}

impl<'a> StreamDecoder<'a> {
    pub fn new(digits: &'a [u32], final_state: u64) -> Self {
        StreamDecoder { x: final_state, digits, remaining: digits.len(), emitted: 0 }
    }

    pub fn state(&self) -> u64 {
        self.x
    }

    /// Digits not yet read.
    pub fn remaining(&self) -> usize {
        self.remaining
    }

    pub fn emitted(&self) -> usize {
        self.emitted
    }

    pub fn next<C: SymbolCoder>(&mut self, coder: &C) -> Result<usize, AnsError> {
        let (l, b) = (coder.l(), coder.b());
        if !(l..l * b).contains(&self.x) {
            return Err(AnsError::StateOutOfRange { x: self.x });
        }
        let (s, mut x) = coder.decode(self.x);
        while x < l {
            if self.remaining == 0 {
                return Err(AnsError::CorruptStream { position: self.emitted });
            }
            self.remaining -= 1;
            let d = self.digits[self.remaining] as u64;
            if d >= b {
                return Err(AnsError::CorruptStream { position: self.emitted });
            }
            x = x * b + d;
        }
        self.x = x;
        self.emitted += 1;
        Ok(s)
    }

    /// True when the decoder is back at `initial` with every digit read.
    pub fn at_start(&self, initial: u64) -> bool {
        self.remaining == 0 && self.x == initial
    }
}

/// Encodes `symbols` so that decoding emits them in the given order.
pub fn ans_stream_encode<C: SymbolCoder>(symbols: &[usize], coder: &C, initial: u64) -> Result<(Vec<u32>, u64), AnsError> {
    let mut enc = StreamEncoder::new(initial);
    for &s in symbols.iter().rev() {
        enc.push(coder, s)?;
    }
    Ok(enc.finish())
}

/// Decodes exactly `count` symbols.
pub fn ans_stream_decode<C: SymbolCoder>(digits: &[u32], coder: &C, final_state: u64, count: usize) -> Result<Vec<usize>, AnsError> {
    let mut dec = StreamDecoder::new(digits, final_state);
    (0..count).map(|_| dec.next(coder)).collect()
}

/// Decodes until every digit is read and the state is back at `l`. This
/// is unambiguous because decoding from `l` always needs a digit when all
/// `l_s < l`.
pub fn ans_stream_decode_all<C: SymbolCoder>(digits: &[u32], coder: &C, final_state: u64) -> Result<Vec<usize>, AnsError> {
    let mut dec = StreamDecoder::new(digits, final_state);
    let mut out = Vec::new();
    while !dec.at_start(coder.l()) {
        out.push(dec.next(coder)?);
    }
    Ok(out)
}

/// Brings any `x ≥ 1` into `[l, bl)`, dropping low digits while too large
/// or appending the given digits while too small. Returns the state and
/// the number of steps taken.
pub fn absorb(mut x: u64, l: u64, b: u64, mut digits: impl Iterator<Item = u64>) -> Option<(u64, usize)> {
    let mut steps = 0;
    while x >= l * b {
        x /= b;
        steps += 1;
    }
    while x < l {
        x = x.checked_mul(b)?.checked_add(digits.next()?)?;
        steps += 1;
    }
    Some((x, steps))
}

/// Encoded size in bits: every digit plus one full state.
pub fn encoded_bits(digit_count: usize, l: u64, b: u64) -> f64 {
    digit_count as f64 * (b as f64).log2() + ((l * b) as f64).log2()
}

#[cfg(test)]
mod tests {
    use super::super::table::{AnsTable, Spread};
    use super::*;

    #[test]
    fn empty_sequence() {
        let t = AnsTable::build(&[0.5, 0.5], 16, 2, 0).unwrap();
        let (digits, x) = ans_stream_encode(&[], &t, 16).unwrap();
        assert!(digits.is_empty());
        assert_eq!(x, 16);
        assert!(ans_stream_decode_all(&digits, &t, x).unwrap().is_empty());
    }

    #[test]
    fn single_symbol() {
        let t = AnsTable::build(&[0.3, 0.7], 64, 4, 3).unwrap();
        for s in 0..2 {
            let (digits, x) = ans_stream_encode(&[s], &t, t.l()).unwrap();
            assert_eq!(ans_stream_decode(&digits, &t, x, 1).unwrap(), vec![s]);
            assert_eq!(ans_stream_decode_all(&digits, &t, x).unwrap(), vec![s]);
        }
    }

    #[test]
    fn exhausted_digits_are_reported() {
        let t = AnsTable::from_counts(&[4, 4], 2, Spread::Precise).unwrap();
        let (digits, x) = ans_stream_encode(&[0, 1, 1, 0, 1], &t, 8).unwrap();
        let err = ans_stream_decode(&digits[1..], &t, x, 5).unwrap_err();
        assert!(matches!(err, AnsError::CorruptStream { .. }));
    }

    #[test]
    fn absorb_examples() {
        assert_eq!(absorb(40, 8, 2, std::iter::empty()), Some((10, 2)));
        assert_eq!(absorb(3, 8, 2, [1, 0].into_iter()), Some((14, 2)));
        assert_eq!(absorb(3, 8, 2, [1].into_iter()), None);
        assert_eq!(absorb(9, 8, 2, std::iter::empty()), Some((9, 0)));
    }
}
