use super::coder::SymbolCoder;
use super::stream::ans_stream_encode;
use super::AnsError;

/// Expected bits/symbol lost to the table's approximation of `x_s ≈ x q_s`:
/// `(1/ln 4) Σ_s (q_s/x²)(x_s/q_s − x)²` averaged over `I` with weight `1/x`,
/// where `x_s` counts the states below `x` assigned to `s` (offset by `l_s`)
/// and `q_s = l_s / l`.
pub fn waste_estimate<C: SymbolCoder>(coder: &C) -> f64 {
    let (l, b) = (coder.l(), coder.b());
    let n = coder.symbols();
    let q: Vec<f64> = (0..n).map(|s| coder.prob(s)).collect();
    let mut count: Vec<u64> = (0..n).map(|s| coder.l_s(s)).collect();
    let (mut total, mut weight) = (0.0, 0.0);
    for x in l..l * b {
        let xf = x as f64;
        let term: f64 = (0..n)
            .filter(|&s| q[s] > 0.0)
            .map(|s| {
                let dev = count[s] as f64 / q[s] - xf;
                q[s] * dev * dev
            })
            .sum::<f64>()
            / (xf * xf * 4f64.ln());
        total += term / xf;
        weight += 1.0 / xf;
        count[coder.decode(x).0] += 1;
    }
    total / weight
}

/// Measured coding cost of a concrete sequence.
#[derive(Clone, Copy, Debug)]
pub struct RateMeasurement {
    /// `(w·digits + lg x_final − lg l) / N`
    pub bits_per_symbol: f64,
    /// `−(1/N) Σ lg q_{s_i}` under the coder's quantized probabilities.
    pub information_per_symbol: f64,
}

impl RateMeasurement {
    pub fn excess(&self) -> f64 {
        self.bits_per_symbol - self.information_per_symbol
    }
}

pub fn measure_rate<C: SymbolCoder>(coder: &C, symbols: &[usize]) -> Result<RateMeasurement, AnsError> {
    let (digits, x) = ans_stream_encode(symbols, coder, coder.l())?;
    let n = symbols.len().max(1) as f64;
    let bits = digits.len() as f64 * (coder.b() as f64).log2() + (x as f64).log2() - (coder.l() as f64).log2();
    let info: f64 = symbols.iter().map(|&s| -coder.prob(s).log2()).sum();
    Ok(RateMeasurement { bits_per_symbol: bits / n, information_per_symbol: info / n })
}

#[cfg(test)]
mod tests {
    use super::super::abs::{AbsCoder, AbsParams, AbsVariant, Ratio};
    use super::*;

    fn abs(num: u64, precision: u32) -> AbsCoder {
        let q = Ratio::dyadic(num, precision).unwrap();
        AbsCoder::new(AbsParams { q, precision, digit_bits: 1, variant: AbsVariant::Ceiling }).unwrap()
    }

    #[test]
    fn binary_half_is_nearly_free() {
        let c = abs(1 << 7, 8);
        assert!(waste_estimate(&c) < 1.0 / (256.0 * 256.0));
    }

    #[test]
    fn decreases_with_precision() {
        let mut last = f64::INFINITY;
        for precision in 4..=12 {
            // q = 5/16 at every precision
            let w = waste_estimate(&abs(5 << (precision - 4), precision));
            assert!(w < last, "precision {precision}: {w} !< {last}");
            last = w;
        }
    }
}
